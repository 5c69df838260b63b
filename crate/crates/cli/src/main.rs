//! `spincoh` command-line front end. Every subcommand validates its flags,
//! computes, then writes one deterministic CSV or JSON document.
//!
//! Exit codes: 0 success, 1 numeric failure, 2 usage error.

mod parse;

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use spincoh::format::sig12;
use spincoh::helstrom::{self, DiscriminationProblem};
use spincoh::majorana::{circle_check, constellation, curvature};
use spincoh::states::{spin_coherent, FockVector, SpinMagnitude};
use spincoh::{entanglement, C64};

#[derive(Parser, Debug)]
#[command(
    name = "spincoh",
    version,
    about = "Spin-coherent states through a beam splitter"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Entanglement over a grid of two_s and |z| at fixed |R|².
    ///
    /// CSV columns: two_s,z_mod,r2,von_neumann,linear. JSON: {"records": [...]}
    /// with the same fields. A defaulted --r2 is noted in a `#` comment line
    /// (CSV) or a "defaults" object (JSON).
    Sweep(SweepArgs),
    /// Entanglement against |R|² at fixed two_s and z.
    ///
    /// CSV columns: r2,von_neumann,linear, then a trailer `# argmax_r2,<value>`.
    /// JSON: {"records": [...], "argmax_r2": value}.
    R2scan(R2scanArgs),
    /// Minimum error probability for telling |alpha⟩ from |beta⟩.
    ///
    /// CSV columns: two_s,beta_re,beta_im,p_a,p_error. JSON: {"records": [...]}
    /// with beta as [re, im]. --emit-states DIR also writes the states
    /// two_s<T>_beta<K>_{A,B,eA,eB}.json (K indexes --beta) in the state format
    /// {"dim", "amps", "label"}.
    Helstrom(HelstromArgs),
    /// Majorana constellation of a state as JSON.
    ///
    /// Output: {"two_s", "points": [[x,y,z], ...], "north_multiplicity"}; with
    /// --superpose also "circle": {"center": [re, im], "radius", "max_residual"}.
    Majorana(MajoranaArgs),
    /// Overlap of a Glauber state with its spin-coherent approximant.
    ///
    /// CSV columns: two_s,overlap. JSON: {"records": [...]}.
    Limit(LimitArgs),
    /// Phase-space curvature against the 1/(2S) reference.
    ///
    /// CSV columns: two_s,z_re,z_im,curvature,reference. JSON: {"records": [...]}.
    Curvature(CurvatureArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output file; `-` or omitted writes to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Prepend a commented provenance header (a "meta" field in JSON).
    #[arg(long)]
    meta: bool,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, default_value_t = 1.0)]
    z_min: f64,
    /// Defaults to --z-min.
    #[arg(long)]
    z_max: Option<f64>,
    #[arg(long, default_value_t = 1)]
    z_steps: usize,
    #[arg(long, default_value_t = 1)]
    two_s_min: u32,
    #[arg(long, default_value_t = 40)]
    two_s_max: u32,
    /// Reflectivity |R|²; 0.5 when omitted.
    #[arg(long)]
    r2: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct R2scanArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse::complex, default_value = "1")]
    z: C64,
    #[arg(long)]
    two_s: u32,
    /// Number of intervals in [0, 1].
    #[arg(long, default_value_t = 20)]
    steps: u32,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct HelstromArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse::complex, default_value = "0")]
    alpha: C64,
    /// Comma-separated list, e.g. `0.5,1,2i`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse::complex_list, default_value = "1")]
    beta: parse::List<C64>,
    #[arg(long, default_value_t = 0.5)]
    pa: f64,
    #[arg(long, default_value_t = 1)]
    two_s_min: u32,
    #[arg(long, default_value_t = 20)]
    two_s_max: u32,
    /// Directory for the state and post-measurement state JSON files.
    #[arg(long)]
    emit_states: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct StateSource {
    /// State JSON file ({"dim", "amps", "label"}).
    #[arg(long)]
    state_file: Option<PathBuf>,
    /// `TWO_S,ALPHA`: the spin-coherent state |alpha⟩.
    #[arg(long, value_parser = parse::coherent_source)]
    coherent: Option<(u32, C64)>,
    /// `A,B,BETA,TWO_S`: normalized a|0⟩ + b|beta⟩.
    #[arg(long, value_parser = parse::superposition_source)]
    superpose: Option<(C64, C64, C64, u32)>,
}

#[derive(Args, Debug)]
struct MajoranaArgs {
    #[command(flatten)]
    source: StateSource,
    /// Output file; `-` or omitted writes to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    meta: bool,
}

#[derive(Args, Debug)]
struct LimitArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse::complex, default_value = "1")]
    alpha: C64,
    #[arg(long, value_parser = parse::u32_list, default_value = "20,200,2000,20000")]
    two_s_list: parse::List<u32>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct CurvatureArgs {
    #[arg(long)]
    two_s: u32,
    #[arg(long, allow_hyphen_values = true, value_parser = parse::complex, default_value = "0")]
    z: C64,
    #[command(flatten)]
    output: OutputArgs,
}

enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<spincoh::Error> for Failure {
    fn from(e: spincoh::Error) -> Self {
        Failure::Numeric(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Numeric(format!("i/o: {e}"))
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn spin(two_s: u32) -> Outcome<SpinMagnitude> {
    SpinMagnitude::new(two_s).map_err(|e| usage(e.to_string()))
}

fn check_finite(name: &str, x: f64) -> Outcome<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(usage(format!("--{name} must be finite")))
    }
}

fn provenance() -> String {
    let args: Vec<String> = std::env::args().skip(1).collect();
    format!("spincoh {} {}", env!("CARGO_PKG_VERSION"), args.join(" "))
}

/// One output document: CSV text or a JSON object.
enum Document {
    Csv(String),
    Json(Value),
}

fn write_document(doc: Document, out: Option<&Path>, meta: bool) -> Outcome<()> {
    let text = match doc {
        Document::Csv(body) if meta => format!("# {}\n{body}", provenance()),
        Document::Csv(body) => body,
        Document::Json(mut value) => {
            if meta {
                value["meta"] = Value::String(provenance());
            }
            let mut s = serde_json::to_string_pretty(&value).expect("json serializes");
            s.push('\n');
            s
        }
    };
    match out {
        Some(path) if path != Path::new("-") => std::fs::write(path, text)?,
        _ => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn emit(output: &OutputArgs, csv: impl FnOnce() -> String, json: impl FnOnce() -> Value) -> Outcome<()> {
    let doc = match output.format {
        Format::Csv => Document::Csv(csv()),
        Format::Json => Document::Json(json()),
    };
    write_document(doc, output.out.as_deref(), output.meta)
}

fn cmd_sweep(args: SweepArgs) -> Outcome<()> {
    let z_max = args.z_max.unwrap_or(args.z_min);
    check_finite("z-min", args.z_min)?;
    check_finite("z-max", z_max)?;
    if args.z_min < 0.0 || z_max < args.z_min {
        return Err(usage("need 0 <= --z-min <= --z-max"));
    }
    if args.z_steps == 0 {
        return Err(usage("--z-steps must be at least 1"));
    }
    if args.z_steps == 1 && z_max != args.z_min {
        return Err(usage("--z-steps 1 needs --z-max equal to --z-min"));
    }
    if args.two_s_min == 0 || args.two_s_max < args.two_s_min {
        return Err(usage("need 1 <= --two-s-min <= --two-s-max"));
    }
    let r2 = args.r2.unwrap_or(0.5);
    if !(0.0..=1.0).contains(&r2) {
        return Err(usage("--r2 must lie in [0, 1]"));
    }
    let z_mod: Vec<f64> = if args.z_steps == 1 {
        vec![args.z_min]
    } else {
        let h = (z_max - args.z_min) / (args.z_steps - 1) as f64;
        (0..args.z_steps).map(|k| args.z_min + h * k as f64).collect()
    };
    let grid = entanglement::SweepGrid {
        two_s: (args.two_s_min..=args.two_s_max).collect(),
        z_mod,
        r2: vec![r2],
    };
    let records = entanglement::sweep(&grid)?;
    let defaulted = args.r2.is_none();
    emit(
        &args.output,
        || {
            let mut s = String::new();
            if defaulted {
                s.push_str("# r2 defaulted to 0.5\n");
            }
            let mut buf = Vec::new();
            entanglement::write_sweep_csv(&records, &mut buf).expect("writes to memory");
            s.push_str(&String::from_utf8(buf).expect("ascii"));
            s
        },
        || {
            let mut v = json!({ "records": records });
            if defaulted {
                v["defaults"] = json!({ "r2": 0.5 });
            }
            v
        },
    )
}

fn cmd_r2scan(args: R2scanArgs) -> Outcome<()> {
    let spin = spin(args.two_s)?;
    if args.steps == 0 {
        return Err(usage("--steps must be at least 1"));
    }
    let step = 1.0 / args.steps as f64;
    let grid = entanglement::r2_grid(step).map_err(|e| usage(e.to_string()))?;
    let rows = grid
        .iter()
        .map(|&r2| entanglement::output_entropies(spin, args.z, r2).map(|(e, l)| (r2, e, l)))
        .collect::<spincoh::Result<Vec<_>>>()?;
    let argmax = entanglement::argmax_r2(spin, args.z, step)?;
    emit(
        &args.output,
        || {
            let mut s = String::from("r2,von_neumann,linear\n");
            for (r2, e, l) in &rows {
                writeln!(s, "{},{},{}", sig12(*r2), sig12(*e), sig12(*l)).expect("string write");
            }
            writeln!(s, "# argmax_r2,{}", sig12(argmax)).expect("string write");
            s
        },
        || {
            let records: Vec<Value> = rows
                .iter()
                .map(|(r2, e, l)| json!({ "r2": r2, "von_neumann": e, "linear": l }))
                .collect();
            json!({ "records": records, "argmax_r2": argmax })
        },
    )
}

fn cmd_helstrom(args: HelstromArgs) -> Outcome<()> {
    if !(args.pa > 0.0 && args.pa < 1.0) {
        return Err(usage("--pa must lie in (0, 1)"));
    }
    if args.two_s_min == 0 || args.two_s_max < args.two_s_min {
        return Err(usage("need 1 <= --two-s-min <= --two-s-max"));
    }
    if let Some(dir) = &args.emit_states {
        if !dir.is_dir() {
            return Err(usage(format!(
                "--emit-states {} is not a directory",
                dir.display()
            )));
        }
    }
    let two_s: Vec<u32> = (args.two_s_min..=args.two_s_max).collect();
    let records = helstrom::sweep(args.alpha, &args.beta.0, args.pa, &two_s)?;
    if let Some(dir) = &args.emit_states {
        for &t in &two_s {
            let spin = spin(t)?;
            for (k, &beta) in args.beta.0.iter().enumerate() {
                let a = spin_coherent(spin, args.alpha)?.with_label("A");
                let b = spin_coherent(spin, beta)?.with_label("B");
                let problem = DiscriminationProblem::new(a.clone(), b.clone(), args.pa)?;
                let (e_a, e_b) = helstrom::post_measurement_states(&problem)?;
                for (tag, state) in [("A", &a), ("B", &b), ("eA", &e_a), ("eB", &e_b)] {
                    let path = dir.join(format!("two_s{t}_beta{k}_{tag}.json"));
                    std::fs::write(path, state.to_json() + "\n")?;
                }
            }
        }
    }
    emit(
        &args.output,
        || {
            let mut buf = Vec::new();
            helstrom::write_sweep_csv(&records, &mut buf).expect("writes to memory");
            String::from_utf8(buf).expect("ascii")
        },
        || json!({ "records": records }),
    )
}

fn cmd_majorana(args: MajoranaArgs) -> Outcome<()> {
    let (state, circle) = if let Some(path) = &args.source.state_file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        let state = FockVector::from_json(&text).map_err(|e| usage(e.to_string()))?;
        (state, None)
    } else if let Some((two_s, alpha)) = args.source.coherent {
        (spin_coherent(spin(two_s)?, alpha)?, None)
    } else if let Some((a, b, beta, two_s)) = args.source.superpose {
        let spin = spin(two_s)?;
        if b.norm() == 0.0 || beta.norm() == 0.0 {
            return Err(usage("--superpose needs b != 0 and beta != 0"));
        }
        let coherent = spin_coherent(spin, beta)?;
        let amps = coherent
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(n, y)| b * y + if n == 0 { a } else { C64::new(0.0, 0.0) })
            .collect();
        let state = FockVector::new(amps, "superposition")?;
        (state, Some(circle_check(a, b, spin, beta)?))
    } else {
        return Err(usage("one of --state-file, --coherent, --superpose is required"));
    };
    let mut value = constellation(&state)?.to_json_value();
    if let Some(chk) = circle {
        value["circle"] = json!({
            "center": [chk.center.re, chk.center.im],
            "radius": chk.radius,
            "max_residual": chk.max_residual,
        });
    }
    write_document(Document::Json(value), args.out.as_deref(), args.meta)
}

fn cmd_limit(args: LimitArgs) -> Outcome<()> {
    let rows = args
        .two_s_list
        .0
        .iter()
        .map(|&t| Ok((t, entanglement::limit_overlap(args.alpha, spin(t)?))))
        .collect::<Outcome<Vec<_>>>()?;
    emit(
        &args.output,
        || {
            let mut s = String::from("two_s,overlap\n");
            for (t, o) in &rows {
                writeln!(s, "{t},{}", sig12(*o)).expect("string write");
            }
            s
        },
        || {
            let records: Vec<Value> = rows
                .iter()
                .map(|(t, o)| json!({ "two_s": t, "overlap": o }))
                .collect();
            json!({ "records": records })
        },
    )
}

fn cmd_curvature(args: CurvatureArgs) -> Outcome<()> {
    let spin = spin(args.two_s)?;
    let k = curvature(spin, args.z);
    if !k.is_finite() {
        return Err(Failure::Numeric("curvature is not finite".into()));
    }
    let reference = 1.0 / args.two_s as f64;
    emit(
        &args.output,
        || {
            format!(
                "two_s,z_re,z_im,curvature,reference\n{},{},{},{},{}\n",
                args.two_s,
                sig12(args.z.re),
                sig12(args.z.im),
                sig12(k),
                sig12(reference)
            )
        },
        || {
            json!({ "records": [{
                "two_s": args.two_s,
                "z": [args.z.re, args.z.im],
                "curvature": k,
                "reference": reference,
            }] })
        },
    )
}

fn run(cli: Cli) -> Outcome<()> {
    match cli.command {
        Command::Sweep(a) => cmd_sweep(a),
        Command::R2scan(a) => cmd_r2scan(a),
        Command::Helstrom(a) => cmd_helstrom(a),
        Command::Majorana(a) => cmd_majorana(a),
        Command::Limit(a) => cmd_limit(a),
        Command::Curvature(a) => cmd_curvature(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
