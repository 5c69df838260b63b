//! Minimum-error discrimination between two pure states.
//!
//! All span computations go through the orthonormal pair `e1 = A`,
//! `e2 ∝ B - ⟨A|B⟩A`, in which `A = (1, 0)` and `B = (g, h)` with `g = ⟨A|B⟩`
//! and `h ≥ 0`.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::format::sig12;
use crate::states::{ln_coherent_overlap, overlap, FockVector, SpinMagnitude, NORM_TOLERANCE};
use crate::{CMatrix, Error, Result, C64};

/// Below this `h` the two states span a single dimension.
pub const SPAN_TOLERANCE: f64 = 1e-12;

/// Eigenvalues of the weighted difference operator within this of zero are
/// assigned to outcome A.
pub const LABEL_TOLERANCE: f64 = 1e-14;

pub const CSV_HEADER: &str = "two_s,beta_re,beta_im,p_a,p_error";

/// Decide between `state_a` (prior `p_a`) and `state_b` (prior `1 - p_a`).
#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminationProblem {
    state_a: FockVector,
    state_b: FockVector,
    p_a: f64,
}

impl DiscriminationProblem {
    pub fn new(state_a: FockVector, state_b: FockVector, p_a: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_a) {
            return Err(Error::domain(format!("prior {p_a} outside [0, 1]")));
        }
        if state_a.dim() != state_b.dim() {
            return Err(Error::domain(format!(
                "dimensions differ: {} vs {}",
                state_a.dim(),
                state_b.dim()
            )));
        }
        for s in [&state_a, &state_b] {
            if (s.norm() - 1.0).abs() > NORM_TOLERANCE {
                return Err(Error::contract(format!(
                    "state '{}' is not normalized",
                    s.label()
                )));
            }
        }
        Ok(Self {
            state_a,
            state_b,
            p_a,
        })
    }

    /// Explicit priors, which must sum to one.
    pub fn with_priors(state_a: FockVector, state_b: FockVector, p_a: f64, p_b: f64) -> Result<Self> {
        if (p_a + p_b - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("priors {p_a} + {p_b} do not sum to 1")));
        }
        Self::new(state_a, state_b, p_a)
    }

    pub fn state_a(&self) -> &FockVector {
        &self.state_a
    }

    pub fn state_b(&self) -> &FockVector {
        &self.state_b
    }

    pub fn p_a(&self) -> f64 {
        self.p_a
    }

    pub fn p_b(&self) -> f64 {
        1.0 - self.p_a
    }

    pub fn dim(&self) -> usize {
        self.state_a.dim()
    }

    /// Exchanges the roles of the two hypotheses.
    pub fn swapped(&self) -> Self {
        Self {
            state_a: self.state_b.clone(),
            state_b: self.state_a.clone(),
            p_a: self.p_b(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoOutcomePOVM {
    pub e_a: CMatrix,
    pub e_b: CMatrix,
    /// Set when every measurement is optimal (identical states, equal priors).
    pub degenerate: bool,
}

impl TwoOutcomePOVM {
    /// `(e_a, identity - e_a)`.
    pub fn from_e_a(e_a: CMatrix) -> Self {
        let d = e_a.nrows();
        let e_b = CMatrix::identity(d, d) - &e_a;
        Self {
            e_a,
            e_b,
            degenerate: false,
        }
    }
}

/// `(1/2)(1 - √(1-x))` written as `(1/2) x / (1 + √(1-x))`, with `x = 4 p_a p_b |⟨A|B⟩|²`.
fn helstrom_from_overlap_sq(p_a: f64, overlap_sq: f64) -> Result<f64> {
    let x = 4.0 * p_a * (1.0 - p_a) * overlap_sq;
    let radicand = 1.0 - x;
    if radicand < -1e-12 {
        return Err(Error::contract(format!("negative radicand {radicand}")));
    }
    Ok(0.5 * x / (1.0 + radicand.max(0.0).sqrt()))
}

/// Minimum error probability for two spin-coherent states.
pub fn error_probability_closed_form(spin: SpinMagnitude, alpha: C64, beta: C64, p_a: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_a) {
        return Err(Error::domain(format!("prior {p_a} outside [0, 1]")));
    }
    let overlap_sq = (2.0 * ln_coherent_overlap(spin, alpha, beta)).exp();
    helstrom_from_overlap_sq(p_a, overlap_sq)
}

/// Minimum error probability for an arbitrary pure-state pair.
pub fn helstrom_bound(problem: &DiscriminationProblem) -> Result<f64> {
    let ov = overlap(problem.state_a(), problem.state_b());
    helstrom_from_overlap_sq(problem.p_a(), ov.norm_sqr())
}

struct Span {
    e1: Vec<C64>,
    e2: Option<Vec<C64>>,
    g: C64,
    h: f64,
}

fn span(problem: &DiscriminationProblem) -> Span {
    let a = problem.state_a().amplitudes();
    let b = problem.state_b().amplitudes();
    let g = overlap(problem.state_a(), problem.state_b());
    let perp: Vec<C64> = b.iter().zip(a).map(|(bi, ai)| bi - g * ai).collect();
    let h = perp.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let e2 = (h > SPAN_TOLERANCE).then(|| perp.iter().map(|x| x / h).collect());
    Span {
        e1: a.to_vec(),
        e2,
        g,
        h,
    }
}

/// Eigenpairs of the 2×2 Hermitian `[[a, b], [b̄, d]]`, larger eigenvalue first.
fn eigen_2x2(a: f64, b: C64, d: f64) -> [(f64, [C64; 2]); 2] {
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    let vector = |lambda: f64| -> [C64; 2] {
        let u = [b, C64::new(lambda - a, 0.0)];
        let w = [C64::new(lambda - d, 0.0), b.conj()];
        let nu = (u[0].norm_sqr() + u[1].norm_sqr()).sqrt();
        let nw = (w[0].norm_sqr() + w[1].norm_sqr()).sqrt();
        if nu == 0.0 && nw == 0.0 {
            // Scalar matrix: any orthonormal pair diagonalizes it.
            if lambda == mean + radius {
                [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
            } else {
                [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]
            }
        } else if nu >= nw {
            [u[0] / nu, u[1] / nu]
        } else {
            [w[0] / nw, w[1] / nw]
        }
    };
    let hi = mean + radius;
    let lo = mean - radius;
    [(hi, vector(hi)), (lo, vector(lo))]
}

/// Eigenpairs of `p_a|A⟩⟨A| - p_b|B⟩⟨B|` in the `(e1, e2)` coordinates.
fn difference_eigen(problem: &DiscriminationProblem, sp: &Span) -> [(f64, [C64; 2]); 2] {
    let (p_a, p_b) = (problem.p_a(), problem.p_b());
    let g = sp.g;
    let h = sp.h;
    eigen_2x2(p_a - p_b * g.norm_sqr(), -(g * h) * p_b, -p_b * h * h)
}

fn embed(sp: &Span, coords: [C64; 2]) -> Vec<C64> {
    let e2 = sp.e2.as_ref().expect("two-dimensional span");
    sp.e1
        .iter()
        .zip(e2)
        .map(|(x, y)| coords[0] * x + coords[1] * y)
        .collect()
}

fn projector(v: &[C64]) -> CMatrix {
    let col = nalgebra::DVector::from_column_slice(v);
    &col * col.adjoint()
}

/// Projective measurement attaining the minimum error. `E_A` projects onto the
/// nonnegative eigenspace of `p_a|A⟩⟨A| - p_b|B⟩⟨B|` in `span{A, B}`; the
/// orthogonal complement goes to `E_B`.
pub fn optimal_povm(problem: &DiscriminationProblem) -> Result<TwoOutcomePOVM> {
    let d = problem.dim();
    let sp = span(problem);
    if sp.e2.is_none() {
        let diff = problem.p_a() - problem.p_b();
        if diff.abs() <= LABEL_TOLERANCE {
            return Ok(TwoOutcomePOVM {
                e_a: CMatrix::zeros(d, d),
                e_b: CMatrix::identity(d, d),
                degenerate: true,
            });
        }
        let e_a = if diff > 0.0 {
            projector(&sp.e1)
        } else {
            CMatrix::zeros(d, d)
        };
        return Ok(TwoOutcomePOVM::from_e_a(e_a));
    }
    let mut e_a = CMatrix::zeros(d, d);
    for (lambda, coords) in difference_eigen(problem, &sp) {
        if lambda >= -LABEL_TOLERANCE {
            e_a += projector(&embed(&sp, coords));
        }
    }
    Ok(TwoOutcomePOVM::from_e_a(e_a))
}

/// `p_a ⟨A|E_B|A⟩ + p_b ⟨B|E_A|B⟩`.
pub fn error_probability_from_povm(problem: &DiscriminationProblem, povm: &TwoOutcomePOVM) -> Result<f64> {
    let d = problem.dim();
    if povm.e_a.nrows() != d || povm.e_b.nrows() != d {
        return Err(Error::domain("POVM dimension does not match the states"));
    }
    let a = nalgebra::DVector::from_column_slice(problem.state_a().amplitudes());
    let b = nalgebra::DVector::from_column_slice(problem.state_b().amplitudes());
    let miss_a = (a.adjoint() * &povm.e_b * &a)[(0, 0)].re;
    let miss_b = (b.adjoint() * &povm.e_a * &b)[(0, 0)].re;
    Ok(problem.p_a() * miss_a + problem.p_b() * miss_b)
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;

fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-12 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Grid search over rank-1 projectors `|u⟩⟨u|` in `span{A, B}`,
/// `u = cos(θ/2) e1 + e^{iφ} sin(θ/2) e2`, then golden-section refinement in
/// the chart `u ∝ u₀ + x u₀^⊥` around the best grid point `u₀`, alternating
/// between `Re x` and `Im x`. `E_A = 0` and `E_A = 1` are also tried.
pub fn brute_force_min_error(problem: &DiscriminationProblem, angle_grid: usize) -> Result<f64> {
    if angle_grid < 64 {
        return Err(Error::domain("angle grid must have at least 64 points"));
    }
    let (p_a, p_b) = (problem.p_a(), problem.p_b());
    let a = problem.state_a().amplitudes();
    let b = problem.state_b().amplitudes();
    let mut best = p_a.min(p_b);
    let sp = span(problem);
    let Some(e2) = sp.e2.as_ref() else {
        return Ok(best);
    };
    let inner = |u: &[C64], v: &[C64]| -> C64 { u.iter().zip(v).map(|(x, y)| x.conj() * y).sum() };
    // Components of A and B along (e1, e2).
    let (a1, a2) = (inner(&sp.e1, a), inner(e2, a));
    let (b1, b2) = (inner(&sp.e1, b), inner(e2, b));
    let error = |u1: C64, u2: C64| -> f64 {
        let n = u1.norm_sqr() + u2.norm_sqr();
        let ua = (u1.conj() * a1 + u2.conj() * a2).norm_sqr() / n;
        let ub = (u1.conj() * b1 + u2.conj() * b2).norm_sqr() / n;
        p_a * (1.0 - ua) + p_b * ub
    };
    let step_theta = std::f64::consts::PI / angle_grid as f64;
    let step_phi = 2.0 * std::f64::consts::PI / angle_grid as f64;
    let mut u0 = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    let mut grid_best = f64::INFINITY;
    for i in 0..=angle_grid {
        for j in 0..angle_grid {
            let (t, p) = (i as f64 * step_theta, j as f64 * step_phi);
            let u = (
                C64::new((0.5 * t).cos(), 0.0),
                C64::from_polar((0.5 * t).sin(), p),
            );
            let e = error(u.0, u.1);
            if e < grid_best {
                (u0, grid_best) = (u, e);
            }
        }
    }
    best = best.min(grid_best);
    for _ in 0..2 {
        let perp = (-u0.1.conj(), u0.0.conj());
        let at = |x: C64| (u0.0 + x * perp.0, u0.1 + x * perp.1);
        let (mut re, mut im) = (0.0, 0.0);
        for _ in 0..8 {
            re = golden_section(
                |r| {
                    let u = at(C64::new(r, im));
                    error(u.0, u.1)
                },
                re - step_theta,
                re + step_theta,
            )
            .0;
            let (i, e) = golden_section(
                |i| {
                    let u = at(C64::new(re, i));
                    error(u.0, u.1)
                },
                im - step_theta,
                im + step_theta,
            );
            im = i;
            best = best.min(e);
        }
        let u = at(C64::new(re, im));
        let n = (u.0.norm_sqr() + u.1.norm_sqr()).sqrt();
        u0 = (u.0 / n, u.1 / n);
    }
    Ok(best)
}

/// Orthonormal eigenvectors `(e_a, e_b)` of `p_a|A⟩⟨A| - p_b|B⟩⟨B|` within
/// `span{A, B}`; `e_a` belongs to the larger eigenvalue.
pub fn post_measurement_states(problem: &DiscriminationProblem) -> Result<(FockVector, FockVector)> {
    let sp = span(problem);
    if sp.e2.is_none() {
        return Err(Error::Degenerate("the two states span one dimension".into()));
    }
    let [(_, va), (_, vb)] = difference_eigen(problem, &sp);
    let e_a = FockVector::new(embed(&sp, va), "e_A")?;
    let e_b = FockVector::new(embed(&sp, vb), "e_B")?;
    Ok((e_a, e_b))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HelstromRecord {
    pub two_s: u32,
    pub beta: C64,
    pub p_a: f64,
    pub p_error: f64,
}

impl HelstromRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.two_s,
            sig12(self.beta.re),
            sig12(self.beta.im),
            sig12(self.p_a),
            sig12(self.p_error)
        )
    }
}

/// Closed-form error probabilities for `|α⟩` against each `|β⟩`, rows ordered
/// `two_s`-major, then `β`.
pub fn sweep(alpha: C64, betas: &[C64], p_a: f64, two_s: &[u32]) -> Result<Vec<HelstromRecord>> {
    if betas.is_empty() || two_s.is_empty() {
        return Err(Error::domain("sweep grids must be nonempty"));
    }
    let nb = betas.len();
    (0..two_s.len() * nb)
        .into_par_iter()
        .map(|k| {
            let (t, beta) = (two_s[k / nb], betas[k % nb]);
            Ok(HelstromRecord {
                two_s: t,
                beta,
                p_a,
                p_error: error_probability_closed_form(SpinMagnitude::new(t)?, alpha, beta, p_a)?,
            })
        })
        .collect()
}

pub fn write_sweep_csv(records: &[HelstromRecord], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}
