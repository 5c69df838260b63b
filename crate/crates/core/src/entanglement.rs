//! Entropies of the beam-splitter output and the parameter studies built on them.
//!
//! Entropies are in nats.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::beamsplitter::{split_state, BeamSplitterParams, BipartiteAmplitudeMatrix};
use crate::format::sig12;
use crate::numkit::{
    central_difference, check_hermitian, hermitian_spectrum, ln_factorial, log_sum_exp, second_difference,
    singular_values,
};
use crate::states::{spin_coherent, SpinMagnitude};
use crate::{CMatrix, Error, Result, C64};

/// Allowed deviation of `Tr ρ` from 1.
pub const TRACE_TOLERANCE: f64 = 1e-8;

/// Eigenvalues below this are treated as zero.
pub const EIGENVALUE_FLOOR: f64 = 1e-14;

/// Two grid values closer than this count as a tie in [`argmax_r2`].
pub const TIE_TOLERANCE: f64 = 1e-12;

pub const CSV_HEADER: &str = "two_s,z_mod,r2,von_neumann,linear";

fn check_density_matrix(rho: &CMatrix) -> Result<()> {
    check_hermitian(rho)?;
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > TRACE_TOLERANCE || tr.im.abs() > TRACE_TOLERANCE {
        return Err(Error::contract(format!("trace {tr} is not 1")));
    }
    Ok(())
}

/// `-Σ r ln r` over a probability spectrum, with `0 ln 0 = 0`.
pub fn entropy_from_spectrum(spectrum: &[f64]) -> f64 {
    spectrum
        .iter()
        .filter(|&&r| r >= EIGENVALUE_FLOOR)
        .map(|&r| -r * r.ln())
        .sum()
}

/// `1 - Σ r²`.
pub fn linear_entropy_from_spectrum(spectrum: &[f64]) -> f64 {
    1.0 - spectrum.iter().map(|r| r * r).sum::<f64>()
}

pub fn von_neumann_entropy(rho: &CMatrix) -> Result<f64> {
    check_density_matrix(rho)?;
    Ok(entropy_from_spectrum(&hermitian_spectrum(rho)?))
}

/// `1 - Tr ρ²`, using `Tr ρ² = Σ|ρ_ij|²` for Hermitian `ρ`.
pub fn linear_entropy(rho: &CMatrix) -> Result<f64> {
    check_density_matrix(rho)?;
    Ok(1.0 - rho.norm_squared())
}

/// Linear entropy of `|z, 0⟩` after the splitter as an explicit sum over
/// `p, p', m, m'`:
///
/// `Tr ρ² = ((2S)!)² / (1+|z|²)^{4S} Σ |R|^{2(p+p')} |T|^{2(m+m')} |z|^{2(m+m'+p+p')}
///          / [m! m'! p! p'! ((2S-m-p)! (2S-m-p')! (2S-m'-p)! (2S-m'-p')!)^{1/2}]`.
///
/// The cost is `O(S⁴)`.
pub fn linear_entropy_closed_form(spin: SpinMagnitude, z_mod: f64, r_mod: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&r_mod) {
        return Err(Error::domain(format!("|R| = {r_mod} outside [0, 1]")));
    }
    if !(z_mod >= 0.0 && z_mod.is_finite()) {
        return Err(Error::domain("|z| must be finite and nonnegative"));
    }
    let two_s = spin.two_s() as usize;
    let lf = |k: usize| ln_factorial(k as u64);
    let ln_pow = |x: f64, k: usize| if k == 0 { 0.0 } else { k as f64 * x.ln() };
    let t_mod = (1.0 - r_mod * r_mod).sqrt();
    let prefactor = 2.0 * lf(two_s) - 2.0 * two_s as f64 * z_mod.powi(2).ln_1p();
    let mut terms = Vec::new();
    for p in 0..=two_s {
        for pp in 0..=two_s {
            let outer =
                prefactor - lf(p) - lf(pp) + ln_pow(r_mod, 2 * (p + pp)) + ln_pow(z_mod, 2 * (p + pp));
            for m in 0..=two_s - p.max(pp) {
                for mm in 0..=two_s - p.max(pp) {
                    let ln_term =
                        outer - lf(m) - lf(mm) + ln_pow(t_mod, 2 * (m + mm)) + ln_pow(z_mod, 2 * (m + mm))
                            - 0.5
                                * (lf(two_s - m - p)
                                    + lf(two_s - m - pp)
                                    + lf(two_s - mm - p)
                                    + lf(two_s - mm - pp));
                    terms.push(ln_term);
                }
            }
        }
    }
    let purity = log_sum_exp(terms.iter().copied()).exp();
    Ok(1.0 - purity)
}

/// Squared Schmidt coefficients of the output, descending.
pub fn schmidt_spectrum(out: &BipartiteAmplitudeMatrix) -> Result<Vec<f64>> {
    Ok(singular_values(out.matrix())?
        .into_iter()
        .map(|s| s * s)
        .collect())
}

fn coherent_output(spin: SpinMagnitude, z: C64, r2: f64) -> Result<BipartiteAmplitudeMatrix> {
    let params = BeamSplitterParams::from_reflectivity(r2)?;
    split_state(&spin_coherent(spin, z)?, &params)
}

/// Von Neumann and linear entropy of `|z, 0⟩` after a splitter of reflectivity `r2`.
pub fn output_entropies(spin: SpinMagnitude, z: C64, r2: f64) -> Result<(f64, f64)> {
    let spectrum = schmidt_spectrum(&coherent_output(spin, z, r2)?)?;
    Ok((
        entropy_from_spectrum(&spectrum),
        linear_entropy_from_spectrum(&spectrum),
    ))
}

/// Von Neumann entropy of `|z, 0⟩` after a splitter of reflectivity `r2`.
pub fn entanglement_of_output(spin: SpinMagnitude, z: C64, r2: f64) -> Result<f64> {
    Ok(output_entropies(spin, z, r2)?.0)
}

/// Points `k·step` for `k = 0..=1/step`.
pub fn r2_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::domain(format!("grid step {step} outside (0, 1]")));
    }
    let n = (1.0 / step).round();
    if (n * step - 1.0).abs() > 1e-9 {
        return Err(Error::domain(format!("grid step {step} does not divide 1")));
    }
    let n = n as usize;
    Ok((0..=n).map(|k| k as f64 / n as f64).collect())
}

/// Index of the largest value; ties within [`TIE_TOLERANCE`] go to the grid
/// point closest to `0.5`.
fn argmax_toward_half(grid: &[f64], values: &[f64]) -> usize {
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (0..grid.len())
        .filter(|&k| values[k] >= best - TIE_TOLERANCE)
        .min_by(|&a, &b| (grid[a] - 0.5).abs().total_cmp(&(grid[b] - 0.5).abs()))
        .expect("grid is nonempty")
}

/// The reflectivity on the grid `k·step` that maximizes [`entanglement_of_output`].
pub fn argmax_r2(spin: SpinMagnitude, z: C64, grid_step: f64) -> Result<f64> {
    let grid = r2_grid(grid_step)?;
    let values = grid
        .iter()
        .map(|&r2| entanglement_of_output(spin, z, r2))
        .collect::<Result<Vec<_>>>()?;
    Ok(grid[argmax_toward_half(&grid, &values)])
}

/// Same as [`argmax_r2`] for the linear entropy.
pub fn argmax_r2_linear(spin: SpinMagnitude, z: C64, grid_step: f64) -> Result<f64> {
    let grid = r2_grid(grid_step)?;
    let values = grid
        .iter()
        .map(|&r2| Ok(output_entropies(spin, z, r2)?.1))
        .collect::<Result<Vec<_>>>()?;
    Ok(grid[argmax_toward_half(&grid, &values)])
}

/// Derivatives of the linear entropy with respect to `|R|` at `|R| = 1/√2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stationarity {
    /// Central difference with `h = 1e-5`.
    pub derivative: f64,
    /// Second difference with `h = 1e-3`.
    pub second_difference: f64,
}

pub fn stationarity_check(spin: SpinMagnitude, z_mod: f64) -> Result<Stationarity> {
    let input = spin_coherent(spin, C64::new(z_mod, 0.0))?;
    let s_lin = |r_mod: f64| -> f64 {
        let params = BeamSplitterParams::new((1.0 - r_mod * r_mod).sqrt(), r_mod, 0.0, 0.0)
            .expect("|R| near 1/sqrt(2) is valid");
        let out = split_state(&input, &params).expect("input is normalized");
        linear_entropy_from_spectrum(&schmidt_spectrum(&out).expect("finite output"))
    };
    let r0 = std::f64::consts::FRAC_1_SQRT_2;
    Ok(Stationarity {
        derivative: central_difference(s_lin, r0, 1e-5),
        second_difference: second_difference(s_lin, r0, 1e-3),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRecord {
    pub two_s: u32,
    pub z_mod: f64,
    pub r2: f64,
    pub von_neumann: f64,
    pub linear: f64,
}

impl SweepRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.two_s,
            sig12(self.z_mod),
            sig12(self.r2),
            sig12(self.von_neumann),
            sig12(self.linear)
        )
    }
}

/// Grid for [`sweep`]; rows come out `two_s`-major, then `z_mod`, then `r2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub two_s: Vec<u32>,
    pub z_mod: Vec<f64>,
    pub r2: Vec<f64>,
}

/// Evaluates every grid point in parallel; output order follows the grid.
pub fn sweep(grid: &SweepGrid) -> Result<Vec<SweepRecord>> {
    if grid.two_s.is_empty() || grid.z_mod.is_empty() || grid.r2.is_empty() {
        return Err(Error::domain("sweep ranges must be nonempty"));
    }
    let (nz, nr) = (grid.z_mod.len(), grid.r2.len());
    let total = grid.two_s.len() * nz * nr;
    (0..total)
        .into_par_iter()
        .map(|k| {
            let two_s = grid.two_s[k / (nz * nr)];
            let z_mod = grid.z_mod[(k / nr) % nz];
            let r2 = grid.r2[k % nr];
            let (von_neumann, linear) =
                output_entropies(SpinMagnitude::new(two_s)?, C64::new(z_mod, 0.0), r2)?;
            Ok(SweepRecord {
                two_s,
                z_mod,
                r2,
                von_neumann,
                linear,
            })
        })
        .collect()
}

pub fn write_sweep_csv(records: &[SweepRecord], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}

/// Entanglement at `r2 = 1/2` along `two_s = 1..=two_s_max` and its maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakAnalysis {
    pub curve: Vec<(u32, f64)>,
    pub peak_two_s: u32,
    pub peak_value: f64,
}

impl PeakAnalysis {
    pub fn s_peak(&self) -> f64 {
        self.peak_two_s as f64 / 2.0
    }

    /// True when the maximum is at neither end of the grid.
    pub fn is_interior(&self) -> bool {
        let first = self.curve.first().map(|c| c.0);
        let last = self.curve.last().map(|c| c.0);
        Some(self.peak_two_s) != first && Some(self.peak_two_s) != last
    }
}

pub fn peak_analysis(z: C64, two_s_max: u32) -> Result<PeakAnalysis> {
    if two_s_max < 1 {
        return Err(Error::domain("two_s_max must be at least 1"));
    }
    let curve = (1..=two_s_max)
        .into_par_iter()
        .map(|two_s| Ok((two_s, entanglement_of_output(SpinMagnitude::new(two_s)?, z, 0.5)?)))
        .collect::<Result<Vec<_>>>()?;
    let &(peak_two_s, peak_value) = curve
        .iter()
        .fold(None, |best: Option<&(u32, f64)>, c| match best {
            Some(b) if b.1 >= c.1 => Some(b),
            _ => Some(c),
        })
        .expect("curve is nonempty");
    Ok(PeakAnalysis {
        curve,
        peak_two_s,
        peak_value,
    })
}

/// `|⟨α|z′⟩|` between a Glauber state and the spin-coherent state with
/// `z̄′ = α/√(2S)`, from the phase-free series
///
/// `e^{-|α|²/2} (1+|α|²/2S)^{-S} Σ_n [(2S)!/((2S-n)! (2S)ⁿ)]^{1/2} |α|^{2n}/n!`.
pub fn limit_overlap(alpha: C64, spin: SpinMagnitude) -> f64 {
    let a2 = alpha.norm_sqr();
    if a2 == 0.0 {
        return 1.0;
    }
    let two_s = spin.two_s() as usize;
    let two_s_f = two_s as f64;
    let ln_prefactor = -0.5 * a2 - spin.spin() * (a2 / two_s_f).ln_1p();
    let mut ln_terms = Vec::new();
    let mut ln_ratio = 0.0;
    let mut best = f64::NEG_INFINITY;
    for n in 0..=two_s {
        if n > 0 {
            ln_ratio += (-((n - 1) as f64) / two_s_f).ln_1p();
        }
        let ln_term = 0.5 * ln_ratio + n as f64 * a2.ln() - ln_factorial(n as u64);
        best = best.max(ln_term);
        ln_terms.push(ln_term);
        if n as f64 > a2 && ln_term < best - 60.0 {
            break;
        }
    }
    (ln_prefactor + log_sum_exp(ln_terms.iter().copied())).exp()
}
