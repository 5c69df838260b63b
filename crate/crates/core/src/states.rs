//! State families in the Fock basis: spin-coherent states, truncated Glauber
//! states and the asymptotic family that tends to the Glauber states, plus
//! overlaps and the spin-operator algebra.
//!
//! Amplitudes are assembled as `exp(log-modulus) · phase` so that the
//! `C(2S, n)^{1/2}` and `1/√n!` factors never overflow.

use serde::{Deserialize, Serialize};

use crate::numkit::{exp_i_hermitian, ln_factorial, log_binomial};
use crate::{CMatrix, Error, Result, C64};

/// Unit-norm tolerance for [`FockVector`] constructors and checks.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Spin magnitude carried as `two_s = 2S`, so half-integer spins are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpinMagnitude {
    two_s: u32,
}

impl SpinMagnitude {
    pub fn new(two_s: u32) -> Result<Self> {
        if two_s == 0 {
            return Err(Error::domain("two_s must be at least 1"));
        }
        Ok(Self { two_s })
    }

    /// From a spin value such as `0.5` or `3.0`.
    pub fn from_spin(s: f64) -> Result<Self> {
        let two_s = 2.0 * s;
        if !(two_s.is_finite() && two_s >= 1.0 && (two_s - two_s.round()).abs() < 1e-12) {
            return Err(Error::domain(format!("{s} is not a positive half-integer spin")));
        }
        Self::new(two_s.round() as u32)
    }

    pub fn two_s(self) -> u32 {
        self.two_s
    }

    pub fn spin(self) -> f64 {
        self.two_s as f64 / 2.0
    }

    /// Hilbert-space dimension `2S + 1`.
    pub fn dim(self) -> usize {
        self.two_s as usize + 1
    }
}

/// Complex amplitudes over number states `|0⟩ .. |d-1⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: Vec<C64>,
    label: String,
    normalized: bool,
}

#[derive(Serialize, Deserialize)]
struct FockVectorJson {
    dim: usize,
    amps: Vec<[f64; 2]>,
    label: String,
}

impl FockVector {
    /// Normalizing constructor.
    pub fn new(amps: Vec<C64>, label: impl Into<String>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::domain("state needs at least one amplitude"));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::domain("state has non-finite amplitudes"));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::domain("zero vector cannot be normalized"));
        }
        Ok(Self {
            amps: amps.into_iter().map(|a| a / norm).collect(),
            label: label.into(),
            normalized: true,
        })
    }

    /// Keeps the amplitudes as given and marks the vector unnormalized.
    pub fn unnormalized(amps: Vec<C64>, label: impl Into<String>) -> Self {
        Self {
            amps,
            label: label.into(),
            normalized: false,
        }
    }

    /// Number state `|n⟩` in dimension `dim`.
    pub fn basis(dim: usize, n: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::domain(format!("basis index {n} outside dimension {dim}")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[n] = C64::new(1.0, 0.0);
        Self::new(amps, format!("|{n}>"))
    }

    /// Builds from per-component `(ln|a_n|, arg a_n)`, rescaling before
    /// exponentiation so nothing overflows. `-inf` log-moduli give exact zeros.
    pub(crate) fn from_log_polar(parts: &[(f64, f64)], label: impl Into<String>) -> Result<Self> {
        let max = parts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(Error::domain("all amplitudes vanish"));
        }
        let amps = parts
            .iter()
            .map(|&(ln_mod, phase)| {
                if ln_mod == f64::NEG_INFINITY {
                    C64::new(0.0, 0.0)
                } else {
                    C64::from_polar((ln_mod - max).exp(), phase)
                }
            })
            .collect();
        Self::new(amps, label)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// The spin whose `2S + 1` matches this dimension, if any.
    pub fn spin(&self) -> Result<SpinMagnitude> {
        SpinMagnitude::new(self.dim() as u32 - 1)
    }

    pub fn to_json(&self) -> String {
        let json = FockVectorJson {
            dim: self.dim(),
            amps: self.amps.iter().map(|a| [a.re, a.im]).collect(),
            label: self.label.clone(),
        };
        serde_json::to_string(&json).expect("state serializes")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::from_str(&self.to_json()).expect("state json parses")
    }

    /// Parses `{ "dim": d, "amps": [[re, im], …], "label": text }` and
    /// normalizes.
    pub fn from_json(text: &str) -> Result<Self> {
        let json: FockVectorJson =
            serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
        if json.amps.len() != json.dim {
            return Err(Error::Serialization(format!(
                "dim {} does not match {} amplitudes",
                json.dim,
                json.amps.len()
            )));
        }
        Self::new(
            json.amps.iter().map(|&[re, im]| C64::new(re, im)).collect(),
            json.label,
        )
    }
}

/// Fock amplitudes of `|z⟩` are powers of `z̄`: `⟨n|z⟩ ∝ C(2S,n)^{1/2} z̄ⁿ`.
/// Correspondingly `⟨z̃|n⟩ ∝ C(2S,n)^{1/2} zⁿ` in the Majorana amplitude
/// function, and a coherent state's constellation sits at `-1/z̄`.
pub fn amplitude_parameter(z: C64) -> C64 {
    z.conj()
}

/// Spin-coherent state `|z⟩ = (1+|z|²)^{-S} Σ C(2S,n)^{1/2} z̄ⁿ |n⟩`.
pub fn spin_coherent(spin: SpinMagnitude, z: C64) -> Result<FockVector> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::domain("coherent-state parameter must be finite"));
    }
    let two_s = spin.two_s() as u64;
    let w = amplitude_parameter(z);
    let ln_w = w.norm().ln();
    let arg_w = w.arg();
    let ln_norm = spin.spin() * w.norm_sqr().ln_1p();
    let parts: Vec<(f64, f64)> = (0..=two_s)
        .map(|n| {
            let ln_mod = if n == 0 {
                -ln_norm
            } else if w.norm() == 0.0 {
                f64::NEG_INFINITY
            } else {
                0.5 * log_binomial(two_s, n).expect("n <= 2S") + n as f64 * ln_w - ln_norm
            };
            (ln_mod, n as f64 * arg_w)
        })
        .collect();
    FockVector::from_log_polar(&parts, format!("coherent(two_s={two_s}, z={z})"))
}

/// `⌈|α|² + 10|α| + 20⌉`: the Poisson tail past ten standard deviations is
/// below double precision.
pub fn default_glauber_cutoff(alpha: C64) -> usize {
    let a = alpha.norm();
    (a * a + 10.0 * a + 20.0).ceil() as usize
}

/// A Glauber state truncated to `|0⟩..|cutoff⟩`.
#[derive(Debug, Clone)]
pub struct TruncatedGlauber {
    pub state: FockVector,
    /// Weight `1 - Σ_{n≤cutoff} |a_n|²` under the untruncated normalization.
    pub tail_weight: f64,
    /// Set when the truncation discards more than half the weight.
    pub tail_warning: bool,
}

/// Poisson weights `e^{-μ} μⁿ / n!` beyond `cutoff`, summed directly when the
/// tail is small and as the complement of the head otherwise.
fn poisson_tail(mean: f64, cutoff: usize) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let ln_term = |n: usize| -mean + n as f64 * mean.ln() - ln_factorial(n as u64);
    if (cutoff + 1) as f64 > mean {
        let mut sum = 0.0;
        let mut n = cutoff + 1;
        loop {
            let t = ln_term(n).exp();
            sum += t;
            if t <= 1e-18 * sum || (t == 0.0 && n as f64 > mean) {
                break;
            }
            n += 1;
        }
        sum
    } else {
        let head: f64 = (0..=cutoff).map(|n| ln_term(n).exp()).sum();
        (1.0 - head).max(0.0)
    }
}

/// Truncated Glauber state with amplitudes `∝ αⁿ/√n!`, `n ≤ cutoff`, renormalized.
pub fn glauber_truncated(alpha: C64, cutoff: usize) -> Result<TruncatedGlauber> {
    if cutoff < 1 {
        return Err(Error::domain("Glauber cutoff must be at least 1"));
    }
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(Error::domain("Glauber amplitude must be finite"));
    }
    let ln_a = alpha.norm().ln();
    let parts: Vec<(f64, f64)> = (0..=cutoff)
        .map(|n| {
            let ln_mod = if n == 0 {
                0.0
            } else if alpha.norm() == 0.0 {
                f64::NEG_INFINITY
            } else {
                n as f64 * ln_a - 0.5 * ln_factorial(n as u64)
            };
            (ln_mod, n as f64 * alpha.arg())
        })
        .collect();
    let state = FockVector::from_log_polar(&parts, format!("glauber(alpha={alpha}, cutoff={cutoff})"))?;
    let tail_weight = poisson_tail(alpha.norm_sqr(), cutoff);
    Ok(TruncatedGlauber {
        state,
        tail_weight,
        tail_warning: tail_weight > 0.5,
    })
}

/// States `∝ Σ_{n<d} f(n,d) Aⁿ/√n! |n⟩`; for weights with `f(n,d) → 1` these
/// tend to the Glauber state `|A⟩` as `d` grows.
pub fn asymptotic_family(f: impl Fn(usize, usize) -> f64, a: C64, d: usize) -> Result<FockVector> {
    if d == 0 {
        return Err(Error::domain("dimension must be positive"));
    }
    let ln_a = a.norm().ln();
    let mut parts = Vec::with_capacity(d);
    for n in 0..d {
        let weight = f(n, d);
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(Error::domain(format!(
                "weight f({n}, {d}) = {weight} is not strictly positive"
            )));
        }
        let ln_mod = if n == 0 {
            weight.ln()
        } else if a.norm() == 0.0 {
            f64::NEG_INFINITY
        } else {
            weight.ln() + n as f64 * ln_a - 0.5 * ln_factorial(n as u64)
        };
        parts.push((ln_mod, n as f64 * a.arg()));
    }
    FockVector::from_log_polar(&parts, format!("asymptotic(A={a}, d={d})"))
}

/// `⟨a|b⟩ = Σ conj(a_n) b_n`, zero-padding the shorter vector.
pub fn overlap(a: &FockVector, b: &FockVector) -> C64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| x.conj() * y)
        .sum()
}

/// `ln |⟨α|β⟩|` for spin-coherent states.
///
/// Uses `|1+αβ̄|² = (1+|α|²)(1+|β|²) - |α-β|²`, so the log is a `ln_1p` of a
/// small quantity when `α ≈ β`.
pub fn ln_coherent_overlap(spin: SpinMagnitude, alpha: C64, beta: C64) -> f64 {
    let x = (alpha - beta).norm_sqr() / ((1.0 + alpha.norm_sqr()) * (1.0 + beta.norm_sqr()));
    spin.spin() * (-x).ln_1p()
}

/// `|(1+αβ̄)^{2S}| / [(1+|α|²)^S (1+|β|²)^S]`.
pub fn coherent_overlap_closed_form(spin: SpinMagnitude, alpha: C64, beta: C64) -> f64 {
    ln_coherent_overlap(spin, alpha, beta).exp()
}

/// Spin operators of the `(2S+1)`-dimensional irreducible representation.
/// Basis `|n⟩` has `S_z = n - S`; `S₊|n⟩ = √((n+1)(2S-n)) |n+1⟩`.
#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub sx: CMatrix,
    pub sy: CMatrix,
    pub sz: CMatrix,
    pub raising: CMatrix,
}

impl SpinOperators {
    /// `n · S` for a (not necessarily unit) axis.
    pub fn along(&self, axis: [f64; 3]) -> CMatrix {
        &self.sx * C64::new(axis[0], 0.0)
            + &self.sy * C64::new(axis[1], 0.0)
            + &self.sz * C64::new(axis[2], 0.0)
    }
}

pub fn spin_operators(spin: SpinMagnitude) -> SpinOperators {
    let d = spin.dim();
    let two_s = spin.two_s() as f64;
    let s = spin.spin();
    let mut raising = CMatrix::zeros(d, d);
    for n in 0..d - 1 {
        raising[(n + 1, n)] = C64::new(((n as f64 + 1.0) * (two_s - n as f64)).sqrt(), 0.0);
    }
    let lowering = raising.adjoint();
    let sx = (&raising + &lowering) * C64::new(0.5, 0.0);
    let sy = (&raising - &lowering) * C64::new(0.0, -0.5);
    let sz = CMatrix::from_fn(d, d, |i, j| {
        if i == j {
            C64::new(i as f64 - s, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    SpinOperators { sx, sy, sz, raising }
}

/// `exp(-i θ n·S)`: rotates spin expectation vectors right-handedly by `θ`
/// about the unit axis `n`.
pub fn spin_rotation(spin: SpinMagnitude, axis: [f64; 3], angle: f64) -> Result<CMatrix> {
    let len = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
    if !(len > 0.0 && len.is_finite()) {
        return Err(Error::domain("rotation axis must be a nonzero finite vector"));
    }
    let unit = axis.map(|a| a / len);
    exp_i_hermitian(&spin_operators(spin).along(unit), angle)
}

/// Unit vector `⟨S⟩/S` of the coherent state `|z⟩`:
/// `(2 Re z, 2 Im z, |z|² - 1) / (1 + |z|²)`. `|0⟩` points to `-ẑ`.
pub fn spin_direction(z: C64) -> [f64; 3] {
    let r2 = z.norm_sqr();
    if r2.is_infinite() {
        return [0.0, 0.0, 1.0];
    }
    [
        2.0 * z.re / (1.0 + r2),
        2.0 * z.im / (1.0 + r2),
        (r2 - 1.0) / (1.0 + r2),
    ]
}

/// Rotation taking `|0⟩` to `|z⟩` up to a global phase.
pub fn frame_unitary(spin: SpinMagnitude, z: C64) -> Result<CMatrix> {
    let r = z.norm();
    if r == 0.0 {
        return Ok(CMatrix::identity(spin.dim(), spin.dim()));
    }
    let axis = [z.im / r, -z.re / r, 0.0];
    spin_rotation(spin, axis, 2.0 * r.atan())
}

/// Both sides of `⟨S_x'²⟩⟨S_y'²⟩ ≥ ¼⟨S_z'⟩²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyProduct {
    pub lhs: f64,
    pub rhs: f64,
}

fn expectation(state: &FockVector, op: &CMatrix) -> f64 {
    let v = nalgebra::DVector::from_column_slice(state.amplitudes());
    (v.adjoint() * op * &v)[(0, 0)].re
}

/// Uncertainty product of `state` in the operator frame `S' = U S U†`, where
/// `U` maps `|0⟩` to `|frame_z⟩`.
pub fn uncertainty_product_in_frame(state: &FockVector, frame_z: C64) -> Result<UncertaintyProduct> {
    let spin = state.spin()?;
    let ops = spin_operators(spin);
    let u = frame_unitary(spin, frame_z)?;
    let ud = u.adjoint();
    let rotate = |m: &CMatrix| &u * m * &ud;
    let (sx, sy, sz) = (rotate(&ops.sx), rotate(&ops.sy), rotate(&ops.sz));
    let lhs = expectation(state, &(&sx * &sx)) * expectation(state, &(&sy * &sy));
    let mz = expectation(state, &sz);
    Ok(UncertaintyProduct {
        lhs,
        rhs: 0.25 * mz * mz,
    })
}

/// Uncertainty product of `|z⟩` in its own frame; equality for coherent states.
pub fn uncertainty_product(spin: SpinMagnitude, z: C64) -> Result<UncertaintyProduct> {
    uncertainty_product_in_frame(&spin_coherent(spin, z)?, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn spin(two_s: u32) -> SpinMagnitude {
        SpinMagnitude::new(two_s).unwrap()
    }

    fn assert_close(a: &FockVector, b: &[C64], tol: f64) {
        assert_eq!(a.dim(), b.len());
        for (x, y) in a.amplitudes().iter().zip(b) {
            assert!((x - y).norm() < tol, "{x} vs {y}");
        }
    }

    #[test]
    fn spin_magnitude_rules() {
        assert!(SpinMagnitude::new(0).is_err());
        assert_eq!(SpinMagnitude::from_spin(0.5).unwrap().two_s(), 1);
        assert_eq!(SpinMagnitude::from_spin(3.0).unwrap().dim(), 7);
        assert!(SpinMagnitude::from_spin(0.3).is_err());
    }

    #[test]
    fn coherent_small_cases() {
        let ground = spin_coherent(spin(1), c(0.0, 0.0)).unwrap();
        assert_close(&ground, &[c(1.0, 0.0), c(0.0, 0.0)], 1e-15);
        let s1 = spin_coherent(spin(2), c(1.0, 0.0)).unwrap();
        assert_close(&s1, &[c(0.5, 0.0), c(0.5f64.sqrt(), 0.0), c(0.5, 0.0)], 1e-15);
    }

    #[test]
    fn coherent_conjugates_parameter() {
        let v = spin_coherent(spin(1), c(0.0, 1.0)).unwrap();
        // (1, z̄)/√2 with z̄ = -i.
        assert_close(&v, &[c(0.5f64.sqrt(), 0.0), c(0.0, -(0.5f64.sqrt()))], 1e-15);
    }

    /// Term-by-term oracle: ln a_n = ½ Σ_{j<n} ln((2S-j)/(j+1)) + n ln|z| - S ln(1+|z|²).
    #[test]
    fn coherent_matches_log_space_oracle() {
        let z = c(3.0, 0.0);
        let v = spin_coherent(spin(100), z).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-10);
        let mut ln_binom = 0.0;
        for n in 0..=100usize {
            if n > 0 {
                ln_binom += ((100 - (n - 1)) as f64 / n as f64).ln();
            }
            let want = (0.5 * ln_binom + n as f64 * 3f64.ln() - 50.0 * 10f64.ln()).exp();
            let got = v.amplitudes()[n].re;
            assert_relative_eq!(got, want, max_relative = 1e-9);
        }
    }

    /// Oracle: exp(z̄ S₊)|0⟩ by its finite power series, then normalized.
    #[test]
    fn coherent_matches_raising_exponential() {
        for (two_s, z) in [(3, c(0.4, -0.9)), (8, c(-1.3, 0.2)), (12, c(0.1, 0.05))] {
            let sp = spin(two_s);
            let ops = spin_operators(sp);
            let d = sp.dim();
            let generator = &ops.raising * z.conj();
            let mut term = nalgebra::DVector::from_element(d, c(0.0, 0.0));
            term[0] = c(1.0, 0.0);
            let mut total = term.clone();
            for k in 1..d {
                term = &generator * &term * c(1.0 / k as f64, 0.0);
                total += &term;
            }
            let want = total.normalize();
            let got = spin_coherent(sp, z).unwrap();
            assert_close(&got, want.as_slice(), 1e-9);
        }
    }

    #[test]
    fn glauber_examples() {
        let g0 = glauber_truncated(c(0.0, 0.0), 7).unwrap();
        assert_eq!(g0.state.dim(), 8);
        assert_eq!(g0.state.amplitudes()[0], c(1.0, 0.0));
        assert!(g0.state.amplitudes()[1..].iter().all(|a| a.norm() == 0.0));
        assert_eq!(g0.tail_weight, 0.0);

        // Poisson-tail bound: tail ≤ t_41 / (1 - μ/42) with t_41 = e^{-1}/41!.
        let g1 = glauber_truncated(c(1.0, 0.0), 40).unwrap();
        let bound = (-1.0 - ln_factorial(41)).exp() / (1.0 - 1.0 / 42.0);
        assert!(g1.tail_weight <= bound * (1.0 + 1e-12));
        assert!(g1.tail_weight < 1e-30);
        assert!(g1.tail_weight > 0.0);

        let a = glauber_truncated(c(2.0, 0.0), 60).unwrap();
        let b = glauber_truncated(c(2.0, 0.0), 80).unwrap();
        assert!(overlap(&a.state, &b.state).norm() > 1.0 - 1e-12);
    }

    #[test]
    fn glauber_tail_warning_and_errors() {
        let g = glauber_truncated(c(3.0, 0.0), 4).unwrap();
        assert!(g.tail_warning);
        assert!(g.tail_weight > 0.5 && g.tail_weight < 1.0);
        assert!(glauber_truncated(c(1.0, 0.0), 0).is_err());
        assert_eq!(default_glauber_cutoff(c(3.0, 4.0)), 95);
    }

    #[test]
    fn asymptotic_family_reduces_to_known_states() {
        let alpha = c(0.7, -0.4);
        let flat = asymptotic_family(|_, _| 1.0, alpha, 31).unwrap();
        let glauber = glauber_truncated(alpha, 30).unwrap().state;
        assert_close(&flat, glauber.amplitudes(), 1e-12);

        let sp = spin(14);
        let z = c(0.3, 0.8);
        let two_s = sp.two_s() as u64;
        let f = move |n: usize, _d: usize| {
            let ln = ln_factorial(two_s) - ln_factorial(two_s - n as u64) - n as f64 * (two_s as f64).ln();
            (0.5 * ln).exp()
        };
        let a = z.conj() * (two_s as f64).sqrt();
        let fam = asymptotic_family(f, a, sp.dim()).unwrap();
        let coh = spin_coherent(sp, z).unwrap();
        assert_close(&fam, coh.amplitudes(), 1e-10);

        assert!(asymptotic_family(|n, _| if n == 3 { 0.0 } else { 1.0 }, alpha, 5).is_err());
    }

    #[test]
    fn asymptotic_family_converges_to_glauber() {
        let a = c(1.5, 0.0);
        let weight = |n: usize, d: usize| 1.0 + 1.0 / (n + d) as f64;
        let mut last = 0.0;
        for d in [16usize, 64, 256] {
            let v = asymptotic_family(weight, a, d).unwrap();
            let g = glauber_truncated(a, d - 1).unwrap().state;
            let ov = overlap(&g, &v).norm();
            assert!(ov > last, "d={d}: {ov} <= {last}");
            last = ov;
        }
        assert!(last > 0.99);
    }

    #[test]
    fn overlap_basics() {
        let v = spin_coherent(spin(5), c(0.2, 0.9)).unwrap();
        assert_relative_eq!(overlap(&v, &v).re, 1.0, max_relative = 1e-14);
        let e0 = FockVector::basis(2, 0).unwrap();
        let e1 = FockVector::basis(2, 1).unwrap();
        assert_eq!(overlap(&e0, &e1), c(0.0, 0.0));
        // zero padding
        let long = FockVector::basis(5, 0).unwrap();
        assert_eq!(overlap(&e0, &long), c(1.0, 0.0));
    }

    #[test]
    fn closed_form_overlap_examples() {
        let sp = spin(20);
        let a = spin_coherent(sp, c(0.3, 0.0)).unwrap();
        let b = spin_coherent(sp, c(0.7, 0.0)).unwrap();
        assert_relative_eq!(
            overlap(&a, &b).norm(),
            coherent_overlap_closed_form(sp, c(0.3, 0.0), c(0.7, 0.0)),
            max_relative = 1e-12
        );
        assert_eq!(
            coherent_overlap_closed_form(spin(7), c(1.0, 2.0), c(1.0, 2.0)),
            1.0
        );
        assert_relative_eq!(
            coherent_overlap_closed_form(spin(1), c(0.0, 0.0), c(1.0, 0.0)),
            0.5f64.sqrt(),
            max_relative = 1e-15
        );
        let tiny = coherent_overlap_closed_form(spin(400), c(0.0, 0.0), c(1.0, 0.0));
        assert!(tiny > 0.0);
        assert_relative_eq!(tiny, 2f64.powi(-200), max_relative = 1e-12);
    }

    #[test]
    fn spin_half_operators_are_half_paulis() {
        // Basis order is (|m=-½⟩, |m=+½⟩); reorder to (up, down) to compare.
        let ops = spin_operators(spin(1));
        let swap = |m: &CMatrix| CMatrix::from_fn(2, 2, |i, j| m[(1 - i, 1 - j)]);
        let half = C64::new(0.5, 0.0);
        let px = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), half, half, c(0.0, 0.0)]);
        let py = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -0.5), c(0.0, 0.5), c(0.0, 0.0)]);
        let pz = CMatrix::from_row_slice(2, 2, &[half, c(0.0, 0.0), c(0.0, 0.0), -half]);
        assert!((swap(&ops.sx) - px).norm() < 1e-15);
        assert!((swap(&ops.sy) - py).norm() < 1e-15);
        assert!((swap(&ops.sz) - pz).norm() < 1e-15);
    }

    #[test]
    fn spin_algebra_and_casimir() {
        for two_s in [1, 2, 5, 10] {
            let sp = spin(two_s);
            let ops = spin_operators(sp);
            let comm = &ops.sx * &ops.sy - &ops.sy * &ops.sx - &ops.sz * c(0.0, 1.0);
            assert!(comm.norm() < 1e-12);
            let s = sp.spin();
            let casimir = &ops.sx * &ops.sx + &ops.sy * &ops.sy + &ops.sz * &ops.sz
                - CMatrix::identity(sp.dim(), sp.dim()) * c(s * (s + 1.0), 0.0);
            assert!(casimir.norm() < 1e-10);
        }
    }

    #[test]
    fn frame_unitary_maps_ground_to_coherent() {
        for (two_s, z) in [(1, c(0.5, 0.2)), (4, c(-2.0, 1.0)), (9, c(0.0, -0.3))] {
            let sp = spin(two_s);
            let u = frame_unitary(sp, z).unwrap();
            let ground = FockVector::basis(sp.dim(), 0).unwrap();
            let image: Vec<C64> = (0..sp.dim()).map(|i| u[(i, 0)]).collect();
            let image = FockVector::new(image, "").unwrap();
            let coh = spin_coherent(sp, z).unwrap();
            assert!((overlap(&coh, &image).norm() - 1.0).abs() < 1e-12);
            assert!(
                (overlap(&ground, &image).norm() - coherent_overlap_closed_form(sp, c(0.0, 0.0), z)).abs()
                    < 1e-12
            );
        }
    }

    #[test]
    fn coherent_direction_matches_expectation() {
        let sp = spin(6);
        let ops = spin_operators(sp);
        let z = c(0.8, -1.7);
        let v = spin_coherent(sp, z).unwrap();
        let dir = spin_direction(z);
        let got = [
            expectation(&v, &ops.sx) / sp.spin(),
            expectation(&v, &ops.sy) / sp.spin(),
            expectation(&v, &ops.sz) / sp.spin(),
        ];
        for k in 0..3 {
            assert!((got[k] - dir[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn uncertainty_equality_for_coherent_states() {
        let u = uncertainty_product(spin(6), c(0.0, 0.0)).unwrap();
        assert_relative_eq!(u.lhs, 9.0 / 4.0, max_relative = 1e-12);
        assert!((u.lhs - u.rhs).abs() < 1e-12);
        let u = uncertainty_product(spin(4), c(0.5, 0.2)).unwrap();
        assert!((u.lhs - u.rhs).abs() < 1e-9);
    }

    #[test]
    fn uncertainty_is_strict_for_non_coherent_state() {
        let one = FockVector::basis(3, 1).unwrap();
        let u = uncertainty_product_in_frame(&one, c(0.0, 0.0)).unwrap();
        assert!(u.lhs > u.rhs + 0.5);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let v = spin_coherent(spin(3), c(0.1, -0.4)).unwrap();
        let back = FockVector::from_json(&v.to_json()).unwrap();
        assert_close(&back, v.amplitudes(), 1e-15);
        assert_eq!(back.label(), v.label());
        assert!(FockVector::from_json(r#"{"dim":3,"amps":[[1,0]],"label":""}"#).is_err());
        assert!(FockVector::from_json("nope").is_err());
    }

    #[test]
    fn unnormalized_is_marked() {
        let v = FockVector::unnormalized(vec![c(2.0, 0.0)], "raw");
        assert!(!v.is_normalized());
        assert_eq!(v.norm(), 2.0);
    }

    proptest! {
        #[test]
        fn constructors_have_unit_norm(two_s in 1u32..60, re in -20.0f64..20.0, im in -20.0f64..20.0) {
            let z = c(re, im);
            let v = spin_coherent(spin(two_s), z).unwrap();
            prop_assert!((v.norm() - 1.0).abs() < NORM_TOLERANCE);
            let g = glauber_truncated(z * 0.2, default_glauber_cutoff(z * 0.2)).unwrap();
            prop_assert!((g.state.norm() - 1.0).abs() < NORM_TOLERANCE);
        }

        #[test]
        fn coherent_overlap_non_increasing_in_spin(
            ar in -3.0f64..3.0, ai in -3.0f64..3.0, br in -3.0f64..3.0, bi in -3.0f64..3.0,
        ) {
            let (a, b) = (c(ar, ai), c(br, bi));
            prop_assume!((a - b).norm() > 1e-6);
            let mut last = 1.0;
            for two_s in 1..30 {
                let ov = coherent_overlap_closed_form(spin(two_s), a, b);
                prop_assert!(ov <= last);
                last = ov;
            }
        }
    }
}
