//! Majorana constellations: a spin-`S` state as the `2S` zeros of its amplitude
//! function placed on the sphere, plus the phase-space metric and curvature.
//!
//! Sphere convention: a point at polar angle `θ` from the north pole and
//! azimuth `φ` corresponds to the plane point `z = e^{i(π-φ)} cot(θ/2)`, so
//! `z = 0` is the south pole and `|z| → ∞` the north pole. Under this
//! convention the coherent state `|α⟩` sits at the image of `-1/ᾱ`, the
//! antipode of that point is the image of `α` itself, and `⟨α|ψ⟩ ∝ ψ(α)`.

use std::sync::OnceLock;

use serde_json::json;

use crate::numkit::{
    laplacian_5pt, log_binomial, polish_roots, polynomial_roots, ComplexPolynomial, Dd, DdComplex,
};
use crate::states::{
    ln_coherent_overlap, overlap, spin_coherent, spin_rotation, FockVector, SpinMagnitude, NORM_TOLERANCE,
};
use crate::{Error, Result, C64};

pub type Point = [f64; 3];

pub const NORTH_POLE: Point = [0.0, 0.0, 1.0];

/// Angular distance within which a constellation point counts as antipodal.
pub const ANTIPODE_TOLERANCE: f64 = 1e-6;

/// Plane coordinate of a unit vector; `None` at the north pole.
pub fn project(p: Point) -> Option<C64> {
    let denom = 1.0 - p[2];
    if denom <= 0.0 {
        return None;
    }
    Some(C64::new(-p[0], p[1]) / denom)
}

/// Unit vector for a plane coordinate; stable for large `|z|`.
pub fn unproject(z: C64) -> Point {
    if !z.re.is_finite() || !z.im.is_finite() {
        return NORTH_POLE;
    }
    let r2 = z.norm_sqr();
    if r2 <= 1.0 {
        let k = 1.0 + r2;
        [-2.0 * z.re / k, 2.0 * z.im / k, (r2 - 1.0) / k]
    } else {
        let w = z.inv();
        let w2 = w.norm_sqr();
        let k = 1.0 + w2;
        [-2.0 * w.re / k, -2.0 * w.im / k, (1.0 - w2) / k]
    }
}

/// Sphere point of the coherent state `|α⟩`: the image of `-1/ᾱ`.
pub fn coherent_point(alpha: C64) -> Point {
    if alpha.norm() == 0.0 {
        return NORTH_POLE;
    }
    unproject(-alpha.conj().inv())
}

pub fn antipode(p: Point) -> Point {
    [-p[0], -p[1], -p[2]]
}

/// Angle between two unit vectors, accurate for nearly (anti)parallel pairs.
pub fn angle_between(a: Point, b: Point) -> f64 {
    let cross = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    let sin = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
    let cos = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    sin.atan2(cos)
}

/// Rodrigues rotation of `p` by `angle` about the unit `axis`.
pub fn rotate_point(p: Point, axis: Point, angle: f64) -> Point {
    let (s, c) = angle.sin_cos();
    let dot = axis[0] * p[0] + axis[1] * p[1] + axis[2] * p[2];
    let cross = [
        axis[1] * p[2] - axis[2] * p[1],
        axis[2] * p[0] - axis[0] * p[2],
        axis[0] * p[1] - axis[1] * p[0],
    ];
    std::array::from_fn(|i| p[i] * c + cross[i] * s + axis[i] * dot * (1.0 - c))
}

fn amplitude_coefficients(state: &FockVector) -> Vec<C64> {
    let two_s = state.dim() as u64 - 1;
    state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(n, a)| a * (0.5 * log_binomial(two_s, n as u64).expect("n <= 2S")).exp())
        .collect()
}

/// `ψ(z) = Σ C(2S,n)^{1/2} a_n zⁿ`, declared with length `d = 2S + 1`.
pub fn amplitude_function(state: &FockVector) -> Result<ComplexPolynomial> {
    ComplexPolynomial::with_declared_length(amplitude_coefficients(state), state.dim())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MajoranaConstellation {
    /// Zeros of the amplitude function in the plane, with multiplicity.
    pub roots: Vec<C64>,
    pub finite_points: Vec<Point>,
    pub north_pole_multiplicity: usize,
    pub source_dim: usize,
}

impl MajoranaConstellation {
    pub fn two_s(&self) -> usize {
        self.source_dim - 1
    }

    /// Finite points followed by the north-pole copies.
    pub fn all_points(&self) -> Vec<Point> {
        let mut pts = self.finite_points.clone();
        pts.extend(std::iter::repeat_n(NORTH_POLE, self.north_pole_multiplicity));
        pts
    }

    /// Largest angle between any two points.
    pub fn angular_spread(&self) -> f64 {
        let pts = self.all_points();
        let mut spread: f64 = 0.0;
        for (i, &a) in pts.iter().enumerate() {
            for &b in &pts[i + 1..] {
                spread = spread.max(angle_between(a, b));
            }
        }
        spread
    }

    /// Points grouped by angular proximity (single linkage at `tol`), with
    /// multiplicities.
    pub fn clusters(&self, tol: f64) -> Vec<(Point, usize)> {
        let pts = self.all_points();
        let mut label: Vec<Option<usize>> = vec![None; pts.len()];
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for start in 0..pts.len() {
            if label[start].is_some() {
                continue;
            }
            let id = groups.len();
            let mut members = vec![start];
            label[start] = Some(id);
            let mut k = 0;
            while k < members.len() {
                let i = members[k];
                for j in 0..pts.len() {
                    if label[j].is_none() && angle_between(pts[i], pts[j]) <= tol {
                        label[j] = Some(id);
                        members.push(j);
                    }
                }
                k += 1;
            }
            groups.push(members);
        }
        groups
            .into_iter()
            .map(|g| {
                let mut sum = [0.0; 3];
                for &i in &g {
                    for k in 0..3 {
                        sum[k] += pts[i][k];
                    }
                }
                let len = (sum[0] * sum[0] + sum[1] * sum[1] + sum[2] * sum[2]).sqrt();
                (sum.map(|x| x / len), g.len())
            })
            .collect()
    }

    /// `{ "two_s": n, "points": [[x, y, z], …], "north_multiplicity": m }`.
    pub fn to_json_value(&self) -> serde_json::Value {
        json!({
            "two_s": self.two_s(),
            "points": self.finite_points,
            "north_multiplicity": self.north_pole_multiplicity,
        })
    }
}

/// Zeros of the amplitude function mapped onto the sphere.
///
/// The variable is first rescaled by `s = |c_low/c_high|^{1/(high-low)}` over
/// the outermost nonzero coefficients, which balances the coefficient moduli
/// before the leading-coefficient trim.
pub fn constellation(state: &FockVector) -> Result<MajoranaConstellation> {
    if (state.norm() - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::contract("constellation needs a normalized state"));
    }
    let d = state.dim();
    if d < 2 {
        return Err(Error::domain("a constellation needs dimension at least 2"));
    }
    let raw = amplitude_coefficients(state);
    let nonzero: Vec<usize> = (0..d).filter(|&n| raw[n].norm() > 0.0).collect();
    let (low, high) = (
        nonzero[0],
        *nonzero.last().expect("normalized state has a nonzero amplitude"),
    );
    let ln_scale = if high > low {
        (raw[low].norm().ln() - raw[high].norm().ln()) / (high - low) as f64
    } else {
        0.0
    };
    let ln_moduli: Vec<f64> = (0..d)
        .map(|n| {
            if raw[n].norm() == 0.0 {
                f64::NEG_INFINITY
            } else {
                raw[n].norm().ln() + n as f64 * ln_scale
            }
        })
        .collect();
    let top = ln_moduli.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scaled: Vec<C64> = (0..d)
        .map(|n| {
            if ln_moduli[n] == f64::NEG_INFINITY {
                C64::new(0.0, 0.0)
            } else {
                C64::from_polar((ln_moduli[n] - top).exp(), raw[n].arg())
            }
        })
        .collect();
    let found = polynomial_roots(&ComplexPolynomial::with_declared_length(scaled, d)?)?;
    let scale = ln_scale.exp();
    let roots: Vec<C64> = found.roots.iter().map(|w| w * scale).collect();
    let finite_points = roots.iter().map(|&z| unproject(z)).collect();
    Ok(MajoranaConstellation {
        roots,
        finite_points,
        north_pole_multiplicity: found.infinity_count,
        source_dim: d,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleCheck {
    pub center: C64,
    pub radius: f64,
    /// Largest `| |root - center| - radius |`.
    pub max_residual: f64,
    /// The superposition is a single coherent state (`a = 0`).
    pub degenerate: bool,
}

/// `κ + (1 + β̄z)^{2S}` with `κ = (a/b)(1+|β|²)^S`, a multiple of the amplitude
/// function of `a|0⟩ + b|β⟩`, in double-double.
fn superposition_coefficients(a: C64, b: C64, spin: SpinMagnitude, beta: C64) -> Vec<DdComplex> {
    let two_s = spin.two_s();
    let weight = (Dd::ONE + DdComplex::from_c64(beta).norm_sqr())
        .sqrt()
        .powi(two_s);
    let kappa = (DdComplex::from_c64(a) / DdComplex::from_c64(b)).scale(weight);
    let beta_bar = DdComplex::from_c64(beta.conj());
    let mut coefficients = Vec::with_capacity(two_s as usize + 1);
    let mut binomial = Dd::ONE;
    let mut power = DdComplex::ONE;
    for n in 0..=two_s {
        coefficients.push(power.scale(binomial));
        binomial = binomial * Dd::from_f64(f64::from(two_s - n)) / Dd::from_f64(f64::from(n + 1));
        power = power * beta_bar;
    }
    coefficients[0] = coefficients[0] + kappa;
    coefficients
}

/// Zeros of `a|0⟩ + b|β⟩` against the circle of radius
/// `|a/b|^{1/2S} (1+|β|²)^{1/2} / |β|` centred at `-1/β̄`.
pub fn circle_check(a: C64, b: C64, spin: SpinMagnitude, beta: C64) -> Result<CircleCheck> {
    if b.norm() == 0.0 || beta.norm() == 0.0 {
        return Err(Error::domain("circle check needs b != 0 and beta != 0"));
    }
    let d = spin.dim();
    let ground = FockVector::basis(d, 0)?;
    let coherent = spin_coherent(spin, beta)?;
    let amps = ground
        .amplitudes()
        .iter()
        .zip(coherent.amplitudes())
        .map(|(x, y)| a * x + b * y)
        .collect();
    let state = FockVector::new(amps, "circle superposition")?;
    let center = -beta.conj().inv();
    let degenerate = a.norm() == 0.0;
    let radius = if degenerate {
        0.0
    } else {
        (a / b).norm().powf(1.0 / spin.two_s() as f64) * (1.0 + beta.norm_sqr()).sqrt() / beta.norm()
    };
    let cons = constellation(&state)?;
    if cons.north_pole_multiplicity > 0 {
        return Err(Error::Degenerate("superposition has zeros at infinity".into()));
    }
    let roots = if degenerate {
        cons.roots
    } else {
        polish_roots(&superposition_coefficients(a, b, spin, beta), &cons.roots)?
    };
    let max_residual = roots
        .iter()
        .map(|z| ((z - center).norm() - radius).abs())
        .fold(0.0, f64::max);
    Ok(CircleCheck {
        center,
        radius,
        max_residual,
        degenerate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntipodalCheck {
    pub has_antipodal_point: bool,
    /// `|⟨α|ψ⟩|`.
    pub overlap_modulus: f64,
}

/// Whether `state` has a constellation point opposite the point of `|α⟩`, and
/// the overlap that this predicts to vanish.
pub fn antipodal_orthogonality(state: &FockVector, alpha: C64) -> Result<AntipodalCheck> {
    let spin = state.spin()?;
    let target = antipode(coherent_point(alpha));
    let cons = constellation(state)?;
    let has_antipodal_point = cons
        .all_points()
        .iter()
        .any(|&p| angle_between(p, target) <= ANTIPODE_TOLERANCE);
    let overlap_modulus = overlap(&spin_coherent(spin, alpha)?, state).norm();
    Ok(AntipodalCheck {
        has_antipodal_point,
        overlap_modulus,
    })
}

/// Applies the spin rotation that turns the constellation rigidly by `angle`
/// about the unit `axis`.
///
/// The constellation of a coherent state is the spin direction reflected by a
/// half turn about x, so a sphere rotation about `(n_x, n_y, n_z)` is the spin
/// rotation about `(n_x, -n_y, -n_z)`.
pub fn rotate_state(state: &FockVector, axis: Point, angle: f64) -> Result<FockVector> {
    let spin = state.spin()?;
    let u = spin_rotation(spin, [axis[0], -axis[1], -axis[2]], angle)?;
    let v = nalgebra::DVector::from_column_slice(state.amplitudes());
    FockVector::new((u * v).as_slice().to_vec(), format!("rotated {}", state.label()))
}

/// Unit axis `(sin φ, -cos φ, 0)` in the equatorial plane.
pub fn equatorial_axis(phi: f64) -> Point {
    [phi.sin(), -phi.cos(), 0.0]
}

/// Largest angle between matched points, pairing each point greedily with its
/// nearest unused partner.
pub fn greedy_mismatch(expected: &[Point], actual: &[Point]) -> f64 {
    if expected.len() != actual.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; actual.len()];
    let mut worst: f64 = 0.0;
    for &p in expected {
        let (k, dist) = actual
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, &q)| (k, angle_between(p, q)))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("equal lengths");
        used[k] = true;
        worst = worst.max(dist);
    }
    worst
}

/// Rotates `state` by `θ` about [`equatorial_axis`]`(φ)` and returns the
/// largest angle between its constellation and the rigidly rotated original.
pub fn rotation_covariance_check(state: &FockVector, axis_angles: (f64, f64)) -> Result<f64> {
    let (theta, phi) = axis_angles;
    rotation_covariance_about(state, equatorial_axis(phi), theta)
}

/// As [`rotation_covariance_check`] for an arbitrary axis.
pub fn rotation_covariance_about(state: &FockVector, axis: Point, angle: f64) -> Result<f64> {
    let len = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    if len.is_nan() || len <= 0.0 {
        return Err(Error::domain("rotation axis must be nonzero"));
    }
    let axis = axis.map(|x| x / len);
    let before = constellation(state)?;
    let after = constellation(&rotate_state(state, axis, angle)?)?;
    let expected: Vec<Point> = before
        .all_points()
        .into_iter()
        .map(|p| rotate_point(p, axis, angle))
        .collect();
    Ok(greedy_mismatch(&expected, &after.all_points()))
}

/// Finite-difference step for the metric.
pub const METRIC_STEP: f64 = 1e-4;

/// Laplacian step for the curvature.
pub const CURVATURE_STEP: f64 = 1e-3;

/// `(1 - |⟨z|z+δ⟩|²) / |δ|²` averaged over `±δ`, for the unit `direction`.
pub fn fubini_study_directional(spin: SpinMagnitude, z: C64, direction: C64) -> f64 {
    let step = direction / direction.norm() * METRIC_STEP;
    let infidelity = |w: C64| -(2.0 * ln_coherent_overlap(spin, z, w)).exp_m1();
    0.5 * (infidelity(z + step) + infidelity(z - step)) / (METRIC_STEP * METRIC_STEP)
}

/// Metric factor `g(z)` in `1 - |⟨z|z+δ⟩|² ≈ g|δ|²`, averaged over the real
/// and imaginary directions.
pub fn fubini_study_metric(spin: SpinMagnitude, z: C64) -> f64 {
    0.5 * (fubini_study_directional(spin, z, C64::new(1.0, 0.0))
        + fubini_study_directional(spin, z, C64::new(0.0, 1.0)))
}

fn raw_curvature(spin: SpinMagnitude, z: C64) -> f64 {
    let ln_g = |x: f64, y: f64| fubini_study_metric(spin, C64::new(x, y)).ln();
    -laplacian_5pt(ln_g, z.re, z.im, CURVATURE_STEP) / fubini_study_metric(spin, z)
}

static CURVATURE_SCALE: OnceLock<f64> = OnceLock::new();

/// Constant `c` in `K = -(c/g) Δ ln g`, fixed by `K = 1` at spin 1/2, `z = 0`.
pub fn curvature_scale() -> f64 {
    *CURVATURE_SCALE.get_or_init(|| {
        let half = SpinMagnitude::new(1).expect("two_s = 1 is valid");
        1.0 / raw_curvature(half, C64::new(0.0, 0.0))
    })
}

/// Curvature of the phase-space metric at `z`.
pub fn curvature(spin: SpinMagnitude, z: C64) -> f64 {
    curvature_scale() * raw_curvature(spin, z)
}
