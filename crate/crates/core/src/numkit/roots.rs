//! Simultaneous polynomial root finding.
//!
//! Roots come from Aberth–Ehrlich iteration started on perturbed rings whose
//! radii follow the Newton polygon of the coefficient moduli. A multiple root
//! of multiplicity `m` is only resolved to about `ε^{1/m}` by any
//! coefficient-based method, so after convergence the approximations are
//! grouped by overlapping inclusion disks and each group is replaced by its
//! centroid, refined by Newton's method on the `(m-1)`-th derivative.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::combinatorics::log_binomial;
use crate::{Error, Result, C64};

/// Coefficients below this fraction of the largest modulus are trimmed from
/// the top of a polynomial.
pub const TRIM_TOLERANCE: f64 = 1e-12;

/// Roots closer than this are grouped by [`cluster_roots`].
pub const CLUSTER_TOLERANCE: f64 = 1e-5;

const MAX_ITERATIONS: usize = 5000;
const SEED: u64 = 0x5eed_2002;

/// Polynomial `Σ c_k z^k`, stored with its leading (noise-level) coefficients
/// trimmed, alongside the length it was declared with.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPolynomial {
    coefficients: Vec<C64>,
    declared_length: usize,
}

impl ComplexPolynomial {
    /// Builds a polynomial from coefficients indexed by power; the declared
    /// length is the input length.
    pub fn new(coefficients: Vec<C64>) -> Result<Self> {
        let declared = coefficients.len();
        Self::with_declared_length(coefficients, declared)
    }

    pub fn with_declared_length(mut coefficients: Vec<C64>, declared_length: usize) -> Result<Self> {
        if coefficients
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::domain("polynomial has non-finite coefficients"));
        }
        if declared_length < coefficients.len() {
            return Err(Error::domain(format!(
                "declared length {declared_length} is shorter than {} coefficients",
                coefficients.len()
            )));
        }
        let max = coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            return Err(Error::domain("zero polynomial has no roots to describe"));
        }
        let threshold = TRIM_TOLERANCE * max;
        while coefficients.last().is_some_and(|c| c.norm() <= threshold) {
            coefficients.pop();
        }
        Ok(Self {
            coefficients,
            declared_length,
        })
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    pub fn declared_length(&self) -> usize {
        self.declared_length
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn leading(&self) -> C64 {
        *self.coefficients.last().expect("trimmed polynomial is nonempty")
    }

    pub fn max_modulus(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: C64) -> C64 {
        horner(&self.coefficients, z)
    }
}

/// Finite roots of a polynomial plus the number of roots at infinity implied
/// by its declared length.
#[derive(Debug, Clone)]
pub struct PolynomialRoots {
    pub roots: Vec<C64>,
    pub infinity_count: usize,
}

/// A group of numerically coincident roots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootCluster {
    pub center: C64,
    pub multiplicity: usize,
}

fn horner(c: &[C64], z: C64) -> C64 {
    c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

/// `(p(z), p'(z), Σ|c_k||z|^k)` by Horner.
fn eval_with_derivative(c: &[C64], z: C64) -> (C64, C64, f64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    let mut bound = 0.0;
    let r = z.norm();
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
        bound = bound * r + a.norm();
    }
    (p, dp, bound)
}

/// Newton correction `p(z)/p'(z)` together with a convergence flag from the
/// backward-error test `|p(z)| ≤ 4 n ε Σ|c_k||z|^k`. For `|z| > 1` the
/// reversed polynomial is used to keep the evaluation bounded.
fn newton_ratio(c: &[C64], z: C64) -> (C64, bool) {
    let n = c.len() - 1;
    let tol = 4.0 * (n as f64 + 1.0) * f64::EPSILON;
    if z.norm() <= 1.0 {
        let (p, dp, bound) = eval_with_derivative(c, z);
        let done = p.norm() <= tol * bound;
        if dp == C64::new(0.0, 0.0) {
            return (C64::new(0.0, 0.0), done);
        }
        (p / dp, done)
    } else {
        let w = z.inv();
        let reversed: Vec<C64> = c.iter().rev().copied().collect();
        let (q, dq, bound) = eval_with_derivative(&reversed, w);
        let done = q.norm() <= tol * bound;
        // p/p' = z / (n - w q'/q)
        if q == C64::new(0.0, 0.0) {
            return (C64::new(0.0, 0.0), true);
        }
        let denom = C64::new(n as f64, 0.0) - w * dq / q;
        if denom == C64::new(0.0, 0.0) {
            return (C64::new(0.0, 0.0), done);
        }
        (z / denom, done)
    }
}

/// Starting points: one ring per edge of the upper convex hull of
/// `(k, ln|c_k|)`, with random angular offsets and small radial jitter.
fn initial_guesses(c: &[C64], rng: &mut ChaCha8Rng) -> Vec<C64> {
    let n = c.len() - 1;
    let points: Vec<(usize, f64)> = c
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > 0.0)
        .map(|(k, a)| (k, a.norm().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &pt in &points {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            let cross = (x2 as f64 - x1 as f64) * (pt.1 - y1) - (y2 - y1) * (pt.0 as f64 - x1 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut guesses = Vec::with_capacity(n);
    for edge in hull.windows(2) {
        let (i, yi) = edge[0];
        let (j, yj) = edge[1];
        let count = j - i;
        let radius = ((yi - yj) / count as f64).exp();
        let offset: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        for k in 0..count {
            let angle = offset + std::f64::consts::TAU * k as f64 / count as f64 + 0.4;
            let jitter: f64 = rng.random_range(0.95..1.05);
            guesses.push(C64::from_polar(radius * jitter, angle));
        }
    }
    debug_assert_eq!(guesses.len(), n);
    guesses
}

fn aberth(c: &[C64]) -> Result<Vec<C64>> {
    let n = c.len() - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut z = initial_guesses(c, &mut rng);
    let mut done = vec![false; n];
    for _ in 0..MAX_ITERATIONS {
        let mut all_done = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (ratio, converged) = newton_ratio(c, z[i]);
            if converged {
                done[i] = true;
                continue;
            }
            all_done = false;
            let repulsion: C64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let diff = z[i] - z[j];
                    if diff == C64::new(0.0, 0.0) {
                        C64::new(0.0, 0.0)
                    } else {
                        diff.inv()
                    }
                })
                .sum();
            let denom = C64::new(1.0, 0.0) - ratio * repulsion;
            let step = if denom.norm() > 0.0 { ratio / denom } else { ratio };
            if !step.re.is_finite() || !step.im.is_finite() {
                continue;
            }
            z[i] -= step;
            if step.norm() <= f64::EPSILON * z[i].norm() {
                done[i] = true;
            }
        }
        if all_done {
            return Ok(z);
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITERATIONS,
        context: format!("Aberth iteration on a degree-{n} polynomial"),
    })
}

/// Inclusion radii `n |W_i|`, `W_i = p(z_i) / (c_n Π_{j≠i}(z_i - z_j))`. The
/// union of the disks holds every root and each connected component holds as
/// many roots as disks.
fn inclusion_radii(c: &[C64], z: &[C64]) -> Vec<f64> {
    let n = z.len();
    let lead = c[n].norm().ln();
    (0..n)
        .map(|i| {
            let (p, _, bound) = eval_with_derivative(c, z[i]);
            // Never smaller than the evaluation's own rounding error.
            let pmod = p.norm().max(4.0 * f64::EPSILON * bound);
            let mut log_r = pmod.ln() - lead + (n as f64).ln();
            for j in 0..n {
                if j != i {
                    let d = (z[i] - z[j]).norm();
                    if d == 0.0 {
                        return f64::INFINITY;
                    }
                    log_r -= d.ln();
                }
            }
            log_r.exp()
        })
        .collect()
}

fn components(z: &[C64], radii: &[f64]) -> Vec<Vec<usize>> {
    let n = z.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (z[i] - z[j]).norm() <= radii[i] + radii[j] {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Coefficients of `p^{(k)}(z) / k!`.
fn scaled_derivative(c: &[C64], k: usize) -> Vec<C64> {
    (k..c.len())
        .map(|j| {
            let binom = log_binomial(j as u64, k as u64).map(f64::exp).unwrap_or(0.0);
            c[j] * binom
        })
        .collect()
}

/// A few Newton steps past the backward-error stop, kept only while `|p|`
/// decreases.
fn polish_simple(c: &[C64], mut z: C64) -> C64 {
    let mut residual = eval_with_derivative(c, z).0.norm();
    for _ in 0..3 {
        let (p, dp, _) = eval_with_derivative(c, z);
        if dp == C64::new(0.0, 0.0) {
            break;
        }
        let next = z - p / dp;
        let r = eval_with_derivative(c, next).0.norm();
        if r.is_nan() || r >= residual {
            break;
        }
        (z, residual) = (next, r);
    }
    z
}

fn polish_cluster(c: &[C64], members: &[C64]) -> C64 {
    let m = members.len();
    let centroid = members.iter().sum::<C64>() / m as f64;
    let spread = members.iter().map(|z| (z - centroid).norm()).fold(0.0, f64::max);
    let deriv = scaled_derivative(c, m - 1);
    let mut z = centroid;
    for _ in 0..50 {
        let (p, dp, _) = eval_with_derivative(&deriv, z);
        if dp == C64::new(0.0, 0.0) {
            break;
        }
        let step = p / dp;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        z -= step;
        if (z - centroid).norm() > 2.0 * spread + f64::EPSILON * centroid.norm() {
            return centroid;
        }
        if step.norm() <= 4.0 * f64::EPSILON * z.norm().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    z
}

/// All finite roots of `p` (with multiplicity), plus the count of roots at
/// infinity `declared_length - 1 - degree`.
///
/// Fails with [`Error::NonConvergence`] rather than returning unconverged
/// approximations.
pub fn polynomial_roots(p: &ComplexPolynomial) -> Result<PolynomialRoots> {
    let infinity_count = p.declared_length() - 1 - p.degree();
    let c = p.coefficients();
    let zeros_at_origin = c.iter().take_while(|a| a.norm() == 0.0).count();
    let reduced = &c[zeros_at_origin..];
    let mut roots = vec![C64::new(0.0, 0.0); zeros_at_origin];
    let degree = reduced.len() - 1;
    match degree {
        0 => {}
        1 => roots.push(-reduced[0] / reduced[1]),
        _ => {
            let mut z = aberth(reduced)?;
            let radii = inclusion_radii(reduced, &z);
            for group in components(&z, &radii) {
                if group.len() < 2 {
                    z[group[0]] = polish_simple(reduced, z[group[0]]);
                    continue;
                }
                let members: Vec<C64> = group.iter().map(|&i| z[i]).collect();
                let center = polish_cluster(reduced, &members);
                for &i in &group {
                    z[i] = center;
                }
            }
            roots.extend(z);
        }
    }
    Ok(PolynomialRoots {
        roots,
        infinity_count,
    })
}

/// Groups roots by single linkage at distance `tol`, in order of first
/// appearance; centers are member means.
pub fn cluster_roots(roots: &[C64], tol: f64) -> Vec<RootCluster> {
    let radii = vec![tol / 2.0; roots.len()];
    let mut groups = components(roots, &radii);
    groups.sort_by_key(|g| g[0]);
    groups
        .into_iter()
        .map(|g| RootCluster {
            center: g.iter().map(|&i| roots[i]).sum::<C64>() / g.len() as f64,
            multiplicity: g.len(),
        })
        .collect()
}
