use nalgebra::DMatrix;

use crate::{CMatrix, Error, Result, C64};

/// Entrywise tolerance for `m[i][j] == conj(m[j][i])`, scaled by `max(1, max|m_ij|)`.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

/// Eigenpairs of a Hermitian matrix, eigenvalues descending; `vectors`
/// holds the matching eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// `V diag(values) V†`.
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            for i in 0..d {
                scaled[(i, j)] *= lambda;
            }
        }
        &scaled * self.vectors.adjoint()
    }
}

/// Checks the Hermitian contract and returns the largest asymmetry found.
pub fn check_hermitian(m: &CMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::contract(format!(
            "matrix is not square: {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::contract("matrix has non-finite entries"));
    }
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    if worst > HERMITIAN_TOLERANCE * scale {
        return Err(Error::contract(format!(
            "matrix is not Hermitian (asymmetry {worst:.3e})"
        )));
    }
    Ok(worst)
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_spectrum(m: &CMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(m)?.values)
}

/// Full eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
pub fn hermitian_eigen(m: &CMatrix) -> Result<HermitianEigen> {
    check_hermitian(m)?;
    let n = m.nrows();
    // Symmetrize so round-off asymmetry below the tolerance cannot leak in.
    let mut a = CMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let mut v = CMatrix::identity(n, n);

    let total: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let floor = (f64::EPSILON * f64::EPSILON) * total;

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if off <= floor {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            iterations: MAX_SWEEPS,
            context: "Jacobi eigensolver".into(),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// One Jacobi rotation zeroing `a[p][q]`.
///
/// With `a_pq = β e^{iφ}`, `J = diag(1, e^{-iφ}) · [[c, s], [-s, c]]` on the
/// (p, q) plane reduces the block to the real symmetric case.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let beta = apq.norm();
    if beta == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip entries already negligible against both diagonals.
    if beta < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = C64::new(0.0, 0.0);
        a[(q, p)] = C64::new(0.0, 0.0);
        return;
    }
    let phase = apq / beta; // e^{iφ}
    let theta = (aqq - app) / (2.0 * beta);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let n = a.nrows();
    let phase_conj = phase.conj(); // e^{-iφ}
                                   // Columns: A ← A J.
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * phase_conj * s;
        a[(k, q)] = akp * s + akq * phase_conj * c;
    }
    // Rows: A ← J† A.
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * phase_conj * s;
        v[(k, q)] = vkp * s + vkq * phase_conj * c;
    }
}

/// Singular values of an arbitrary complex matrix, descending.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::contract("matrix has non-finite entries"));
    }
    if m.is_empty() {
        return Ok(Vec::new());
    }
    let svd = m.clone().svd(false, false);
    let mut values: Vec<f64> = svd.singular_values.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// `exp(-i · angle · H)` for Hermitian `H`, via its eigendecomposition.
pub fn exp_i_hermitian(h: &CMatrix, angle: f64) -> Result<CMatrix> {
    let eig = hermitian_eigen(h)?;
    let n = eig.values.len();
    let mut scaled = eig.vectors.clone();
    for (j, &lambda) in eig.values.iter().enumerate() {
        let phase = C64::from_polar(1.0, -angle * lambda);
        for i in 0..n {
            scaled[(i, j)] *= phase;
        }
    }
    Ok(&scaled * eig.vectors.adjoint())
}

#[allow(dead_code)]
pub(crate) fn real_diag(values: &[f64]) -> CMatrix {
    DMatrix::from_fn(values.len(), values.len(), |i, j| {
        if i == j {
            C64::new(values[i], 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        let m = random_matrix(rng, n, n);
        (&m + m.adjoint()) * C64::new(0.5, 0.0)
    }

    /// Number of eigenvalues below `x`: negative pivots of `H - xI` under
    /// unpivoted Gaussian elimination (Sylvester inertia).
    fn count_below(h: &CMatrix, x: f64) -> usize {
        let n = h.nrows();
        let mut a = h.clone();
        for i in 0..n {
            a[(i, i)] -= C64::new(x, 0.0);
        }
        let mut negatives = 0;
        for k in 0..n {
            let pivot = a[(k, k)];
            if pivot.re < 0.0 {
                negatives += 1;
            }
            for i in k + 1..n {
                let factor = a[(i, k)] / pivot;
                for j in k..n {
                    let akj = a[(k, j)];
                    a[(i, j)] -= factor * akj;
                }
            }
        }
        negatives
    }

    /// k-th smallest eigenvalue by bisection on the inertia count.
    fn bisect_eigenvalue(h: &CMatrix, k: usize) -> f64 {
        let bound: f64 = h.iter().map(|z| z.norm()).sum::<f64>() + 1.0;
        let (mut lo, mut hi) = (-bound, bound);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if count_below(h, mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn identity_and_diagonal() {
        let id = CMatrix::identity(3, 3);
        assert_eq!(hermitian_spectrum(&id).unwrap(), vec![1.0, 1.0, 1.0]);
        let d = real_diag(&[0.3, 0.7]);
        let s = hermitian_spectrum(&d).unwrap();
        assert!((s[0] - 0.7).abs() < 1e-15 && (s[1] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn random_hermitian_matches_bisection_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let h = random_hermitian(&mut rng, 6);
            let got = hermitian_spectrum(&h).unwrap();
            for (k, &value) in got.iter().rev().enumerate() {
                let want = bisect_eigenvalue(&h, k);
                assert!((value - want).abs() < 1e-8, "{value} vs {want}");
            }
        }
    }

    #[test]
    fn reconstruction_residual_is_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1, 2, 5, 17, 40] {
            let h = random_hermitian(&mut rng, n);
            let eig = hermitian_eigen(&h).unwrap();
            let residual = (eig.reconstruct() - &h).norm();
            assert!(residual < 1e-9 * h.norm().max(1.0), "n={n} residual {residual}");
            let unitary = eig.vectors.adjoint() * &eig.vectors - CMatrix::identity(n, n);
            assert!(unitary.norm() < 1e-12);
            assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let mut m = CMatrix::identity(2, 2);
        m[(0, 1)] = C64::new(0.0, 1.0);
        m[(1, 0)] = C64::new(0.0, 1.0);
        assert!(matches!(hermitian_spectrum(&m), Err(Error::Contract(_))));
        let rect = CMatrix::zeros(2, 3);
        assert!(matches!(hermitian_spectrum(&rect), Err(Error::Contract(_))));
    }

    #[test]
    fn singular_values_basic() {
        assert_eq!(singular_values(&CMatrix::zeros(3, 3)).unwrap(), vec![0.0; 3]);
        let d = real_diag(&[3.0, 4.0]);
        let s = singular_values(&d).unwrap();
        assert!((s[0] - 4.0).abs() < 1e-14 && (s[1] - 3.0).abs() < 1e-14);
        let mut bad = CMatrix::zeros(2, 2);
        bad[(0, 0)] = C64::new(f64::NAN, 0.0);
        assert!(singular_values(&bad).is_err());
    }

    #[test]
    fn singular_values_cross_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_matrix(&mut rng, 5, 5);
        let sv = singular_values(&m).unwrap();
        let ev = hermitian_spectrum(&(&m * m.adjoint())).unwrap();
        for (s, e) in sv.iter().zip(&ev) {
            assert!((s * s - e).abs() < 1e-10);
        }
    }

    #[test]
    fn exp_of_pauli_x() {
        let mut sx = CMatrix::zeros(2, 2);
        sx[(0, 1)] = C64::new(1.0, 0.0);
        sx[(1, 0)] = C64::new(1.0, 0.0);
        let u = exp_i_hermitian(&sx, 0.3).unwrap();
        assert!((u[(0, 0)] - C64::new(0.3f64.cos(), 0.0)).norm() < 1e-14);
        assert!((u[(0, 1)] - C64::new(0.0, -(0.3f64).sin())).norm() < 1e-14);
    }
}
