//! Beam-splitter action on `|ψ, 0⟩` inputs and the reduced state of the output.
//!
//! `|n, 0⟩ ↦ Σ_p C(n,p)^{1/2} Tᵖ R^{n-p} |p, n-p⟩`: the first output index
//! counts quanta in the transmitted arm.

use crate::numkit::{ln_factorial, log_binomial};
use crate::states::{FockVector, SpinMagnitude, NORM_TOLERANCE};
use crate::{CMatrix, Error, Result, C64};

/// Transmission `T = t_mod·e^{i t_phase}` and reflection `R = r_mod·e^{i r_phase}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitterParams {
    t_mod: f64,
    r_mod: f64,
    t_phase: f64,
    r_phase: f64,
}

impl BeamSplitterParams {
    pub fn new(t_mod: f64, r_mod: f64, t_phase: f64, r_phase: f64) -> Result<Self> {
        let in_range = |x: f64| (0.0..=1.0).contains(&x);
        if !in_range(t_mod) || !in_range(r_mod) {
            return Err(Error::domain("|T| and |R| must lie in [0, 1]"));
        }
        if (t_mod * t_mod + r_mod * r_mod - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "|T|^2 + |R|^2 = {} is not 1",
                t_mod * t_mod + r_mod * r_mod
            )));
        }
        if !t_phase.is_finite() || !r_phase.is_finite() {
            return Err(Error::domain("phases must be finite"));
        }
        Ok(Self {
            t_mod,
            r_mod,
            t_phase,
            r_phase,
        })
    }

    /// Real nonnegative `T`, `R` with `|R|² = r2`.
    pub fn from_reflectivity(r2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r2) {
            return Err(Error::domain(format!("reflectivity {r2} outside [0, 1]")));
        }
        Self::new((1.0 - r2).sqrt(), r2.sqrt(), 0.0, 0.0)
    }

    pub fn balanced() -> Self {
        Self::from_reflectivity(0.5).expect("0.5 is a valid reflectivity")
    }

    pub fn with_phases(self, t_phase: f64, r_phase: f64) -> Result<Self> {
        Self::new(self.t_mod, self.r_mod, t_phase, r_phase)
    }

    pub fn t(&self) -> C64 {
        C64::from_polar(self.t_mod, self.t_phase)
    }

    pub fn r(&self) -> C64 {
        C64::from_polar(self.r_mod, self.r_phase)
    }

    pub fn t_mod(&self) -> f64 {
        self.t_mod
    }

    pub fn r_mod(&self) -> f64 {
        self.r_mod
    }

    pub fn reflectivity(&self) -> f64 {
        self.r_mod * self.r_mod
    }
}

/// Output amplitudes `c[p][q]` of `|p, q⟩`; `p` is the transmitted arm.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteAmplitudeMatrix {
    c: CMatrix,
}

impl BipartiteAmplitudeMatrix {
    pub fn dim(&self) -> usize {
        self.c.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.c
    }

    pub fn amplitude(&self, p: usize, q: usize) -> C64 {
        self.c[(p, q)]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.c.norm()
    }

    /// `Σ_{p+q=n} |c[p][q]|²` for each total number `n`.
    pub fn number_distribution(&self) -> Vec<f64> {
        let d = self.dim();
        let mut out = vec![0.0; 2 * d - 1];
        for p in 0..d {
            for q in 0..d {
                out[p + q] += self.c[(p, q)].norm_sqr();
            }
        }
        out
    }

    /// Exchanges the two arms.
    pub fn swap_modes(&self) -> Self {
        Self {
            c: self.c.transpose(),
        }
    }
}

/// `k·ln x` with `0·ln 0 = 0`.
fn ln_pow(x: f64, k: usize) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 * x.ln()
    }
}

fn accumulate_fock(c: &mut CMatrix, n: usize, amp: C64, params: &BeamSplitterParams) {
    if amp.norm() == 0.0 {
        return;
    }
    let (t, r) = (params.t_mod, params.r_mod);
    for p in 0..=n {
        let q = n - p;
        let ln_mod = 0.5 * log_binomial(n as u64, p as u64).expect("p <= n") + ln_pow(t, p) + ln_pow(r, q);
        if ln_mod == f64::NEG_INFINITY {
            continue;
        }
        let phase = p as f64 * params.t_phase + q as f64 * params.r_phase;
        c[(p, q)] += amp * C64::from_polar(ln_mod.exp(), phase);
    }
}

/// Output for the number-state input `|n, 0⟩` in a `dim × dim` matrix.
pub fn split_fock(n: usize, params: &BeamSplitterParams, dim: usize) -> Result<BipartiteAmplitudeMatrix> {
    if n >= dim {
        return Err(Error::domain(format!(
            "photon number {n} does not fit dimension {dim}"
        )));
    }
    let mut c = CMatrix::zeros(dim, dim);
    accumulate_fock(&mut c, n, C64::new(1.0, 0.0), params);
    Ok(BipartiteAmplitudeMatrix { c })
}

/// Output for `|ψ, 0⟩`, by linearity over the number states of `ψ`.
pub fn split_state(input: &FockVector, params: &BeamSplitterParams) -> Result<BipartiteAmplitudeMatrix> {
    if (input.norm() - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::contract(format!("input norm {} is not 1", input.norm())));
    }
    let d = input.dim();
    let mut c = CMatrix::zeros(d, d);
    for (n, &amp) in input.amplitudes().iter().enumerate() {
        accumulate_fock(&mut c, n, amp, params);
    }
    Ok(BipartiteAmplitudeMatrix { c })
}

/// Reduced state of the transmitted arm, `ρ = C C†`.
pub fn reduced_density_matrix(out: &BipartiteAmplitudeMatrix) -> CMatrix {
    &out.c * out.c.adjoint()
}

/// Reduced state of the reflected arm, `ρ = Cᵀ C̄`.
pub fn reduced_density_matrix_reflected(out: &BipartiteAmplitudeMatrix) -> CMatrix {
    out.c.transpose() * out.c.conjugate()
}

/// Reduced state of the reflected arm for the coherent input `|z, 0⟩`, summed
/// term by term:
///
/// `ρ[p][p'] = (2S)!/(1+|z|²)^{2S} Σ_m [p! p'! (2S-m-p)! (2S-m-p')!]^{-1/2}
///             |z|^{2m}/m! |T|^{2m} Rᵖ R̄^{p'} z̄ᵖ z^{p'}`,
///
/// with `m ≤ min(2S-p, 2S-p')`. Same spectrum as [`reduced_density_matrix`].
pub fn reduced_density_matrix_closed_form(
    spin: SpinMagnitude,
    z: C64,
    params: &BeamSplitterParams,
) -> CMatrix {
    let two_s = spin.two_s() as usize;
    let d = spin.dim();
    let zm = z.norm();
    let prefactor = ln_factorial(two_s as u64) - spin.spin() * 2.0 * zm.powi(2).ln_1p();
    let row_phase = params.r_phase - z.arg();
    let lf = |k: usize| ln_factorial(k as u64);
    CMatrix::from_fn(d, d, |p, pp| {
        let outer = prefactor - 0.5 * (lf(p) + lf(pp)) + ln_pow(params.r_mod, p + pp) + ln_pow(zm, p + pp);
        let top = (two_s - p).min(two_s - pp);
        let modulus: f64 = (0..=top)
            .map(|m| {
                let ln_term = outer - 0.5 * (lf(two_s - m - p) + lf(two_s - m - pp)) + ln_pow(zm, 2 * m)
                    - lf(m)
                    + ln_pow(params.t_mod, 2 * m);
                ln_term.exp()
            })
            .sum();
        C64::from_polar(modulus, (p as f64 - pp as f64) * row_phase)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{hermitian_spectrum, singular_values};
    use crate::states::{glauber_truncated, spin_coherent};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn spin(two_s: u32) -> SpinMagnitude {
        SpinMagnitude::new(two_s).unwrap()
    }

    fn max_entry_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn params_validation() {
        assert!(BeamSplitterParams::new(0.6, 0.8, 0.0, 0.0).is_ok());
        assert!(BeamSplitterParams::new(0.6, 0.7, 0.0, 0.0).is_err());
        assert!(BeamSplitterParams::from_reflectivity(1.2).is_err());
        let p = BeamSplitterParams::from_reflectivity(0.25).unwrap();
        assert!((p.reflectivity() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn split_fock_examples() {
        let bs = BeamSplitterParams::balanced();
        let vac = split_fock(0, &bs, 3).unwrap();
        assert_eq!(vac.amplitude(0, 0), c(1.0, 0.0));
        assert!((vac.frobenius_norm() - 1.0).abs() < 1e-15);

        let one = split_fock(1, &bs, 2).unwrap();
        assert!((one.amplitude(1, 0) - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((one.amplitude(0, 1) - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);

        assert!(split_fock(3, &bs, 3).is_err());
    }

    #[test]
    fn split_fock_matches_binomial_oracle() {
        let bs = BeamSplitterParams::from_reflectivity(0.7).unwrap();
        let out = split_fock(4, &bs, 6).unwrap();
        let binom: [f64; 5] = [1.0, 4.0, 6.0, 4.0, 1.0];
        let (t, r) = (0.3f64.sqrt(), 0.7f64.sqrt());
        for (p, b) in binom.iter().enumerate() {
            let want = b.sqrt() * t.powi(p as i32) * r.powi(4 - p as i32);
            assert!((out.amplitude(p, 4 - p).re - want).abs() < 1e-12);
        }
        assert!((out.frobenius_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_transmission_guard() {
        let bs = BeamSplitterParams::from_reflectivity(1.0).unwrap();
        let out = split_fock(3, &bs, 4).unwrap();
        assert_eq!(out.amplitude(0, 3), c(1.0, 0.0));
        assert!((out.frobenius_norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_quantum_is_maximally_entangled() {
        let out = split_state(&FockVector::basis(2, 1).unwrap(), &BeamSplitterParams::balanced()).unwrap();
        let rho = reduced_density_matrix(&out);
        assert!((rho[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((rho[(1, 1)].re - 0.5).abs() < 1e-15);
        assert!(rho[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn vacuum_input_gives_product() {
        let out = split_state(&FockVector::basis(4, 0).unwrap(), &BeamSplitterParams::balanced()).unwrap();
        let spectrum = hermitian_spectrum(&reduced_density_matrix(&out)).unwrap();
        assert!((spectrum[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn glauber_input_splits_into_product() {
        let input = glauber_truncated(c(1.0, 0.0), 40).unwrap().state;
        let out = split_state(&input, &BeamSplitterParams::balanced()).unwrap();
        let half = glauber_truncated(c(FRAC_1_SQRT_2, 0.0), 40).unwrap().state;
        let u = half.amplitudes();
        let mut ov = c(0.0, 0.0);
        for p in 0..out.dim() {
            for q in 0..out.dim() {
                ov += (u[p] * u[q]).conj() * out.amplitude(p, q);
            }
        }
        assert!(ov.norm_sqr() > 1.0 - 1e-10);
    }

    #[test]
    fn product_matrix_has_rank_one_reduced_state() {
        let u = [c(0.6, 0.0), c(0.0, 0.8)];
        let v = [c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)];
        let out = BipartiteAmplitudeMatrix {
            c: CMatrix::from_fn(2, 2, |i, j| u[i] * v[j]),
        };
        let spectrum = hermitian_spectrum(&reduced_density_matrix(&out)).unwrap();
        assert!((spectrum[0] - 1.0).abs() < 1e-14 && spectrum[1].abs() < 1e-14);
    }

    #[test]
    fn closed_form_ground_state() {
        let rho = reduced_density_matrix_closed_form(spin(4), c(0.0, 0.0), &BeamSplitterParams::balanced());
        assert!((rho[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((rho.trace() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn closed_form_matches_trace_out_entrywise() {
        let cases = [
            (1, c(1.0, 0.0), BeamSplitterParams::balanced(), 1e-12),
            (6, c(2.0, 0.0), BeamSplitterParams::balanced(), 1e-10),
            (
                7,
                c(0.5, -1.1),
                BeamSplitterParams::new(0.6, 0.8, 0.4, -1.3).unwrap(),
                1e-10,
            ),
        ];
        for (two_s, z, bs, tol) in cases {
            let out = split_state(&spin_coherent(spin(two_s), z).unwrap(), &bs).unwrap();
            let closed = reduced_density_matrix_closed_form(spin(two_s), z, &bs);
            assert!(max_entry_diff(&reduced_density_matrix_reflected(&out), &closed) < tol);
        }
    }

    #[test]
    fn closed_form_spectrum_matches_transmitted_arm() {
        let bs = BeamSplitterParams::from_reflectivity(0.25).unwrap();
        let z = c(3.0, 0.0);
        let out = split_state(&spin_coherent(spin(20), z).unwrap(), &bs).unwrap();
        let a = hermitian_spectrum(&reduced_density_matrix(&out)).unwrap();
        let b = hermitian_spectrum(&reduced_density_matrix_closed_form(spin(20), z, &bs)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn reduced_state_is_a_density_matrix() {
        let out = split_state(
            &spin_coherent(spin(9), c(1.3, 0.4)).unwrap(),
            &BeamSplitterParams::balanced(),
        )
        .unwrap();
        let rho = reduced_density_matrix(&out);
        assert!((rho.trace().re - 1.0).abs() < 1e-10);
        assert!(hermitian_spectrum(&rho).unwrap().iter().all(|&x| x > -1e-10));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn spectrum_is_phase_invariant(
            two_s in 1u32..14, zm in 0.0f64..4.0, zarg in -3.2f64..3.2,
            r2 in 0.0f64..1.0, tph in -3.2f64..3.2, rph in -3.2f64..3.2,
        ) {
            let sp = spin(two_s);
            let plain = BeamSplitterParams::from_reflectivity(r2).unwrap();
            let phased = plain.with_phases(tph, rph).unwrap();
            let a = split_state(&spin_coherent(sp, c(zm, 0.0)).unwrap(), &plain).unwrap();
            let b = split_state(&spin_coherent(sp, C64::from_polar(zm, zarg)).unwrap(), &phased).unwrap();
            let sa = hermitian_spectrum(&reduced_density_matrix(&a)).unwrap();
            let sb = hermitian_spectrum(&reduced_density_matrix(&b)).unwrap();
            for (x, y) in sa.iter().zip(&sb) {
                prop_assert!((x - y).abs() < 1e-10);
            }
        }

        #[test]
        fn eigenvalues_are_squared_singular_values(
            two_s in 1u32..14, zr in -3.0f64..3.0, zi in -3.0f64..3.0, r2 in 0.0f64..1.0,
        ) {
            let out = split_state(
                &spin_coherent(spin(two_s), c(zr, zi)).unwrap(),
                &BeamSplitterParams::from_reflectivity(r2).unwrap(),
            ).unwrap();
            let eig = hermitian_spectrum(&reduced_density_matrix(&out)).unwrap();
            let sv = singular_values(out.matrix()).unwrap();
            for (e, s) in eig.iter().zip(&sv) {
                prop_assert!((e - s * s).abs() < 1e-10);
            }
        }

        #[test]
        fn mode_swap_symmetry(
            amps in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..10), r2 in 0.0f64..1.0,
        ) {
            let input = FockVector::new(amps.iter().map(|&(a, b)| c(a, b)).collect(), "random");
            prop_assume!(input.is_ok());
            let input = input.unwrap();
            let x = split_state(&input, &BeamSplitterParams::from_reflectivity(r2).unwrap()).unwrap();
            let y = split_state(&input, &BeamSplitterParams::from_reflectivity(1.0 - r2).unwrap()).unwrap();
            let sx = hermitian_spectrum(&reduced_density_matrix(&x)).unwrap();
            let sy = hermitian_spectrum(&reduced_density_matrix(&y)).unwrap();
            for (a, b) in sx.iter().zip(&sy) {
                prop_assert!((a - b).abs() < 1e-10);
            }
            let swapped = reduced_density_matrix_reflected(&x.swap_modes());
            prop_assert!(max_entry_diff(&swapped, &reduced_density_matrix(&x)) < 1e-12);
        }

        #[test]
        fn number_distribution_is_conserved(
            amps in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..12),
            r2 in 0.0f64..1.0, tph in -3.2f64..3.2,
        ) {
            let input = FockVector::new(amps.iter().map(|&(a, b)| c(a, b)).collect(), "random");
            prop_assume!(input.is_ok());
            let input = input.unwrap();
            let bs = BeamSplitterParams::from_reflectivity(r2).unwrap().with_phases(tph, 0.0).unwrap();
            let out = split_state(&input, &bs).unwrap();
            let dist = out.number_distribution();
            for (n, a) in input.amplitudes().iter().enumerate() {
                prop_assert!((dist[n] - a.norm_sqr()).abs() < 1e-12);
            }
            prop_assert!((out.frobenius_norm() - 1.0).abs() < 1e-10);
        }
    }
}
