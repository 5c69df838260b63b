//! Double-double arithmetic and root polishing for polynomials whose zeros
//! are too ill-conditioned for `f64` coefficients.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::{Error, Result, C64};

const MAX_ITERATIONS: usize = 500;
const STEP_TOLERANCE: f64 = 1e-28;
/// `|p(z)|` below this fraction of `Σ|c_k||z|^k` is at the rounding floor.
const BACKWARD_TOLERANCE: f64 = 1e-29;
const START_JITTER: f64 = 1e-9;

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        let s = Dd::from_f64(self.hi.sqrt());
        s + (self - s * s) / (s * Dd::from_f64(2.0))
    }

    pub fn powi(self, n: u32) -> Self {
        let mut acc = Dd::ONE;
        let mut base = self;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, y: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, y.hi);
        let (t, f) = two_sum(self.lo, y.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, y: Dd) -> Dd {
        self + (-y)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, y: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, y.hi);
        let e = e + (self.hi * y.lo + self.lo * y.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, y: Dd) -> Dd {
        let q1 = self.hi / y.hi;
        let r = self - y * Dd::from_f64(q1);
        let q2 = r.hi / y.hi;
        let r = r - y * Dd::from_f64(q2);
        let q3 = r.hi / y.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from_f64(q3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub const ZERO: DdComplex = DdComplex {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };
    pub const ONE: DdComplex = DdComplex {
        re: Dd::ONE,
        im: Dd::ZERO,
    };

    pub fn new(re: Dd, im: Dd) -> Self {
        DdComplex { re, im }
    }

    pub fn from_c64(z: C64) -> Self {
        DdComplex::new(Dd::from_f64(z.re), Dd::from_f64(z.im))
    }

    pub fn from_real(x: Dd) -> Self {
        DdComplex::new(x, Dd::ZERO)
    }

    pub fn to_c64(self) -> C64 {
        C64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn conj(self) -> Self {
        DdComplex::new(self.re, -self.im)
    }

    pub fn norm_sqr(self) -> Dd {
        self.re * self.re + self.im * self.im
    }

    pub fn scale(self, k: Dd) -> Self {
        DdComplex::new(self.re * k, self.im * k)
    }
}

impl Add for DdComplex {
    type Output = DdComplex;
    fn add(self, y: DdComplex) -> DdComplex {
        DdComplex::new(self.re + y.re, self.im + y.im)
    }
}

impl Sub for DdComplex {
    type Output = DdComplex;
    fn sub(self, y: DdComplex) -> DdComplex {
        DdComplex::new(self.re - y.re, self.im - y.im)
    }
}

impl Mul for DdComplex {
    type Output = DdComplex;
    fn mul(self, y: DdComplex) -> DdComplex {
        DdComplex::new(self.re * y.re - self.im * y.im, self.re * y.im + self.im * y.re)
    }
}

impl Div for DdComplex {
    type Output = DdComplex;
    fn div(self, y: DdComplex) -> DdComplex {
        let d = y.norm_sqr();
        let n = self * y.conj();
        DdComplex::new(n.re / d, n.im / d)
    }
}

/// Value and derivative of `Σ c_k z^k` by Horner's rule.
fn horner(coefficients: &[DdComplex], z: DdComplex) -> (DdComplex, DdComplex) {
    let mut p = DdComplex::ZERO;
    let mut dp = DdComplex::ZERO;
    for &c in coefficients.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn magnitude_bound(coefficients: &[DdComplex], r: f64) -> f64 {
    coefficients
        .iter()
        .rev()
        .fold(0.0, |acc, c| acc * r + c.to_c64().norm())
}

/// Aberth–Ehrlich iteration in double-double, started from `start` (one
/// approximation per root of a polynomial of exact degree `start.len()`).
pub fn polish_roots(coefficients: &[DdComplex], start: &[C64]) -> Result<Vec<C64>> {
    if coefficients.len() != start.len() + 1 {
        return Err(Error::domain(format!(
            "{} starting points for a polynomial with {} coefficients",
            start.len(),
            coefficients.len()
        )));
    }
    // Coincident starting points would make the repulsion term singular.
    let mut z: Vec<DdComplex> = start
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            let jitter = C64::from_polar(START_JITTER * s.norm().max(1.0), 2.399963 * k as f64);
            DdComplex::from_c64(s + jitter)
        })
        .collect();
    let mut done = vec![false; z.len()];
    for _ in 0..MAX_ITERATIONS {
        for i in 0..z.len() {
            if done[i] {
                continue;
            }
            let (p, dp) = horner(coefficients, z[i]);
            let scale = magnitude_bound(coefficients, z[i].to_c64().norm());
            if p.norm_sqr().hi.sqrt() <= BACKWARD_TOLERANCE * scale {
                done[i] = true;
                continue;
            }
            let ratio = p / dp;
            let mut repulsion = DdComplex::ZERO;
            for (j, &zj) in z.iter().enumerate() {
                if j != i {
                    repulsion = repulsion + DdComplex::ONE / (z[i] - zj);
                }
            }
            let step = ratio / (DdComplex::ONE - ratio * repulsion);
            let size = z[i].norm_sqr().hi.sqrt().max(1.0);
            if step.norm_sqr().hi.sqrt() < STEP_TOLERANCE * size {
                done[i] = true;
            }
            z[i] = z[i] - step;
        }
        if done.iter().all(|&d| d) {
            return Ok(z.into_iter().map(DdComplex::to_c64).collect());
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITERATIONS,
        context: "double-double root polishing".into(),
    })
}
