use statrs::function::gamma::ln_gamma;

use crate::{Error, Result};

const MAX_N: u64 = 1_000_000;
/// Below this `min(k, n-k)` the log-binomial is summed term by term; the
/// log-gamma difference loses relative accuracy when the result is small
/// compared with `ln Γ(n)`.
const DIRECT_SUM_LIMIT: u64 = 1000;

/// `ln n!`, via log-gamma.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        0.0
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

/// Natural log of the binomial coefficient `C(n, k)`.
pub fn log_binomial(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Err(Error::domain(format!("log_binomial: k = {k} exceeds n = {n}")));
    }
    if n > MAX_N {
        return Err(Error::domain(format!("log_binomial: n = {n} exceeds {MAX_N}")));
    }
    let k = k.min(n - k);
    if k == 0 {
        return Ok(0.0);
    }
    if k <= DIRECT_SUM_LIMIT {
        let base = (n - k) as f64;
        let sum = (1..=k)
            .map(|j| {
                let j = j as f64;
                (base / j).ln_1p()
            })
            .sum();
        return Ok(sum);
    }
    Ok(ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k))
}

/// `ln Σ exp(x_i)` without overflow. Returns `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp(xs: impl IntoIterator<Item = f64> + Clone) -> f64 {
    let max = xs.clone().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let sum: f64 = xs.into_iter().map(|x| (x - max).exp()).sum();
    max + sum.ln()
}
