//! Finite-difference stencils.

/// Central first derivative `(f(x+h) - f(x-h)) / 2h`.
pub fn central_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Central second derivative `(f(x+h) - 2f(x) + f(x-h)) / h²`.
pub fn second_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

/// Five-point Laplacian `∂²/∂x² + ∂²/∂y²` at `(x, y)`.
pub fn laplacian_5pt(f: impl Fn(f64, f64) -> f64, x: f64, y: f64, h: f64) -> f64 {
    let centre = f(x, y);
    (f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4.0 * centre) / (h * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomials_are_exact_up_to_rounding() {
        let f = |x: f64| 3.0 * x * x - 2.0 * x + 1.0;
        assert_relative_eq!(central_difference(f, 0.7, 1e-4), 2.2, max_relative = 1e-9);
        assert_relative_eq!(second_difference(f, 0.7, 1e-3), 6.0, max_relative = 1e-6);
        let g = |x: f64, y: f64| x * x + 2.0 * y * y;
        assert_relative_eq!(laplacian_5pt(g, 0.3, -0.4, 1e-3), 6.0, max_relative = 1e-6);
    }
}
