//! Numeric kernels shared by every other module.

mod combinatorics;
mod dd;
mod diff;
mod linalg;
mod roots;

pub use combinatorics::{ln_factorial, log_binomial, log_sum_exp};
pub use dd::{polish_roots, Dd, DdComplex};
pub use diff::{central_difference, laplacian_5pt, second_difference};
pub use linalg::{
    check_hermitian, exp_i_hermitian, hermitian_eigen, hermitian_spectrum, singular_values, HermitianEigen,
    HERMITIAN_TOLERANCE,
};
pub use roots::{
    cluster_roots, polynomial_roots, ComplexPolynomial, PolynomialRoots, RootCluster, CLUSTER_TOLERANCE,
    TRIM_TOLERANCE,
};
