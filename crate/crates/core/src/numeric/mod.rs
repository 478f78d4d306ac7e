//! Small dense numerics: Gauss–Legendre quadrature on `[0, 1]` and LU solves.

mod linalg;
mod quadrature;

pub use linalg::{invert_dense, norm_inf, solve_dense, DenseMatrix, SINGULAR_RTOL};
pub use quadrature::{gauss_legendre_rule, QuadratureRule, MAX_POINTS};
