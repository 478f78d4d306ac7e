use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Dense row-major matrix used for the interpolation and stage systems.
pub type DenseMatrix = DMatrix<f64>;

pub const MAX_DIM: usize = 64;

/// Pivots smaller than this fraction of `‖A‖∞` mark the matrix singular.
pub const SINGULAR_RTOL: f64 = 1e-14;

pub fn norm_inf(a: &DenseMatrix) -> f64 {
    a.row_iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn check_square(a: &DenseMatrix) -> Result<usize> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::InvalidArgument(format!(
            "expected a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if n == 0 || n > MAX_DIM {
        return Err(Error::InvalidArgument(format!(
            "matrix order {n} outside 1..={MAX_DIM}"
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "matrix has non-finite entries".into(),
        ));
    }
    Ok(n)
}

fn factor(a: &DenseMatrix) -> Result<nalgebra::linalg::LU<f64, nalgebra::Dyn, nalgebra::Dyn>> {
    let n = check_square(a)?;
    let threshold = SINGULAR_RTOL * norm_inf(a);
    let lu = a.clone().lu();
    let u = lu.u();
    let pivot = (0..n)
        .map(|i| u[(i, i)].abs())
        .fold(f64::INFINITY, f64::min);
    if pivot <= threshold || pivot == 0.0 {
        return Err(Error::SingularMatrix { pivot, threshold });
    }
    Ok(lu)
}

/// Solves `A x = b` by LU factorisation with partial pivoting.
pub fn solve_dense(a: &DenseMatrix, b: &DVector<f64>) -> Result<DVector<f64>> {
    if b.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: b.len(),
        });
    }
    let lu = factor(a)?;
    lu.solve(b).ok_or(Error::SingularMatrix {
        pivot: 0.0,
        threshold: 0.0,
    })
}

pub fn invert_dense(a: &DenseMatrix) -> Result<DenseMatrix> {
    let lu = factor(a)?;
    lu.try_inverse().ok_or(Error::SingularMatrix {
        pivot: 0.0,
        threshold: 0.0,
    })
}
