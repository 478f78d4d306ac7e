//! Fitting spaces `Y = span{φ₀, …, φ_{r−1}}`, their step-scaled versions on
//! `[0, 1]`, orthonormal bases and the projection kernel, and generalized
//! Lagrange bases with their integrals.

mod lagrange;
mod legendre;
mod orthonormal;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::numeric::gauss_legendre_rule;

pub use lagrange::{default_nodes, lagrange_basis, lagrange_integral, LagrangeBasis};
pub use legendre::shifted_legendre;
pub use orthonormal::{orthonormalize, projection_kernel, OrthonormalBasis};

pub const MAX_POLYNOMIAL_DIM: usize = 12;

/// Gram matrices (unit-diagonal scaled) with a smaller eigenvalue are
/// treated as linearly dependent.
pub const INDEPENDENCE_TOL: f64 = 1e-10;

/// Below this `|v|` trigonometric closed forms switch to Taylor expansions.
pub const SMALL_V: f64 = 1e-6;

pub type BasisFn = Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>;

/// A finite-dimensional fitting space `Y` on `[0, T]`.
#[derive(Clone)]
pub enum FunctionSpace {
    /// Monomials `1, t, …, t^{r−1}`.
    Polynomial { r: usize },
    /// The one-dimensional space spanned by `cos(ωt)`.
    TrigCos { omega: f64 },
    /// User supplied basis `φ_i(t) = eval(i, t)`.
    Custom { r: usize, eval: BasisFn },
}

impl fmt::Debug for FunctionSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Polynomial { r } => f.debug_struct("Polynomial").field("r", r).finish(),
            Self::TrigCos { omega } => f.debug_struct("TrigCos").field("omega", omega).finish(),
            Self::Custom { r, .. } => f
                .debug_struct("Custom")
                .field("r", r)
                .finish_non_exhaustive(),
        }
    }
}

pub fn make_polynomial_space(r: usize) -> Result<FunctionSpace> {
    if r == 0 || r > MAX_POLYNOMIAL_DIM {
        return Err(Error::InvalidArgument(format!(
            "polynomial space dimension {r} outside 1..={MAX_POLYNOMIAL_DIM}"
        )));
    }
    Ok(FunctionSpace::Polynomial { r })
}

pub fn make_trig_cos_space(omega: f64) -> Result<FunctionSpace> {
    if !omega.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "frequency {omega} is not finite"
        )));
    }
    Ok(FunctionSpace::TrigCos { omega })
}

/// Builds a space from an arbitrary basis, checking independence on `[0, 1]`.
pub fn make_custom_space(r: usize, eval: BasisFn) -> Result<FunctionSpace> {
    if r == 0 {
        return Err(Error::InvalidArgument("custom space needs r >= 1".into()));
    }
    let space = FunctionSpace::Custom { r, eval };
    let lambda = space.scaled_gram_min_eigenvalue()?;
    if lambda.is_nan() || lambda <= INDEPENDENCE_TOL {
        return Err(Error::DegenerateBasis {
            index: r - 1,
            ratio: lambda,
        });
    }
    Ok(space)
}

impl FunctionSpace {
    pub fn dim(&self) -> usize {
        match self {
            Self::Polynomial { r } | Self::Custom { r, .. } => *r,
            Self::TrigCos { .. } => 1,
        }
    }

    /// `φ_i(t)`.
    pub fn eval(&self, i: usize, t: f64) -> f64 {
        match self {
            Self::Polynomial { .. } => t.powi(i as i32),
            Self::TrigCos { omega } => (omega * t).cos(),
            Self::Custom { eval, .. } => eval(i, t),
        }
    }

    pub fn omega(&self) -> Option<f64> {
        match self {
            Self::TrigCos { omega } => Some(*omega),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Polynomial { r } => format!("polynomial(r={r})"),
            Self::TrigCos { omega } => format!("trig-cos(omega={omega})"),
            Self::Custom { r, .. } => format!("custom(r={r})"),
        }
    }

    /// Smallest eigenvalue of the Gram matrix on `[0, 1]` after scaling it to
    /// unit diagonal.
    pub fn scaled_gram_min_eigenvalue(&self) -> Result<f64> {
        let r = self.dim();
        let rule = gauss_legendre_rule((2 * r).clamp(10, crate::numeric::MAX_POINTS))?;
        let mut gram = DMatrix::<f64>::zeros(r, r);
        for i in 0..r {
            for j in 0..=i {
                let g = rule.integrate(|t| self.eval(i, t) * self.eval(j, t));
                if !g.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "basis function {i} or {j} is not finite on [0, 1]"
                    )));
                }
                gram[(i, j)] = g;
                gram[(j, i)] = g;
            }
        }
        let diag: Vec<f64> = (0..r).map(|i| gram[(i, i)]).collect();
        if let Some(i) = diag.iter().position(|&d| d <= 0.0) {
            return Err(Error::DegenerateBasis {
                index: i,
                ratio: 0.0,
            });
        }
        let scaled = DMatrix::from_fn(r, r, |i, j| gram[(i, j)] / (diag[i] * diag[j]).sqrt());
        let eig = SymmetricEigen::new(scaled);
        Ok(eig
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min))
    }
}

/// The space `Y_h` on `[0, 1]` with `φ̃_i(τ) = φ_i(τh)`.
#[derive(Debug, Clone)]
pub struct ScaledBasis {
    space: FunctionSpace,
    h: f64,
}

/// `h = 0` is accepted: polynomial and trigonometric spaces have a well
/// defined limit there, and it gives the trivial step.
pub fn scale_basis(space: &FunctionSpace, h: f64) -> Result<ScaledBasis> {
    if !(h.is_finite() && h >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step size {h} must be finite and >= 0"
        )));
    }
    Ok(ScaledBasis {
        space: space.clone(),
        h,
    })
}

impl ScaledBasis {
    pub fn space(&self) -> &FunctionSpace {
        &self.space
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn eval(&self, i: usize, tau: f64) -> f64 {
        self.space.eval(i, tau * self.h)
    }

    /// `v = ωh` for the trigonometric space.
    pub fn v(&self) -> Option<f64> {
        self.space.omega().map(|w| w * self.h)
    }

    /// Whether the constant function lies in `Y_h`.
    pub fn contains_constants(&self) -> bool {
        match self.space {
            FunctionSpace::Polynomial { .. } => true,
            FunctionSpace::TrigCos { .. } => self.v() == Some(0.0),
            FunctionSpace::Custom { .. } => false,
        }
    }
}

/// Quadrature size used for inner products and stage integrals:
/// `max(2r, 10)`, raised to `4⌈|v|/π⌉ + 6` for oscillatory trig spaces.
pub fn default_quad_points(basis: &ScaledBasis) -> usize {
    let r = basis.dim();
    let mut s = (2 * r).max(10);
    if let Some(v) = basis.v() {
        s = s.max(4 * (v.abs() / PI).ceil() as usize + 6);
    }
    s.min(crate::numeric::MAX_POINTS)
}

/// `sin(vτ)/v`, continuous at `v = 0`.
pub(crate) fn sin_ratio(v: f64, tau: f64) -> f64 {
    if v.abs() < SMALL_V {
        let x2 = (v * tau).powi(2);
        tau * (1.0 - x2 / 6.0 + x2 * x2 / 120.0)
    } else {
        (v * tau).sin() / v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_space_values() {
        let p1 = make_polynomial_space(1).unwrap();
        assert_eq!(p1.eval(0, 0.37), 1.0);
        let p3 = make_polynomial_space(3).unwrap();
        assert_eq!(p3.eval(2, 0.5), 0.25);
        let p2 = make_polynomial_space(2).unwrap();
        assert!(p2.scaled_gram_min_eigenvalue().unwrap() > INDEPENDENCE_TOL);
        assert!(make_polynomial_space(0).is_err());
        assert!(make_polynomial_space(13).is_err());
    }

    #[test]
    fn trig_space_values() {
        let s0 = make_trig_cos_space(0.0).unwrap();
        assert_eq!(s0.eval(0, 3.1), 1.0);
        let tp = 7.450563209330954;
        let s = make_trig_cos_space(2.0 * PI / tp).unwrap();
        assert_eq!(s.eval(0, 0.0), 1.0);
        let s50 = make_trig_cos_space(50.0).unwrap();
        assert!(s50.eval(0, PI / 100.0).abs() <= 1e-15);
        assert!(make_trig_cos_space(f64::NAN).is_err());
    }

    #[test]
    fn scaling_follows_definition() {
        let p2 = make_polynomial_space(2).unwrap();
        let b = scale_basis(&p2, 0.5).unwrap();
        assert_eq!(b.eval(1, 1.0), 0.5);
        let t = make_trig_cos_space(2.0).unwrap();
        let bt = scale_basis(&t, 0.5).unwrap();
        assert_eq!(bt.eval(0, 1.0), 1f64.cos());
        for space in [p2, t] {
            let b = scale_basis(&space, 0.3).unwrap();
            for i in 0..space.dim() {
                assert_eq!(b.eval(i, 0.0), space.eval(i, 0.0));
                assert_eq!(b.eval(i, 0.7), space.eval(i, 0.7 * 0.3));
            }
        }
        assert!(scale_basis(&make_polynomial_space(1).unwrap(), -1.0).is_err());
    }

    #[test]
    fn custom_space_rejects_dependent_basis() {
        let dup: BasisFn = Arc::new(|i, t| if i == 0 { t } else { 2.0 * t });
        assert!(matches!(
            make_custom_space(2, dup),
            Err(Error::DegenerateBasis { .. })
        ));
        let ok: BasisFn = Arc::new(|i, t| (i as f64 * t).exp());
        assert!(make_custom_space(2, ok).is_ok());
    }

    #[test]
    fn quad_points_grow_with_frequency() {
        let poly = scale_basis(&make_polynomial_space(6).unwrap(), 0.1).unwrap();
        assert_eq!(default_quad_points(&poly), 12);
        let trig = scale_basis(&make_trig_cos_space(50.0).unwrap(), 0.2).unwrap();
        assert_eq!(default_quad_points(&trig), 4 * 4 + 6);
    }

    #[test]
    fn sin_ratio_is_continuous_at_zero() {
        assert_eq!(sin_ratio(0.0, 0.3), 0.3);
        let a = sin_ratio(0.999e-6, 0.8);
        let b = sin_ratio(1.001e-6, 0.8);
        assert!((a - b).abs() < 1e-15);
    }
}
