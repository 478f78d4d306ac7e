use nalgebra::DVector;

use super::legendre::legendre_all;
use super::{FunctionSpace, ScaledBasis};
use crate::error::{Error, Result};
use crate::numeric::{DenseMatrix, QuadratureRule};

/// Residual norms below this fraction of the original norm are degenerate.
const DEGENERATE_RATIO: f64 = 1e-10;
/// A projection coefficient above this (relative) triggers a second sweep.
const REORTH_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone)]
enum Repr {
    ShiftedLegendre,
    /// Row `i` holds the coefficients of `ψ̃_i` in the `φ̃` basis.
    Combination(DenseMatrix),
}

/// An orthonormal basis `ψ̃_0, …, ψ̃_{r−1}` of `Y_h` under
/// `⟨u, w⟩ = ∫₀¹ u(τ) w(τ) dτ`, the integral taken with `gram_rule`.
#[derive(Debug, Clone)]
pub struct OrthonormalBasis {
    basis: ScaledBasis,
    gram_rule: QuadratureRule,
    repr: Repr,
}

/// Modified Gram–Schmidt of the scaled basis under the quadrature inner
/// product, with one reorthogonalisation sweep when a projection is large.
pub fn orthonormalize(basis: &ScaledBasis, rule: &QuadratureRule) -> Result<OrthonormalBasis> {
    let r = basis.dim();
    let need = (2 * r).max(10);
    if rule.len() < need {
        return Err(Error::InvalidArgument(format!(
            "inner-product rule has {} points, need at least {need}",
            rule.len()
        )));
    }
    let sqrt_w: Vec<f64> = rule.weights().iter().map(|w| w.sqrt()).collect();
    let sample = |k: usize| {
        DVector::from_iterator(
            rule.len(),
            rule.nodes()
                .iter()
                .zip(&sqrt_w)
                .map(|(&c, &sw)| sw * basis.eval(k, c)),
        )
    };

    let mut qs: Vec<DVector<f64>> = Vec::with_capacity(r);
    let mut coeffs = DenseMatrix::zeros(r, r);
    for k in 0..r {
        let mut w = sample(k);
        let original = w.norm();
        if !original.is_finite() || original == 0.0 {
            return Err(Error::DegenerateBasis {
                index: k,
                ratio: 0.0,
            });
        }
        let mut c = DVector::<f64>::zeros(r);
        c[k] = 1.0;
        for sweep in 0..2 {
            let mut largest = 0.0f64;
            for (i, q) in qs.iter().enumerate() {
                let p = q.dot(&w);
                largest = largest.max(p.abs() / original);
                w.axpy(-p, q, 1.0);
                for m in 0..r {
                    c[m] -= p * coeffs[(i, m)];
                }
            }
            if sweep == 0 && largest <= REORTH_THRESHOLD {
                break;
            }
        }
        let norm = w.norm();
        let ratio = norm / original;
        if ratio < DEGENERATE_RATIO {
            return Err(Error::DegenerateBasis { index: k, ratio });
        }
        w /= norm;
        c /= norm;
        qs.push(w);
        coeffs.row_mut(k).copy_from(&c.transpose());
    }
    Ok(OrthonormalBasis {
        basis: basis.clone(),
        gram_rule: rule.clone(),
        repr: Repr::Combination(coeffs),
    })
}

impl OrthonormalBasis {
    /// Shifted Legendre polynomials for polynomial spaces, Gram–Schmidt
    /// otherwise.
    pub fn preferred(basis: &ScaledBasis, rule: &QuadratureRule) -> Result<Self> {
        match basis.space() {
            FunctionSpace::Polynomial { .. } => Ok(Self {
                basis: basis.clone(),
                gram_rule: rule.clone(),
                repr: Repr::ShiftedLegendre,
            }),
            _ => orthonormalize(basis, rule),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn gram_rule(&self) -> &QuadratureRule {
        &self.gram_rule
    }

    pub fn basis(&self) -> &ScaledBasis {
        &self.basis
    }

    /// Coefficients of `ψ̃` in terms of `φ̃`, when built by Gram–Schmidt.
    pub fn coefficients(&self) -> Option<&DenseMatrix> {
        match &self.repr {
            Repr::Combination(c) => Some(c),
            Repr::ShiftedLegendre => None,
        }
    }

    /// `ψ̃_0(τ), …, ψ̃_{r−1}(τ)`.
    pub fn values(&self, tau: f64) -> Vec<f64> {
        let r = self.dim();
        match &self.repr {
            Repr::ShiftedLegendre => legendre_all(r, tau),
            Repr::Combination(c) => {
                let phi: Vec<f64> = (0..r).map(|k| self.basis.eval(k, tau)).collect();
                (0..r)
                    .map(|i| (0..=i).map(|k| c[(i, k)] * phi[k]).sum())
                    .collect()
            }
        }
    }

    pub fn psi(&self, i: usize, tau: f64) -> f64 {
        self.values(tau)[i]
    }
}

/// `P(τ, σ) = Σ_i ψ̃_i(τ) ψ̃_i(σ)`, the reproducing kernel of `Y_h`.
pub fn projection_kernel(onb: &OrthonormalBasis, tau: f64, sigma: f64) -> f64 {
    let a = onb.values(tau);
    let b = onb.values(sigma);
    a.iter().zip(&b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::super::{make_polynomial_space, make_trig_cos_space, scale_basis, shifted_legendre};
    use super::*;
    use crate::numeric::gauss_legendre_rule;

    fn grid(n: usize) -> impl Iterator<Item = f64> {
        (0..n).map(move |i| i as f64 / (n - 1) as f64)
    }

    #[test]
    fn gram_schmidt_recovers_shifted_legendre() {
        let space = make_polynomial_space(3).unwrap();
        for h in [0.01, 0.3, 1.0, 4.0] {
            let basis = scale_basis(&space, h).unwrap();
            let onb = orthonormalize(&basis, &gauss_legendre_rule(10).unwrap()).unwrap();
            for j in 0..3 {
                let sign = onb.psi(j, 1.0).signum() * shifted_legendre(j, 1.0).signum();
                let dev = grid(101)
                    .map(|t| (onb.psi(j, t) - sign * shifted_legendre(j, t)).abs())
                    .fold(0.0, f64::max);
                assert!(dev <= 1e-10, "h={h} j={j} dev={dev}");
            }
        }
    }

    #[test]
    fn constant_space_gives_unit_function() {
        let basis = scale_basis(&make_polynomial_space(1).unwrap(), 0.7).unwrap();
        let onb = orthonormalize(&basis, &gauss_legendre_rule(10).unwrap()).unwrap();
        for t in grid(11) {
            assert!((onb.psi(0, t) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn trig_psi_matches_analytic_normalisation() {
        let v: f64 = 1.0;
        let basis = scale_basis(&make_trig_cos_space(2.0).unwrap(), 0.5).unwrap();
        let onb = orthonormalize(&basis, &gauss_legendre_rule(10).unwrap()).unwrap();
        let norm = ((2.0 * v + (2.0 * v).sin()) / (4.0 * v)).sqrt();
        for t in grid(21) {
            assert!((onb.psi(0, t) - (v * t).cos() / norm).abs() < 1e-13);
        }
    }

    #[test]
    fn orthonormality_of_gram_schmidt_bases() {
        for r in 1..=6 {
            let space = make_polynomial_space(r).unwrap();
            for h in [0.01, 0.1, 1.0] {
                let basis = scale_basis(&space, h).unwrap();
                let rule = gauss_legendre_rule((2 * r).max(10)).unwrap();
                let onb = orthonormalize(&basis, &rule).unwrap();
                let vals: Vec<Vec<f64>> = rule.nodes().iter().map(|&c| onb.values(c)).collect();
                for i in 0..r {
                    for j in 0..r {
                        let g: f64 = rule
                            .weights()
                            .iter()
                            .zip(&vals)
                            .map(|(w, v)| w * v[i] * v[j])
                            .sum();
                        let want = if i == j { 1.0 } else { 0.0 };
                        assert!((g - want).abs() <= 1e-11, "r={r} h={h} ({i},{j}) {g}");
                    }
                }
            }
        }
    }

    #[test]
    fn short_rule_is_rejected() {
        let basis = scale_basis(&make_polynomial_space(2).unwrap(), 1.0).unwrap();
        assert!(orthonormalize(&basis, &gauss_legendre_rule(4).unwrap()).is_err());
    }

    #[test]
    fn kernel_closed_forms() {
        let rule = gauss_legendre_rule(10).unwrap();
        let b1 = scale_basis(&make_polynomial_space(1).unwrap(), 0.2).unwrap();
        let k1 = OrthonormalBasis::preferred(&b1, &rule).unwrap();
        let b2 = scale_basis(&make_polynomial_space(2).unwrap(), 0.2).unwrap();
        let k2 = OrthonormalBasis::preferred(&b2, &rule).unwrap();
        for t in grid(11) {
            for s in grid(11) {
                assert_eq!(projection_kernel(&k1, t, s), 1.0);
                let want = 1.0 + 3.0 * (2.0 * t - 1.0) * (2.0 * s - 1.0);
                assert!((projection_kernel(&k2, t, s) - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn kernel_is_bitwise_symmetric() {
        let rule = gauss_legendre_rule(12).unwrap();
        let basis = scale_basis(&make_polynomial_space(4).unwrap(), 0.3).unwrap();
        let onb = orthonormalize(&basis, &rule).unwrap();
        for t in grid(13) {
            for s in grid(7) {
                assert_eq!(
                    projection_kernel(&onb, t, s).to_bits(),
                    projection_kernel(&onb, s, t).to_bits()
                );
            }
        }
    }
}
