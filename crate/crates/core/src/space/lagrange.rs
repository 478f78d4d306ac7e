use super::{default_quad_points, sin_ratio, FunctionSpace, ScaledBasis};
use crate::error::{Error, Result};
use crate::numeric::{gauss_legendre_rule, invert_dense, DenseMatrix, QuadratureRule};

const MIN_NODE_GAP: f64 = 1e-8;
/// `|cos(v d̂)|` below this leaves the trig interpolation problem singular.
const TRIG_SINGULAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
enum Repr {
    /// Classical product form; integrals by an exact Gauss rule.
    Polynomial { exact: QuadratureRule },
    /// `l̂₁(τ) = cos(vτ) / cos(v d̂₁)`.
    Trig { v: f64, cos_vd: f64 },
    /// `(l̂₁ … l̂_r) = (φ̃₀ … φ̃_{r−1}) M⁻¹`, `M_{ji} = φ̃_i(d̂_j)`.
    General {
        basis: ScaledBasis,
        inverse: DenseMatrix,
        rule: QuadratureRule,
    },
}

/// Generalized Lagrange basis of `Y_h` at distinct nodes `d̂_1, …, d̂_r`.
#[derive(Debug, Clone)]
pub struct LagrangeBasis {
    nodes: Vec<f64>,
    repr: Repr,
}

/// Gauss–Legendre nodes on `[0, 1]`; for `r = 1` this is `{1/2}`.
pub fn default_nodes(r: usize) -> Result<Vec<f64>> {
    Ok(gauss_legendre_rule(r)?.nodes().to_vec())
}

pub fn lagrange_basis(basis: &ScaledBasis, nodes: &[f64]) -> Result<LagrangeBasis> {
    let r = basis.dim();
    if nodes.len() != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            got: nodes.len(),
        });
    }
    if let Some(d) = nodes.iter().find(|d| !(0.0..=1.0).contains(*d)) {
        return Err(Error::InvalidArgument(format!("node {d} outside [0, 1]")));
    }
    for i in 0..r {
        for j in 0..i {
            if (nodes[i] - nodes[j]).abs() < MIN_NODE_GAP {
                return Err(Error::InvalidArgument(format!(
                    "nodes {} and {} are not distinct",
                    nodes[j], nodes[i]
                )));
            }
        }
    }

    let repr = match basis.space() {
        FunctionSpace::Polynomial { .. } => Repr::Polynomial {
            exact: gauss_legendre_rule(r)?,
        },
        FunctionSpace::TrigCos { .. } => {
            let v = basis.v().unwrap_or(0.0);
            let cos_vd = (v * nodes[0]).cos();
            if cos_vd.abs() < TRIG_SINGULAR_TOL {
                return Err(Error::SingularInterpolation(format!(
                    "cos(v*d) = {cos_vd:e} vanishes for v = {v}, d = {}",
                    nodes[0]
                )));
            }
            Repr::Trig { v, cos_vd }
        }
        FunctionSpace::Custom { .. } => {
            let m = DenseMatrix::from_fn(r, r, |j, i| basis.eval(i, nodes[j]));
            let inverse = invert_dense(&m).map_err(|e| {
                Error::SingularInterpolation(format!(
                    "node-evaluation matrix of {} at h = {} and nodes {nodes:?}: {e}",
                    basis.space().label(),
                    basis.h()
                ))
            })?;
            Repr::General {
                basis: basis.clone(),
                inverse,
                rule: gauss_legendre_rule(default_quad_points(basis))?,
            }
        }
    };
    Ok(LagrangeBasis {
        nodes: nodes.to_vec(),
        repr,
    })
}

impl LagrangeBasis {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    /// `l̂_i(τ)`, zero-based `i`.
    pub fn eval(&self, i: usize, tau: f64) -> f64 {
        match &self.repr {
            Repr::Polynomial { .. } => self
                .nodes
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &dj)| (tau - dj) / (self.nodes[i] - dj))
                .product(),
            Repr::Trig { v, cos_vd } => (v * tau).cos() / cos_vd,
            Repr::General { basis, inverse, .. } => (0..self.dim())
                .map(|k| basis.eval(k, tau) * inverse[(k, i)])
                .sum(),
        }
    }

    /// `a_{τ,i} = ∫₀^τ l̂_i(α) dα`.
    pub fn integral(&self, i: usize, tau: f64) -> f64 {
        match &self.repr {
            Repr::Polynomial { exact } => exact.integrate_to(tau, |a| self.eval(i, a)),
            Repr::Trig { v, cos_vd } => sin_ratio(*v, tau) / cos_vd,
            Repr::General { rule, .. } => rule.integrate_to(tau, |a| self.eval(i, a)),
        }
    }
}

pub fn lagrange_integral(lb: &LagrangeBasis, tau: f64, i: usize) -> f64 {
    lb.integral(i, tau)
}
