use nalgebra::DVector;

use super::SolverConfig;
use crate::error::{Error, Result};
use crate::numeric::{gauss_legendre_rule, DenseMatrix, QuadratureRule};
use crate::space::{
    default_quad_points, lagrange_basis, projection_kernel, scale_basis, FunctionSpace,
    LagrangeBasis, OrthonormalBasis,
};

/// Precomputed tableau of one step of size `h`.
///
/// With Lagrange integrals `a_{τ,i}` and kernel samples `P(d̂_i, c_j)` the
/// step reads
///
/// ```text
/// y_τ = y₀ + Σ_i a_{τ,i} X_i
/// X_i = h B(y_{d̂_i}) Σ_j b_j P(d̂_i, c_j) ∇H(y_{c_j})
/// ```
#[derive(Debug, Clone)]
pub struct StepPlan {
    h: f64,
    nodes: Vec<f64>,
    rule: QuadratureRule,
    /// `a_{d̂_j, i}` at `(j, i)`.
    a_nodes: DenseMatrix,
    /// `a_{c_j, i}` at `(j, i)`.
    a_quad: DenseMatrix,
    a_one: Vec<f64>,
    /// `P(d̂_i, c_j)` at `(i, j)`.
    kernel: DenseMatrix,
    /// `b_j P(d̂_i, c_j)`.
    weighted_kernel: DenseMatrix,
    onb: OrthonormalBasis,
    lagrange: LagrangeBasis,
    space_label: String,
}

pub fn plan_step(
    space: &FunctionSpace,
    nodes: &[f64],
    h: f64,
    cfg: &SolverConfig,
) -> Result<StepPlan> {
    cfg.validate()?;
    let basis = scale_basis(space, h)?;
    let r = basis.dim();
    let s = cfg
        .quad_points
        .unwrap_or_else(|| default_quad_points(&basis));
    let rule = gauss_legendre_rule(s)?;
    // inner products need at least max(2r, 10) points even if the stage rule is coarser
    let gram_rule = if s >= (2 * r).max(10) {
        rule.clone()
    } else {
        gauss_legendre_rule((2 * r).max(10))?
    };
    let onb = OrthonormalBasis::preferred(&basis, &gram_rule)?;
    let lagrange = lagrange_basis(&basis, nodes)?;

    let a_nodes = DenseMatrix::from_fn(r, r, |j, i| lagrange.integral(i, nodes[j]));
    let a_quad = DenseMatrix::from_fn(s, r, |j, i| lagrange.integral(i, rule.nodes()[j]));
    let a_one: Vec<f64> = (0..r).map(|i| lagrange.integral(i, 1.0)).collect();
    let kernel = DenseMatrix::from_fn(r, s, |i, j| {
        projection_kernel(&onb, nodes[i], rule.nodes()[j])
    });
    let weighted_kernel = DenseMatrix::from_fn(r, s, |i, j| rule.weights()[j] * kernel[(i, j)]);

    let finite = a_nodes
        .iter()
        .chain(a_quad.iter())
        .chain(&a_one)
        .chain(kernel.iter());
    if finite.into_iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "step tableau for {} at h = {h} has non-finite entries",
            space.label()
        )));
    }

    Ok(StepPlan {
        h,
        nodes: nodes.to_vec(),
        rule,
        a_nodes,
        a_quad,
        a_one,
        kernel,
        weighted_kernel,
        onb,
        lagrange,
        space_label: space.label(),
    })
}

impl StepPlan {
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn stages(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn a_nodes(&self) -> &DenseMatrix {
        &self.a_nodes
    }

    pub fn a_quad(&self) -> &DenseMatrix {
        &self.a_quad
    }

    pub fn a_one(&self) -> &[f64] {
        &self.a_one
    }

    pub fn kernel(&self) -> &DenseMatrix {
        &self.kernel
    }

    pub(crate) fn weighted_kernel(&self) -> &DenseMatrix {
        &self.weighted_kernel
    }

    pub fn orthonormal_basis(&self) -> &OrthonormalBasis {
        &self.onb
    }

    pub fn lagrange(&self) -> &LagrangeBasis {
        &self.lagrange
    }

    pub fn space_label(&self) -> &str {
        &self.space_label
    }

    /// `y₀ + Σ_i coeffs[i] X_i`.
    pub(crate) fn combine(
        y0: &DVector<f64>,
        coeffs: impl Iterator<Item = f64>,
        stages: &[DVector<f64>],
    ) -> DVector<f64> {
        let mut y = y0.clone();
        for (a, x) in coeffs.zip(stages) {
            y.axpy(a, x, 1.0);
        }
        y
    }

    /// Continuous output `y_τ` inside the step.
    pub fn dense_eval(&self, y0: &DVector<f64>, stages: &[DVector<f64>], tau: f64) -> DVector<f64> {
        if tau == 1.0 {
            return Self::combine(y0, self.a_one.iter().copied(), stages);
        }
        Self::combine(
            y0,
            (0..self.stages()).map(|i| self.lagrange.integral(i, tau)),
            stages,
        )
    }
}
