use nalgebra::DVector;

use super::{NonConvergencePolicy, PoissonSystem, SolverConfig, StepPlan};
use crate::error::{Error, Result};

/// Output of one step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub y1: DVector<f64>,
    /// The stage vectors `X_1, …, X_r`.
    pub stages: Vec<DVector<f64>>,
    pub iterations: usize,
    /// Max-norm of the last fixed-point update.
    pub residual: f64,
    pub converged: bool,
}

/// A one-step energy-preserving method with a fixed step size.
pub trait OneStepMethod: Send + Sync {
    fn h(&self) -> f64;

    fn step(
        &self,
        sys: &dyn PoissonSystem,
        y0: &DVector<f64>,
        cfg: &SolverConfig,
    ) -> Result<StepResult>;

    /// Continuous output `y_τ`, `τ ∈ [0, 1]`, of a completed step.
    fn dense(&self, y0: &DVector<f64>, result: &StepResult, tau: f64) -> DVector<f64>;

    fn label(&self) -> String;
}

pub(crate) struct Iterate {
    pub value: Vec<DVector<f64>>,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// Fixed-point iteration `x ← map(x)` from `initial`, shared by the generic
/// step and the closed-form presets.
pub(crate) fn iterate<F>(
    initial: Vec<DVector<f64>>,
    cfg: &SolverConfig,
    mut map: F,
) -> Result<Iterate>
where
    F: FnMut(&[DVector<f64>]) -> Vec<DVector<f64>>,
{
    let mut x = initial;
    let mut residual = f64::INFINITY;
    for k in 1..=cfg.fp_max_iter {
        let next = map(&x);
        if next.iter().any(|v| v.iter().any(|c| !c.is_finite())) {
            return Err(Error::Divergence { iteration: k });
        }
        residual = next
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).amax())
            .fold(0.0, f64::max);
        x = next;
        if residual <= cfg.fp_tol {
            return Ok(Iterate {
                value: x,
                iterations: k,
                residual,
                converged: true,
            });
        }
    }
    match cfg.nonconvergence_policy {
        NonConvergencePolicy::Error => Err(Error::NonConvergence {
            iterations: cfg.fp_max_iter,
            residual,
        }),
        NonConvergencePolicy::AcceptWithFlag => Ok(Iterate {
            value: x,
            iterations: cfg.fp_max_iter,
            residual,
            converged: false,
        }),
    }
}

pub(crate) fn check_dim(sys: &dyn PoissonSystem, y0: &DVector<f64>) -> Result<()> {
    if y0.len() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            got: y0.len(),
        });
    }
    Ok(())
}

/// Solves the stage equations of `plan` by fixed-point iteration on the
/// stage vectors, starting from `X = 0`.
pub fn fixed_point_step(
    plan: &StepPlan,
    sys: &dyn PoissonSystem,
    y0: &DVector<f64>,
    cfg: &SolverConfig,
) -> Result<StepResult> {
    check_dim(sys, y0)?;
    let r = plan.stages();
    let s = plan.rule().len();
    let h = plan.h();
    let a_nodes = plan.a_nodes();
    let a_quad = plan.a_quad();
    let wk = plan.weighted_kernel();

    let map = |x: &[DVector<f64>]| -> Vec<DVector<f64>> {
        let grads: Vec<DVector<f64>> = (0..s)
            .map(|j| sys.gradient(&StepPlan::combine(y0, (0..r).map(|i| a_quad[(j, i)]), x)))
            .collect();
        (0..r)
            .map(|i| {
                let y_stage = StepPlan::combine(y0, (0..r).map(|k| a_nodes[(i, k)]), x);
                let mut g = DVector::zeros(y0.len());
                for (j, grad) in grads.iter().enumerate() {
                    g.axpy(wk[(i, j)], grad, 1.0);
                }
                sys.structure_matrix(&y_stage) * g * h
            })
            .collect()
    };

    let out = iterate(vec![DVector::zeros(y0.len()); r], cfg, map)?;
    let y1 = StepPlan::combine(y0, plan.a_one().iter().copied(), &out.value);
    Ok(StepResult {
        y1,
        stages: out.value,
        iterations: out.iterations,
        residual: out.residual,
        converged: out.converged,
    })
}

impl OneStepMethod for StepPlan {
    fn h(&self) -> f64 {
        StepPlan::h(self)
    }

    fn step(
        &self,
        sys: &dyn PoissonSystem,
        y0: &DVector<f64>,
        cfg: &SolverConfig,
    ) -> Result<StepResult> {
        fixed_point_step(self, sys, y0, cfg)
    }

    fn dense(&self, y0: &DVector<f64>, result: &StepResult, tau: f64) -> DVector<f64> {
        self.dense_eval(y0, &result.stages, tau)
    }

    fn label(&self) -> String {
        format!("ffep[{}; r={}]", self.space_label(), self.stages())
    }
}
