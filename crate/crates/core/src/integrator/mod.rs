//! The generic r-stage functionally-fitted energy-preserving step, its
//! fixed-point solver, dense output and multi-step driver.

mod plan;
mod step;
mod system;
mod trajectory;

pub use plan::{plan_step, StepPlan};
pub(crate) use step::iterate;
pub use step::{fixed_point_step, OneStepMethod, StepResult};
pub use system::{validate_system, FnSystem, PoissonSystem};
pub use trajectory::{integrate, Trajectory};

use crate::error::{Error, Result};

/// What to do when the iteration budget runs out before `fp_tol` is met.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NonConvergencePolicy {
    Error,
    #[default]
    AcceptWithFlag,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Stop once the max-norm fixed-point update falls to this value.
    pub fp_tol: f64,
    pub fp_max_iter: usize,
    pub nonconvergence_policy: NonConvergencePolicy,
    /// Quadrature size; `None` picks the function-space default.
    pub quad_points: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            fp_tol: 1e-15,
            fp_max_iter: 100,
            nonconvergence_policy: NonConvergencePolicy::AcceptWithFlag,
            quad_points: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.fp_tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "fp_tol must be positive, got {}",
                self.fp_tol
            )));
        }
        if self.fp_max_iter == 0 {
            return Err(Error::InvalidArgument(
                "fp_max_iter must be at least 1".into(),
            ));
        }
        if let Some(s) = self.quad_points {
            if s == 0 || s > crate::numeric::MAX_POINTS {
                return Err(Error::InvalidArgument(format!(
                    "quad_points {s} out of range"
                )));
            }
        }
        Ok(())
    }
}
