use nalgebra::DVector;

use super::step::check_dim;
use super::{OneStepMethod, PoissonSystem, SolverConfig};
use crate::error::{Error, Result};

/// Time series of a fixed-step run, starting at `t = 0`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    pub energies: Vec<f64>,
    /// `H(y_n) − H(y_0)`.
    pub energy_errors: Vec<f64>,
    /// Fixed-point iterations spent on the step that produced each state
    /// (zero for the initial state).
    pub iteration_counts: Vec<usize>,
    pub nonconverged_steps: usize,
}

impl Trajectory {
    fn start(sys: &dyn PoissonSystem, y0: &DVector<f64>, capacity: usize) -> Self {
        let mut t = Self {
            times: Vec::with_capacity(capacity),
            states: Vec::with_capacity(capacity),
            energies: Vec::with_capacity(capacity),
            energy_errors: Vec::with_capacity(capacity),
            iteration_counts: Vec::with_capacity(capacity),
            nonconverged_steps: 0,
        };
        t.push(0.0, y0.clone(), sys.hamiltonian(y0), 0);
        t
    }

    fn push(&mut self, t: f64, y: DVector<f64>, energy: f64, iterations: usize) {
        let h0 = self.energies.first().copied().unwrap_or(energy);
        self.times.push(t);
        self.states.push(y);
        self.energies.push(energy);
        self.energy_errors.push(energy - h0);
        self.iteration_counts.push(iterations);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> Option<&DVector<f64>> {
        self.states.last()
    }

    pub fn max_energy_error(&self) -> f64 {
        self.energy_errors.iter().fold(0.0, |m, e| m.max(e.abs()))
    }
}

/// Applies `method` `n_steps` times from `y0` at `t = 0`.
///
/// A failing step aborts the run; the error carries the states computed so
/// far.
pub fn integrate(
    method: &dyn OneStepMethod,
    sys: &dyn PoissonSystem,
    y0: &DVector<f64>,
    n_steps: usize,
    cfg: &SolverConfig,
) -> Result<Trajectory> {
    if n_steps == 0 {
        return Err(Error::InvalidArgument("n_steps must be at least 1".into()));
    }
    cfg.validate()?;
    check_dim(sys, y0)?;
    let h = method.h();
    let mut traj = Trajectory::start(sys, y0, n_steps + 1);
    let mut y = y0.clone();
    for n in 1..=n_steps {
        let res = match method.step(sys, &y, cfg) {
            Ok(res) => res,
            Err(e) => {
                return Err(Error::Aborted {
                    step: n,
                    source: Box::new(e),
                    partial: Box::new(traj),
                })
            }
        };
        if !res.converged {
            traj.nonconverged_steps += 1;
        }
        y = res.y1;
        traj.push(n as f64 * h, y.clone(), sys.hamiltonian(&y), res.iterations);
    }
    Ok(traj)
}
