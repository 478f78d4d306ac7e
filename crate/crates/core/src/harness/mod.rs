//! Experiment drivers: trajectory dumps, long-time energy studies and
//! global-error order studies, all producing [`Table`]s.

mod order;
mod table;

use std::fmt;
use std::str::FromStr;

pub use order::{
    estimate_order, fit_loglog, run_order_study, OrderRow, OrderStudyResult, DEFAULT_ORDER_GRID,
    UNDERFLOW_ERROR,
};
pub use table::Table;

use crate::error::{Error, Result};
use crate::integrator::{integrate, SolverConfig, Trajectory};
use crate::methods::{MethodId, MethodPreset};
use crate::problems::{Problem, ProblemId};

/// `|ΔH|` is clamped to this before taking `log10`.
pub const LOG_FLOOR: f64 = 1e-17;

pub const DEFAULT_DECIMATE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Integrate,
    EnergyStudy,
    OrderStudy,
}

impl Mode {
    pub fn default_t_end(&self) -> f64 {
        match self {
            Mode::EnergyStudy => 10_000.0,
            Mode::Integrate | Mode::OrderStudy => 10.0,
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "integrate" => Ok(Self::Integrate),
            "energy-study" => Ok(Self::EnergyStudy),
            "order-study" => Ok(Self::OrderStudy),
            _ => Err(Error::InvalidArgument(format!("unknown mode '{s}'"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Integrate => "integrate",
            Mode::EnergyStudy => "energy-study",
            Mode::OrderStudy => "order-study",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub problem: ProblemId,
    pub method: MethodId,
    pub h: f64,
    pub t_end: f64,
    /// Fitting frequency; `None` uses the problem default.
    pub omega: Option<f64>,
    pub solver: SolverConfig,
    /// Energy study: keep every `decimate`-th step.
    pub decimate: usize,
    /// Order study step sizes; `None` uses [`DEFAULT_ORDER_GRID`].
    pub h_grid: Option<Vec<f64>>,
}

impl ExperimentConfig {
    pub fn new(mode: Mode, problem: ProblemId, method: MethodId) -> Self {
        Self {
            mode,
            problem,
            method,
            h: 0.2,
            t_end: mode.default_t_end(),
            omega: None,
            solver: SolverConfig::default(),
            decimate: DEFAULT_DECIMATE,
            h_grid: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "h must be positive, got {}",
                self.h
            )));
        }
        if !self.t_end.is_finite() || self.t_end < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "t_end must be finite and non-negative, got {}",
                self.t_end
            )));
        }
        if self.t_end == 0.0 {
            return Err(Error::InsufficientData(
                "t_end = 0 leaves no steps to record".into(),
            ));
        }
        if self.decimate == 0 {
            return Err(Error::InvalidArgument("decimate must be at least 1".into()));
        }
        if let Some(w) = self.omega {
            if !w.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "omega must be finite, got {w}"
                )));
            }
        }
        self.solver.validate()
    }

    pub fn preset(&self, problem: &Problem) -> Result<MethodPreset> {
        let omega = self
            .method
            .is_fitted()
            .then(|| self.omega.unwrap_or(problem.default_omega));
        MethodPreset::new(self.method, omega)
    }

    fn describe(&self, table: &mut Table, preset: &MethodPreset) {
        table
            .meta("mode", self.mode)
            .meta("problem", self.problem)
            .meta("method", self.method)
            .meta("t_end", format!("{:?}", self.t_end))
            .meta("fp_tol", format!("{:?}", self.solver.fp_tol))
            .meta("fp_max_iter", self.solver.fp_max_iter);
        if let Some(w) = preset.omega {
            table.meta("omega", format!("{w:?}"));
        }
        if let Some(s) = self.solver.quad_points {
            table.meta("quad_points", s);
        }
    }
}

/// Number of steps of size `h` that land on `t_end`.
pub fn step_count(t_end: f64, h: f64) -> Result<usize> {
    let n = (t_end / h).round();
    if n < 1.0 || (n * h - t_end).abs() > 1e-9 * t_end.max(h) {
        return Err(Error::InvalidArgument(format!(
            "t_end = {t_end} is not a positive multiple of h = {h}"
        )));
    }
    Ok(n as usize)
}

fn run_trajectory(cfg: &ExperimentConfig) -> Result<(Problem, MethodPreset, Trajectory)> {
    cfg.validate()?;
    let problem = Problem::new(cfg.problem)?;
    let preset = cfg.preset(&problem)?;
    let n = step_count(cfg.t_end, cfg.h)?;
    let stepper = preset.stepper(cfg.h, &cfg.solver)?;
    let traj = integrate(
        stepper.as_ref(),
        problem.system.as_ref(),
        &problem.y0,
        n,
        &cfg.solver,
    )?;
    Ok((problem, preset, traj))
}

/// Full trajectory: `t, y1..yd, H, dH, iterations`, one row per step
/// including `t = 0`.
pub fn run_integrate(cfg: &ExperimentConfig) -> Result<Table> {
    let (problem, preset, traj) = run_trajectory(cfg)?;
    let d = problem.system.dim();
    let mut header = vec!["t".to_string()];
    header.extend((1..=d).map(|i| format!("y{i}")));
    header.extend(["H", "dH", "iterations"].map(String::from));
    let mut table = Table::new(header);
    cfg.describe(&mut table, &preset);
    table.meta("h", format!("{:?}", cfg.h));
    table.meta("nonconverged_steps", traj.nonconverged_steps);
    for n in 0..traj.len() {
        let mut row = vec![traj.times[n]];
        row.extend(traj.states[n].iter());
        row.extend([
            traj.energies[n],
            traj.energy_errors[n],
            traj.iteration_counts[n] as f64,
        ]);
        table.push(row);
    }
    Ok(table)
}

#[derive(Debug, Clone)]
pub struct EnergyStudy {
    /// Columns `t, dH, log10_abs_dH`.
    pub table: Table,
    /// Over every step, not only the recorded ones.
    pub max_abs_error: f64,
    pub nonconverged_steps: usize,
}

/// Steps `0, k, 2k, …` plus the final step.
pub fn decimated_indices(n_steps: usize, k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..=n_steps).step_by(k.max(1)).collect();
    if idx.last() != Some(&n_steps) {
        idx.push(n_steps);
    }
    idx
}

pub fn run_energy_study(cfg: &ExperimentConfig) -> Result<EnergyStudy> {
    let (_, preset, traj) = run_trajectory(cfg)?;
    let mut table = Table::new(["t", "dH", "log10_abs_dH"]);
    cfg.describe(&mut table, &preset);
    table.meta("h", format!("{:?}", cfg.h));
    table.meta("decimate", cfg.decimate);
    table.meta("nonconverged_steps", traj.nonconverged_steps);
    for n in decimated_indices(traj.len() - 1, cfg.decimate) {
        let dh = traj.energy_errors[n];
        table.push(vec![traj.times[n], dh, dh.abs().max(LOG_FLOOR).log10()]);
    }
    Ok(EnergyStudy {
        table,
        max_abs_error: traj.max_energy_error(),
        nonconverged_steps: traj.nonconverged_steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimation_keeps_ends() {
        assert_eq!(decimated_indices(25, 10), vec![0, 10, 20, 25]);
        assert_eq!(decimated_indices(20, 10), vec![0, 10, 20]);
        assert_eq!(decimated_indices(3, 1), vec![0, 1, 2, 3]);
        assert_eq!(decimated_indices(3, 100), vec![0, 3]);
    }

    #[test]
    fn step_counts() {
        assert_eq!(step_count(1000.0, 0.2).unwrap(), 5000);
        assert_eq!(step_count(10.0, 0.1 / 128.0).unwrap(), 12800);
        assert!(step_count(1.0, 0.3).is_err());
        assert!(step_count(0.1, 0.2).is_err());
    }

    #[test]
    fn config_validation() {
        let base = ExperimentConfig::new(Mode::EnergyStudy, ProblemId::EulerA, MethodId::Epcm1);
        assert_eq!(base.t_end, 10_000.0);
        assert!(base.validate().is_ok());
        let mut c = base.clone();
        c.t_end = 0.0;
        assert!(matches!(
            run_energy_study(&c),
            Err(Error::InsufficientData(_))
        ));
        let mut c = base.clone();
        c.h = -0.1;
        assert!(matches!(c.validate(), Err(Error::InvalidArgument(_))));
        let mut c = base;
        c.decimate = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn integrate_dump_layout() {
        let mut c = ExperimentConfig::new(Mode::Integrate, ProblemId::Harmonic, MethodId::Avf);
        c.h = 0.1;
        c.t_end = 1.0;
        let t = run_integrate(&c).unwrap();
        assert_eq!(t.header, ["t", "y1", "y2", "H", "dH", "iterations"]);
        assert_eq!(t.rows.len(), 11);
        assert_eq!(t.rows[0][0], 0.0);
        assert_eq!(t.get_meta("method"), Some("avf"));
    }

    #[test]
    fn energy_study_records_floor() {
        let mut c = ExperimentConfig::new(Mode::EnergyStudy, ProblemId::EulerA, MethodId::Ffep1);
        c.t_end = 20.0;
        let s = run_energy_study(&c).unwrap();
        assert_eq!(s.table.rows.len(), 11);
        assert_eq!(s.table.rows[0], vec![0.0, 0.0, -17.0]);
        assert!(s.max_abs_error <= 1e-12);
        assert!(s.table.get_meta("omega").is_some());
    }
}
