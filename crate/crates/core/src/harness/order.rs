use nalgebra::DVector;
use rayon::prelude::*;

use super::{step_count, ExperimentConfig, Table};
use crate::error::{Error, Result};
use crate::integrator::{integrate, SolverConfig, Trajectory};
use crate::methods::legendre_epcm_preset;
use crate::problems::Problem;

/// `0.1 / 2^i` for `i = 4..=7`.
pub const DEFAULT_ORDER_GRID: [f64; 4] = [0.1 / 16.0, 0.1 / 32.0, 0.1 / 64.0, 0.1 / 128.0];

/// Errors below this are at roundoff level and left out of the fit.
pub const UNDERFLOW_ERROR: f64 = 1e-14;

/// Self-references run at the smallest grid step divided by this.
const REFERENCE_REFINEMENT: f64 = 8.0;

#[derive(Debug, Clone, PartialEq)]
pub struct OrderRow {
    pub h: f64,
    pub error: f64,
    pub mean_iterations: f64,
    /// Set when the error underflowed and the row was left out of the fit.
    pub excluded: bool,
}

#[derive(Debug, Clone)]
pub struct OrderStudyResult {
    /// Sorted by `h` descending.
    pub rows: Vec<OrderRow>,
    pub slope: f64,
    pub intercept: f64,
    pub reference: String,
    /// Columns `h, error, mean_iterations, excluded`.
    pub table: Table,
}

/// Least-squares line through `(log h, log error)`; returns `(slope, intercept)`.
pub fn fit_loglog(pairs: &[(f64, f64)]) -> Result<(f64, f64)> {
    if pairs.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 (h, error) pairs, got {}",
            pairs.len()
        )));
    }
    if let Some(&(h, e)) = pairs
        .iter()
        .find(|(h, e)| !(h.is_finite() && *h > 0.0 && e.is_finite() && *e > 0.0))
    {
        return Err(Error::InvalidArgument(format!(
            "order fit needs positive finite values, got ({h}, {e})"
        )));
    }
    let n = pairs.len() as f64;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("all step sizes are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

pub fn estimate_order(pairs: &[(f64, f64)]) -> Result<f64> {
    fit_loglog(pairs).map(|(s, _)| s)
}

fn run_reference(
    problem: &Problem,
    t_end: f64,
    h_min: f64,
    solver: &SolverConfig,
) -> Result<(DVector<f64>, String)> {
    match problem.exact(t_end) {
        Ok(y) => return Ok((y, "closed-form Jacobi elliptic solution".into())),
        Err(Error::NoExactSolution(_)) => {}
        Err(e) => return Err(e),
    }
    let h_ref = h_min / REFERENCE_REFINEMENT;
    let n = step_count(t_end, h_ref)?;
    let stepper = legendre_epcm_preset(2)?.stepper(h_ref, solver)?;
    let traj = integrate(
        stepper.as_ref(),
        problem.system.as_ref(),
        &problem.y0,
        n,
        solver,
    )?;
    let y = traj
        .last_state()
        .cloned()
        .expect("trajectory has a final state");
    Ok((y, format!("legendre-2 self-reference at h = {h_ref:?}")))
}

fn mean_iterations(traj: &Trajectory) -> f64 {
    let steps = &traj.iteration_counts[1..];
    steps.iter().sum::<usize>() as f64 / steps.len().max(1) as f64
}

/// Global error at `t_end` for each step size, with a log-log slope fit.
///
/// The per-`h` integrations run in parallel; the output is sorted by `h`
/// descending and does not depend on scheduling.
pub fn run_order_study(cfg: &ExperimentConfig) -> Result<OrderStudyResult> {
    cfg.validate()?;
    let grid = cfg
        .h_grid
        .clone()
        .unwrap_or_else(|| DEFAULT_ORDER_GRID.to_vec());
    if grid.is_empty() {
        return Err(Error::InsufficientData("empty step-size grid".into()));
    }
    let problem = Problem::new(cfg.problem)?;
    let preset = cfg.preset(&problem)?;
    let counts = grid
        .iter()
        .map(|&h| {
            if !(h.is_finite() && h > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "grid step {h} must be positive"
                )));
            }
            step_count(cfg.t_end, h)
        })
        .collect::<Result<Vec<_>>>()?;
    let h_min = grid.iter().copied().fold(f64::INFINITY, f64::min);

    let (reference, ref_label) = run_reference(&problem, cfg.t_end, h_min, &cfg.solver)?;

    let mut rows = grid
        .par_iter()
        .zip(counts.par_iter())
        .map(|(&h, &n)| {
            let stepper = preset.stepper(h, &cfg.solver)?;
            let traj = integrate(
                stepper.as_ref(),
                problem.system.as_ref(),
                &problem.y0,
                n,
                &cfg.solver,
            )?;
            let y = traj.last_state().expect("trajectory has a final state");
            let error = (y - &reference).norm();
            if !error.is_finite() {
                return Err(Error::Divergence { iteration: n });
            }
            Ok(OrderRow {
                h,
                error,
                mean_iterations: mean_iterations(&traj),
                excluded: error < UNDERFLOW_ERROR,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| b.h.total_cmp(&a.h));

    let usable: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| !r.excluded)
        .map(|r| (r.h, r.error))
        .collect();
    if usable.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "only {} of {} step sizes have errors above {UNDERFLOW_ERROR:e}",
            usable.len(),
            rows.len()
        )));
    }
    let (slope, intercept) = fit_loglog(&usable)?;

    let mut table = Table::new(["h", "error", "mean_iterations", "excluded"]);
    cfg.describe(&mut table, &preset);
    table
        .meta("reference", &ref_label)
        .meta("slope", format!("{slope:?}"))
        .meta("intercept", format!("{intercept:?}"));
    for r in &rows {
        table.push(vec![
            r.h,
            r.error,
            r.mean_iterations,
            f64::from(u8::from(r.excluded)),
        ]);
    }
    Ok(OrderStudyResult {
        rows,
        slope,
        intercept,
        reference: ref_label,
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::Mode;
    use crate::methods::MethodId;
    use crate::problems::ProblemId;
    use proptest::prelude::*;

    #[test]
    fn slopes_of_exact_power_laws() {
        let s = estimate_order(&[(0.1, 1e-2), (0.05, 2.5e-3)]).unwrap();
        assert!((s - 2.0).abs() <= 1e-12);
        let s = estimate_order(&[(0.1, 1e-3), (0.05, 1.25e-4)]).unwrap();
        assert!((s - 3.0).abs() <= 1e-12);
        let s = estimate_order(&[(0.1, 3.0), (0.05, 3.0), (0.01, 3.0)]).unwrap();
        assert_eq!(s, 0.0);
    }

    #[test]
    fn fit_rejects_bad_input() {
        assert!(matches!(
            estimate_order(&[(0.1, 0.0), (0.05, 1.0)]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            estimate_order(&[(-0.1, 1.0), (0.05, 1.0)]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(estimate_order(&[(0.1, 1.0)]).is_err());
        assert!(estimate_order(&[(0.1, 1.0), (0.1, 2.0)]).is_err());
    }

    proptest! {
        #[test]
        fn recovers_synthetic_order(c in 1e-3f64..1e3, p in 0.5f64..6.0) {
            let pairs: Vec<_> = DEFAULT_ORDER_GRID.iter().map(|&h| (h, c * h.powf(p))).collect();
            let (slope, intercept) = fit_loglog(&pairs).unwrap();
            prop_assert!((slope - p).abs() <= 1e-10);
            prop_assert!((intercept - c.ln()).abs() <= 1e-9);
        }
    }

    #[test]
    fn default_grid_is_halving_sequence() {
        let want: Vec<f64> = (4..=7).map(|i| 0.1 / 2f64.powi(i)).collect();
        assert_eq!(DEFAULT_ORDER_GRID.to_vec(), want);
    }

    #[test]
    fn epcm1_small_study_is_second_order() {
        let mut c = ExperimentConfig::new(Mode::OrderStudy, ProblemId::EulerA, MethodId::Epcm1);
        c.t_end = 2.0;
        c.h_grid = Some(vec![0.1, 0.05, 0.025]);
        let r = run_order_study(&c).unwrap();
        assert!((r.slope - 2.0).abs() < 0.15, "{}", r.slope);
        assert_eq!(
            r.rows.iter().map(|r| r.h).collect::<Vec<_>>(),
            vec![0.1, 0.05, 0.025]
        );
        assert_eq!(r.table.rows.len(), 3);
    }

    #[test]
    fn self_reference_is_used_without_closed_form() {
        let mut c = ExperimentConfig::new(Mode::OrderStudy, ProblemId::Harmonic, MethodId::Epcm1);
        c.t_end = 1.0;
        c.h_grid = Some(vec![0.1, 0.05, 0.025]);
        let r = run_order_study(&c).unwrap();
        assert!(r.reference.contains("self-reference"));
        assert!((r.slope - 2.0).abs() < 0.1, "{}", r.slope);
    }

    #[test]
    fn underflowed_rows_are_flagged() {
        // twelfth order reaches roundoff on this grid
        let mut c =
            ExperimentConfig::new(Mode::OrderStudy, ProblemId::EulerA, MethodId::Legendre(6));
        c.t_end = 1.0;
        c.h_grid = Some(vec![0.1, 0.05, 0.025]);
        assert!(matches!(
            run_order_study(&c),
            Err(Error::InsufficientData(_))
        ));
    }
}
