use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ffep::harness::{
    run_energy_study, run_integrate, run_order_study, ExperimentConfig, Mode, Table,
    DEFAULT_DECIMATE,
};
use ffep::integrator::SolverConfig;
use ffep::methods::MethodId;
use ffep::problems::ProblemId;
use ffep::Error;

/// Energy-preserving integrators for Poisson systems.
#[derive(Parser, Debug)]
#[command(name = "ffep", version)]
struct Cli {
    #[command(subcommand)]
    mode: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dump the full trajectory: t, y1..yd, H, dH, iterations.
    Integrate(CommonArgs),
    /// Record the energy error over a long run.
    EnergyStudy(CommonArgs),
    /// Measure the global error at t_end over a grid of step sizes.
    OrderStudy(CommonArgs),
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// euler-a, euler-b or harmonic.
    #[arg(long)]
    problem: ProblemId,
    /// avf, epcm1, ffep1, tfep1, legendre or legendre-N.
    #[arg(long)]
    method: String,
    /// Stage count for `--method legendre`.
    #[arg(long)]
    r: Option<usize>,
    #[arg(long, default_value_t = 0.2)]
    h: f64,
    /// Defaults to 10000 for energy studies and 10 otherwise.
    #[arg(long)]
    t_end: Option<f64>,
    /// Fitting frequency; defaults to the problem's natural frequency.
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long, default_value_t = SolverConfig::default().fp_tol)]
    fp_tol: f64,
    #[arg(long, default_value_t = SolverConfig::default().fp_max_iter)]
    fp_max_iter: usize,
    #[arg(long)]
    quad_points: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_DECIMATE)]
    decimate: usize,
    /// Comma-separated step sizes for order studies.
    #[arg(long, value_delimiter = ',')]
    h_grid: Option<Vec<f64>>,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_method(name: &str, r: Option<usize>) -> Result<MethodId, Error> {
    match (name, r) {
        ("legendre", Some(r)) => format!("legendre-{r}").parse(),
        ("legendre", None) => Err(Error::InvalidArgument("--method legendre needs --r".into())),
        (_, Some(r)) => {
            let id: MethodId = name.parse()?;
            if id.stages() != r {
                return Err(Error::InvalidArgument(format!(
                    "method {id} has {} stage(s), but --r {r} was given",
                    id.stages()
                )));
            }
            Ok(id)
        }
        (_, None) => name.parse(),
    }
}

fn build_config(mode: Mode, args: &CommonArgs) -> Result<ExperimentConfig, Error> {
    let method = parse_method(&args.method, args.r)?;
    let mut cfg = ExperimentConfig::new(mode, args.problem, method);
    cfg.h = args.h;
    if let Some(t) = args.t_end {
        cfg.t_end = t;
    }
    cfg.omega = args.omega;
    cfg.solver.fp_tol = args.fp_tol;
    cfg.solver.fp_max_iter = args.fp_max_iter;
    cfg.solver.quad_points = args.quad_points;
    cfg.decimate = args.decimate;
    cfg.h_grid = args.h_grid.clone();
    cfg.validate()?;
    Ok(cfg)
}

fn write_table(table: &Table, output: Option<&PathBuf>) -> Result<(), Error> {
    match output {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write_to(&mut w)?;
            w.flush()?;
        }
        None => table.write_to(io::stdout().lock())?,
    }
    Ok(())
}

fn is_usage_error(e: &Error) -> bool {
    match e {
        Error::InvalidArgument(_) | Error::InvalidMethod(_) | Error::InvalidFrequency { .. } => {
            true
        }
        Error::Aborted { source, .. } => is_usage_error(source),
        _ => false,
    }
}

fn run(mode: Mode, args: &CommonArgs) -> Result<(), Error> {
    let cfg = build_config(mode, args)?;
    match mode {
        Mode::Integrate => write_table(&run_integrate(&cfg)?, args.output.as_ref()),
        Mode::EnergyStudy => {
            let study = run_energy_study(&cfg)?;
            eprintln!(
                "max |dH| = {:e}, nonconverged steps = {}",
                study.max_abs_error, study.nonconverged_steps
            );
            write_table(&study.table, args.output.as_ref())
        }
        Mode::OrderStudy => {
            let study = run_order_study(&cfg)?;
            eprintln!("slope = {:.4}, reference: {}", study.slope, study.reference);
            write_table(&study.table, args.output.as_ref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, args) = match &cli.mode {
        Command::Integrate(a) => (Mode::Integrate, a),
        Command::EnergyStudy(a) => (Mode::EnergyStudy, a),
        Command::OrderStudy(a) => (Mode::OrderStudy, a),
    };
    match run(mode, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if is_usage_error(&e) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
