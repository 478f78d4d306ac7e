//! Second-order closed-form schemes and the Legendre family.
//!
//! Every closed-form scheme here has the shape
//!
//! ```text
//! Δ = y₁ − y₀ = s · B(y₀ + μΔ) · Σ_j w_j ∇H(y₀ + g(c_j) Δ)
//! ```
//!
//! and is solved with the same fixed-point engine as the generic step.
//!
//! | scheme | `s`                         | `μ`              | `g(σ)`             | `w_j`              |
//! |--------|-----------------------------|------------------|--------------------|--------------------|
//! | AVF    | `h`                         | (B constant)     | `σ`                | `b_j`              |
//! | EPCM1  | `h`                         | `1/2`            | `σ`                | `b_j`              |
//! | FFEP1  | `h · 2 sin(v/2) / v`        | `1/(2 cos(v/2))` | `sin(vσ) / sin v`  | `b_j P(1/2, c_j)`  |
//! | TFEP1  | `h · 2 sinh(v/2) / (v cosh(v/2))` | `1/2`      | `σ`                | `b_j`              |
//!
//! with `v = ωh`. The TFEP1 prefactor is hyperbolic and reduces to EPCM1 at
//! `v = 0`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::integrator::{
    iterate, plan_step, OneStepMethod, PoissonSystem, SolverConfig, StepPlan, StepResult,
};
use crate::numeric::{gauss_legendre_rule, QuadratureRule};
use crate::space::{
    default_nodes, default_quad_points, make_polynomial_space, make_trig_cos_space, scale_basis,
    sin_ratio, FunctionSpace, SMALL_V,
};

pub const MAX_LEGENDRE_STAGES: usize = 6;

/// `|cos(v/2)|` or `|sin v|` below this makes the FFEP1 coefficients blow up.
const FFEP1_SINGULAR_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodId {
    Avf,
    Epcm1,
    Ffep1,
    Tfep1,
    Legendre(usize),
}

impl MethodId {
    pub fn stages(&self) -> usize {
        match self {
            Self::Legendre(r) => *r,
            _ => 1,
        }
    }

    /// Whether the scheme depends on a fitting frequency `ω`.
    pub fn is_fitted(&self) -> bool {
        matches!(self, Self::Ffep1 | Self::Tfep1)
    }
}

impl FromStr for MethodId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "avf" => Ok(Self::Avf),
            "epcm1" => Ok(Self::Epcm1),
            "ffep1" => Ok(Self::Ffep1),
            "tfep1" => Ok(Self::Tfep1),
            _ => {
                let r = s
                    .strip_prefix("legendre-")
                    .and_then(|r| r.parse::<usize>().ok())
                    .ok_or_else(|| {
                        Error::InvalidArgument(format!(
                            "unknown method '{s}' (expected avf, epcm1, ffep1, tfep1 or legendre-N)"
                        ))
                    })?;
                check_legendre_stages(r)?;
                Ok(Self::Legendre(r))
            }
        }
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Avf => f.write_str("avf"),
            Self::Epcm1 => f.write_str("epcm1"),
            Self::Ffep1 => f.write_str("ffep1"),
            Self::Tfep1 => f.write_str("tfep1"),
            Self::Legendre(r) => write!(f, "legendre-{r}"),
        }
    }
}

fn check_legendre_stages(r: usize) -> Result<()> {
    if r == 0 || r > MAX_LEGENDRE_STAGES {
        return Err(Error::InvalidArgument(format!(
            "legendre stage count {r} outside 1..={MAX_LEGENDRE_STAGES}"
        )));
    }
    Ok(())
}

/// A named configuration of the generic integrator.
#[derive(Debug, Clone)]
pub struct MethodPreset {
    pub id: MethodId,
    pub space: FunctionSpace,
    pub nodes: Vec<f64>,
    pub omega: Option<f64>,
}

pub fn legendre_epcm_preset(r: usize) -> Result<MethodPreset> {
    check_legendre_stages(r)?;
    Ok(MethodPreset {
        id: MethodId::Legendre(r),
        space: make_polynomial_space(r)?,
        nodes: default_nodes(r)?,
        omega: None,
    })
}

impl MethodPreset {
    /// `omega` is required for the fitted schemes and ignored otherwise.
    pub fn new(id: MethodId, omega: Option<f64>) -> Result<Self> {
        let omega = if id.is_fitted() {
            let w = omega.ok_or_else(|| {
                Error::InvalidArgument(format!("method {id} needs a fitting frequency"))
            })?;
            if !w.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "frequency {w} is not finite"
                )));
            }
            Some(w)
        } else {
            None
        };
        match id {
            MethodId::Legendre(r) => legendre_epcm_preset(r),
            MethodId::Ffep1 => Ok(Self {
                id,
                space: make_trig_cos_space(omega.unwrap_or(0.0))?,
                nodes: vec![0.5],
                omega,
            }),
            _ => Ok(Self {
                id,
                space: make_polynomial_space(1)?,
                nodes: vec![0.5],
                omega,
            }),
        }
    }

    pub fn stages(&self) -> usize {
        self.id.stages()
    }

    /// Quadrature size used by both the closed form and the generic plan.
    pub fn quad_points(&self, h: f64, cfg: &SolverConfig) -> Result<usize> {
        match cfg.quad_points {
            Some(s) => Ok(s),
            None => Ok(default_quad_points(&scale_basis(&self.space, h)?)),
        }
    }

    /// The generic-integrator configuration of this preset at step `h`.
    ///
    /// TFEP1 is EPCM1 run with the rescaled step `h · 2 sinh(v/2)/(v cosh(v/2))`,
    /// so its plan carries that effective step.
    pub fn generic_plan(&self, h: f64, cfg: &SolverConfig) -> Result<StepPlan> {
        let mut cfg = cfg.clone();
        cfg.quad_points = Some(self.quad_points(h, &cfg)?);
        let h_plan = match self.id {
            MethodId::Tfep1 => h * tfep1_prefactor(self.omega.unwrap_or(0.0) * h),
            _ => h,
        };
        plan_step(&self.space, &self.nodes, h_plan, &cfg)
    }

    /// The stepper used for integration: closed forms for the second-order
    /// schemes, the generic plan for the Legendre family.
    pub fn stepper(&self, h: f64, cfg: &SolverConfig) -> Result<Box<dyn OneStepMethod>> {
        let rule = gauss_legendre_rule(self.quad_points(h, cfg)?)?;
        let omega = self.omega.unwrap_or(0.0);
        Ok(match self.id {
            MethodId::Avf => Box::new(LineScheme::avf(h, &rule)?),
            MethodId::Epcm1 => Box::new(LineScheme::epcm1(h, &rule)?),
            MethodId::Ffep1 => Box::new(LineScheme::ffep1(h, omega, &rule)?),
            MethodId::Tfep1 => Box::new(LineScheme::tfep1(h, omega, &rule)?),
            MethodId::Legendre(_) => Box::new(self.generic_plan(h, cfg)?),
        })
    }
}

/// `2 sinh(v/2) / (v cosh(v/2)) = tanh(v/2) / (v/2)`.
pub fn tfep1_prefactor(v: f64) -> f64 {
    if v.abs() < SMALL_V {
        let v2 = v * v;
        1.0 - v2 / 12.0 + v2 * v2 / 120.0
    } else {
        (0.5 * v).tanh() / (0.5 * v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Path {
    Linear,
    /// `sin(vσ) / sin v`.
    Trig(f64),
}

impl Path {
    fn at(&self, sigma: f64) -> f64 {
        match *self {
            Path::Linear => sigma,
            Path::Trig(v) => sin_ratio(v, sigma) / sin_ratio(v, 1.0),
        }
    }
}

/// A scheme of the form `Δ = s B(y₀ + μΔ) Σ_j w_j ∇H(y₀ + g(c_j)Δ)`.
#[derive(Debug, Clone)]
pub struct LineScheme {
    id: MethodId,
    h: f64,
    scale: f64,
    /// `μ`; `None` evaluates `B` once at `y₀` (constant structure matrix).
    midpoint: Option<f64>,
    path: Path,
    path_at_nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `a_{1,1}`: converts `Δ` back into the stage vector `X`.
    a_one: f64,
}

fn check_step(h: f64) -> Result<()> {
    if !(h.is_finite() && h >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step size {h} must be finite and >= 0"
        )));
    }
    Ok(())
}

impl LineScheme {
    fn linear(
        id: MethodId,
        h: f64,
        scale: f64,
        midpoint: Option<f64>,
        rule: &QuadratureRule,
    ) -> Self {
        Self {
            id,
            h,
            scale,
            midpoint,
            path: Path::Linear,
            path_at_nodes: rule.nodes().to_vec(),
            weights: rule.weights().to_vec(),
            a_one: 1.0,
        }
    }

    pub fn avf(h: f64, rule: &QuadratureRule) -> Result<Self> {
        check_step(h)?;
        Ok(Self::linear(MethodId::Avf, h, h, None, rule))
    }

    pub fn epcm1(h: f64, rule: &QuadratureRule) -> Result<Self> {
        check_step(h)?;
        Ok(Self::linear(MethodId::Epcm1, h, h, Some(0.5), rule))
    }

    pub fn tfep1(h: f64, omega: f64, rule: &QuadratureRule) -> Result<Self> {
        check_step(h)?;
        let v = omega * h;
        if !v.is_finite() {
            return Err(Error::InvalidFrequency { v });
        }
        Ok(Self::linear(
            MethodId::Tfep1,
            h,
            h * tfep1_prefactor(v),
            Some(0.5),
            rule,
        ))
    }

    pub fn ffep1(h: f64, omega: f64, rule: &QuadratureRule) -> Result<Self> {
        check_step(h)?;
        let v = omega * h;
        if !v.is_finite() {
            return Err(Error::InvalidFrequency { v });
        }
        let half_cos = (0.5 * v).cos();
        if half_cos.abs() < FFEP1_SINGULAR_TOL
            || (v.abs() >= SMALL_V && v.sin().abs() < FFEP1_SINGULAR_TOL)
        {
            return Err(Error::InvalidFrequency { v });
        }
        // 2 sin(v/2)/v
        let a_one = 2.0 * sin_ratio(v, 0.5);
        // P(1/2, σ) = 4v cos(v/2) cos(vσ) / (2v + sin 2v), divided through by v
        let denom = 2.0 + sin_ratio(v, 2.0);
        let path = Path::Trig(v);
        Ok(Self {
            id: MethodId::Ffep1,
            h,
            scale: h * a_one,
            midpoint: Some(0.5 / half_cos),
            path,
            path_at_nodes: rule.nodes().iter().map(|&c| path.at(c)).collect(),
            weights: rule
                .nodes()
                .iter()
                .zip(rule.weights())
                .map(|(&c, &b)| b * 4.0 * half_cos * (v * c).cos() / denom)
                .collect(),
            a_one,
        })
    }

    pub fn id(&self) -> MethodId {
        self.id
    }

    fn check_constant_structure(&self, sys: &dyn PoissonSystem, y0: &DVector<f64>) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(0xa1f);
        let shifted = DVector::from_fn(y0.len(), |i, _| y0[i] + rng.random_range(-1.0..1.0));
        let b0 = sys.structure_matrix(y0);
        let b1 = sys.structure_matrix(&shifted);
        if (&b0 - &b1).amax() > 1e-12 * (1.0 + b0.amax()) {
            return Err(Error::InvalidMethod(format!(
                "avf requires a constant structure matrix, but B varies for system '{}'",
                sys.name()
            )));
        }
        Ok(())
    }
}

impl OneStepMethod for LineScheme {
    fn h(&self) -> f64 {
        self.h
    }

    fn step(
        &self,
        sys: &dyn PoissonSystem,
        y0: &DVector<f64>,
        cfg: &SolverConfig,
    ) -> Result<StepResult> {
        if y0.len() != sys.dim() {
            return Err(Error::DimensionMismatch {
                expected: sys.dim(),
                got: y0.len(),
            });
        }
        let frozen_b = match self.midpoint {
            None => {
                self.check_constant_structure(sys, y0)?;
                Some(sys.structure_matrix(y0))
            }
            Some(_) => None,
        };
        let map = |x: &[DVector<f64>]| {
            let delta = &x[0];
            let mut g = DVector::zeros(y0.len());
            for (&p, &w) in self.path_at_nodes.iter().zip(&self.weights) {
                let y = y0 + delta * p;
                g.axpy(w, &sys.gradient(&y), 1.0);
            }
            let b = match (&frozen_b, self.midpoint) {
                (Some(b), _) => b.clone(),
                (None, Some(mu)) => sys.structure_matrix(&(y0 + delta * mu)),
                (None, None) => unreachable!(),
            };
            vec![b * g * self.scale]
        };
        let out = iterate(vec![DVector::zeros(y0.len())], cfg, map)?;
        let delta = &out.value[0];
        Ok(StepResult {
            y1: y0 + delta,
            stages: vec![delta / self.a_one],
            iterations: out.iterations,
            residual: out.residual,
            converged: out.converged,
        })
    }

    fn dense(&self, y0: &DVector<f64>, result: &StepResult, tau: f64) -> DVector<f64> {
        y0 + (&result.y1 - y0) * self.path.at(tau)
    }

    fn label(&self) -> String {
        self.id.to_string()
    }
}

fn step_to_state(
    scheme: LineScheme,
    sys: &dyn PoissonSystem,
    y0: &DVector<f64>,
) -> Result<DVector<f64>> {
    Ok(scheme.step(sys, y0, &SolverConfig::default())?.y1)
}

/// `y₁ = y₀ + h B((y₀+y₁)/2) ∫₀¹ ∇H(y₀ + σ(y₁−y₀)) dσ`.
pub fn epcm1_step(
    sys: &dyn PoissonSystem,
    y0: &DVector<f64>,
    h: f64,
    quad: &QuadratureRule,
) -> Result<DVector<f64>> {
    step_to_state(LineScheme::epcm1(h, quad)?, sys, y0)
}

/// The one-stage scheme fitted to `span{cos ωt}`.
pub fn ffep1_step(
    sys: &dyn PoissonSystem,
    y0: &DVector<f64>,
    h: f64,
    omega: f64,
    quad: &QuadratureRule,
) -> Result<DVector<f64>> {
    step_to_state(LineScheme::ffep1(h, omega, quad)?, sys, y0)
}

pub fn tfep1_step(
    sys: &dyn PoissonSystem,
    y0: &DVector<f64>,
    h: f64,
    omega: f64,
    quad: &QuadratureRule,
) -> Result<DVector<f64>> {
    step_to_state(LineScheme::tfep1(h, omega, quad)?, sys, y0)
}

/// Average vector field step; the structure matrix must be constant.
pub fn avf_step(
    sys: &dyn PoissonSystem,
    y0: &DVector<f64>,
    h: f64,
    quad: &QuadratureRule,
) -> Result<DVector<f64>> {
    step_to_state(LineScheme::avf(h, quad)?, sys, y0)
}
