//! Benchmark Poisson systems and their reference solutions.

mod elliptic;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::integrator::{validate_system, PoissonSystem};

pub use elliptic::{complete_elliptic_k, jacobi_sn_cn_dn, EllipticState};

/// Elliptic parameter `m` of the rigid-body reference solution.
pub const EULER_PARAMETER: f64 = 0.51;

/// Period `4K(0.51)` of the rigid-body reference solution.
pub fn euler_period() -> f64 {
    4.0 * complete_elliptic_k(EULER_PARAMETER).expect("0.51 lies in [0, 1)")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerParams {
    pub alpha: f64,
    pub beta: f64,
}

impl EulerParams {
    /// `α = 1 + 1/√1.51`, `β = 1 − 0.51/√1.51`; has a closed-form solution.
    pub fn case_a() -> Self {
        let s = 1.51f64.sqrt();
        Self {
            alpha: 1.0 + 1.0 / s,
            beta: 1.0 - 0.51 / s,
        }
    }

    /// `α = 51`, `β = 1.01`: `y₃ ≈ 1` and `(y₁, y₂)` oscillate at `ω ≈ 50`.
    pub fn case_b() -> Self {
        Self {
            alpha: 51.0,
            beta: 1.01,
        }
    }
}

/// Free rigid body written as a Poisson system with `H(y) = |y|²/2`.
#[derive(Debug, Clone)]
pub struct EulerSystem {
    params: EulerParams,
}

pub fn euler_system(params: EulerParams) -> EulerSystem {
    EulerSystem { params }
}

impl EulerSystem {
    pub fn params(&self) -> EulerParams {
        self.params
    }
}

impl PoissonSystem for EulerSystem {
    fn dim(&self) -> usize {
        3
    }

    fn structure_matrix(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let EulerParams { alpha, beta } = self.params;
        #[rustfmt::skip]
        let b = DMatrix::from_row_slice(3, 3, &[
            0.0,             alpha * y[2],  -beta * y[1],
            -alpha * y[2],   0.0,           y[0],
            beta * y[1],     -y[0],         0.0,
        ]);
        b
    }

    fn gradient(&self, y: &DVector<f64>) -> DVector<f64> {
        y.clone()
    }

    fn hamiltonian(&self, y: &DVector<f64>) -> f64 {
        0.5 * y.norm_squared()
    }

    fn name(&self) -> &str {
        "euler"
    }
}

/// Closed-form solution `(√1.51 sn(t|0.51), cn(t|0.51), dn(t|0.51))` of the
/// case-a rigid body from `y(0) = (0, 1, 1)`.
pub fn euler_exact(params: EulerParams, t: f64) -> Result<DVector<f64>> {
    if params != EulerParams::case_a() {
        return Err(Error::NoExactSolution(format!(
            "euler(alpha={}, beta={})",
            params.alpha, params.beta
        )));
    }
    let s = jacobi_sn_cn_dn(t, EULER_PARAMETER)?;
    Ok(DVector::from_vec(vec![1.51f64.sqrt() * s.sn, s.cn, s.dn]))
}

/// `B = [[0, 1], [−1, 0]]`, `H = (y₁² + y₂²)/2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct HarmonicOscillator;

pub fn harmonic_oscillator_system() -> HarmonicOscillator {
    HarmonicOscillator
}

impl HarmonicOscillator {
    /// The exact flow: a clockwise rotation of the initial state by `t`.
    pub fn exact(&self, y0: &DVector<f64>, t: f64) -> DVector<f64> {
        let (s, c) = t.sin_cos();
        DVector::from_vec(vec![c * y0[0] + s * y0[1], -s * y0[0] + c * y0[1]])
    }
}

impl PoissonSystem for HarmonicOscillator {
    fn dim(&self) -> usize {
        2
    }

    fn structure_matrix(&self, _y: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])
    }

    fn gradient(&self, y: &DVector<f64>) -> DVector<f64> {
        y.clone()
    }

    fn hamiltonian(&self, y: &DVector<f64>) -> f64 {
        0.5 * y.norm_squared()
    }

    fn name(&self) -> &str {
        "harmonic"
    }
}

/// Problem identifiers accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemId {
    EulerA,
    EulerB,
    Harmonic,
}

impl FromStr for ProblemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euler-a" => Ok(Self::EulerA),
            "euler-b" => Ok(Self::EulerB),
            "harmonic" => Ok(Self::Harmonic),
            other => Err(Error::InvalidArgument(format!(
                "unknown problem '{other}' (expected euler-a, euler-b or harmonic)"
            ))),
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::EulerA => "euler-a",
            Self::EulerB => "euler-b",
            Self::Harmonic => "harmonic",
        })
    }
}

/// A validated benchmark: system, initial state and default fitting frequency.
pub struct Problem {
    pub id: ProblemId,
    pub system: Box<dyn PoissonSystem>,
    pub y0: DVector<f64>,
    pub default_omega: f64,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("id", &self.id)
            .field("y0", &self.y0.as_slice())
            .field("default_omega", &self.default_omega)
            .finish_non_exhaustive()
    }
}

impl Problem {
    pub fn new(id: ProblemId) -> Result<Self> {
        let (system, y0, default_omega): (Box<dyn PoissonSystem>, _, _) = match id {
            ProblemId::EulerA => (
                Box::new(euler_system(EulerParams::case_a())),
                DVector::from_vec(vec![0.0, 1.0, 1.0]),
                2.0 * PI / euler_period(),
            ),
            ProblemId::EulerB => (
                Box::new(euler_system(EulerParams::case_b())),
                DVector::from_vec(vec![0.0, 1.0, 1.0]),
                50.0,
            ),
            ProblemId::Harmonic => (
                Box::new(harmonic_oscillator_system()),
                DVector::from_vec(vec![1.0, 0.0]),
                1.0,
            ),
        };
        validate_system(system.as_ref(), &y0)?;
        Ok(Self {
            id,
            system,
            y0,
            default_omega,
        })
    }

    /// Closed-form reference state at time `t`, if one exists.
    pub fn exact(&self, t: f64) -> Result<DVector<f64>> {
        match self.id {
            ProblemId::EulerA => euler_exact(EulerParams::case_a(), t),
            _ => Err(Error::NoExactSolution(self.id.to_string())),
        }
    }
}
