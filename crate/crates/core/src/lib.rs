//! Functionally-fitted energy-preserving integrators for Poisson systems
//! `ẏ = B(y) ∇H(y)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`numeric`]: Gauss–Legendre rules on `[0, 1]` and small LU solves.
//! * [`space`]: fitting spaces, projection kernels and Lagrange bases.
//! * [`integrator`]: the generic r-stage step, fixed-point solver and driver.
//! * [`methods`]: closed-form second-order schemes and the Legendre family.
//! * [`problems`]: the free rigid body with its elliptic-function solution.
//! * [`harness`]: energy and convergence-order experiments with CSV output.

pub mod error;
pub mod harness;
pub mod integrator;
pub mod methods;
pub mod numeric;
pub mod problems;
pub mod space;

pub use error::{Error, Result};
