use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A Poisson system `ẏ = B(y) ∇H(y)` with skew-symmetric `B`.
pub trait PoissonSystem: Send + Sync {
    fn dim(&self) -> usize;

    /// The structure matrix `B(y)`.
    fn structure_matrix(&self, y: &DVector<f64>) -> DMatrix<f64>;

    fn gradient(&self, y: &DVector<f64>) -> DVector<f64>;

    fn hamiltonian(&self, y: &DVector<f64>) -> f64;

    fn name(&self) -> &str;

    fn vector_field(&self, y: &DVector<f64>) -> DVector<f64> {
        self.structure_matrix(y) * self.gradient(y)
    }
}

type MatFn = Box<dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync>;
type VecFn = Box<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>;
type ScalarFn = Box<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>;

/// A system assembled from closures.
pub struct FnSystem {
    name: String,
    dim: usize,
    b: MatFn,
    grad: VecFn,
    h: ScalarFn,
}

impl FnSystem {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        b: impl Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync + 'static,
        grad: impl Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
        h: impl Fn(&DVector<f64>) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            dim,
            b: Box::new(b),
            grad: Box::new(grad),
            h: Box::new(h),
        }
    }
}

impl PoissonSystem for FnSystem {
    fn dim(&self) -> usize {
        self.dim
    }

    fn structure_matrix(&self, y: &DVector<f64>) -> DMatrix<f64> {
        (self.b)(y)
    }

    fn gradient(&self, y: &DVector<f64>) -> DVector<f64> {
        (self.grad)(y)
    }

    fn hamiltonian(&self, y: &DVector<f64>) -> f64 {
        (self.h)(y)
    }

    fn name(&self) -> &str {
        &self.name
    }
}

const SKEW_SAMPLES: usize = 20;
const GRADIENT_SAMPLES: usize = 10;
const VALIDATION_SEED: u64 = 0x5eed;

/// Checks skew-symmetry of `B` at `y0` and nearby points, and that `∇H`
/// agrees with central differences of `H` along random directions.
pub fn validate_system(sys: &dyn PoissonSystem, y0: &DVector<f64>) -> Result<()> {
    let d = sys.dim();
    if y0.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: y0.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(VALIDATION_SEED);
    let perturbed =
        |rng: &mut ChaCha8Rng| DVector::from_fn(d, |i, _| y0[i] + rng.random_range(-1.0..1.0));

    let mut points = vec![y0.clone()];
    points.extend((0..SKEW_SAMPLES).map(|_| perturbed(&mut rng)));
    for y in &points {
        let b = sys.structure_matrix(y);
        if b.nrows() != d || b.ncols() != d {
            return Err(Error::InvalidSystem(format!(
                "B(y) is {}x{}, expected {d}x{d}",
                b.nrows(),
                b.ncols()
            )));
        }
        let asym = (&b + b.transpose()).amax();
        if !(asym <= 1e-12 * (1.0 + b.amax())) {
            return Err(Error::InvalidSystem(format!(
                "B(y) is not skew-symmetric at y = {:?} (|B + Bᵀ| = {asym:e})",
                y.as_slice()
            )));
        }
    }

    for _ in 0..GRADIENT_SAMPLES {
        let y = perturbed(&mut rng);
        let mut dir = DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0));
        let n = dir.norm();
        if n == 0.0 {
            continue;
        }
        dir /= n;
        let g = sys.gradient(&y);
        if g.len() != d {
            return Err(Error::InvalidSystem(format!(
                "∇H has length {}, expected {d}",
                g.len()
            )));
        }
        let eps = 1e-5 * (1.0 + y.amax());
        let fd = (sys.hamiltonian(&(&y + &dir * eps)) - sys.hamiltonian(&(&y - &dir * eps)))
            / (2.0 * eps);
        let exact = g.dot(&dir);
        if !((fd - exact).abs() <= 1e-6 * (1.0 + exact.abs().max(g.norm()))) {
            return Err(Error::InvalidSystem(format!(
                "∇H disagrees with finite differences of H at y = {:?}: {exact} vs {fd}",
                y.as_slice()
            )));
        }
    }
    Ok(())
}
