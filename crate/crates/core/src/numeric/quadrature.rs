use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const MAX_POINTS: usize = 64;

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;

/// A quadrature rule on the unit interval `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    order: usize,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Degree of polynomial exactness.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&c, &b)| b * f(c))
            .sum()
    }

    /// Integrates over `[0, upper]` by the affine map `t -> upper * t`.
    pub fn integrate_to<F: FnMut(f64) -> f64>(&self, upper: f64, mut f: F) -> f64 {
        upper * self.integrate(|t| f(upper * t))
    }
}

/// Evaluates the Legendre polynomial `P_n` and its derivative at `x ∈ [-1, 1]`.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0) * x * p - k * p_prev) / (k + 1.0);
        p_prev = p;
        p = next;
    }
    let n = n as f64;
    let dp = n * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// The `s`-point Gauss–Legendre rule mapped to `[0, 1]`.
///
/// Nodes come from Newton iteration on `P_s` seeded with Chebyshev-like
/// guesses; weights from the derivative formula `2 / ((1 - x²) P_s'(x)²)`.
pub fn gauss_legendre_rule(s: usize) -> Result<QuadratureRule> {
    if s == 0 || s > MAX_POINTS {
        return Err(Error::InvalidArgument(format!(
            "quadrature point count {s} outside 1..={MAX_POINTS}"
        )));
    }
    let mut nodes = vec![0.0; s];
    let mut weights = vec![0.0; s];
    let half = s.div_ceil(2);
    for i in 0..half {
        let mut x = (PI * (i as f64 + 0.75) / (s as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, d) = legendre_with_derivative(s, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= NEWTON_TOL {
                break;
            }
        }
        // refresh the derivative at the converged root
        let (_, d) = legendre_with_derivative(s, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x_i runs from near +1 downward; map to ascending nodes on [0, 1]
        nodes[i] = 0.5 * (1.0 - x);
        nodes[s - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[s - 1 - i] = 0.5 * w;
    }
    if s % 2 == 1 {
        nodes[s / 2] = 0.5;
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        order: 2 * s - 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_point_is_midpoint() {
        let rule = gauss_legendre_rule(1).unwrap();
        assert_eq!(rule.nodes(), &[0.5]);
        assert!((rule.weights()[0] - 1.0).abs() < 1e-15);
        assert_eq!(rule.order(), 1);
    }

    #[test]
    fn two_point_nodes_match_roots_found_by_bisection() {
        // shifted P_2(t) = 6t^2 - 6t + 1, roots located independently by bisection
        let p2 = |t: f64| 6.0 * t * t - 6.0 * t + 1.0;
        let bisect = |mut lo: f64, mut hi: f64| {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if p2(lo) * p2(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let r0 = bisect(0.0, 0.5);
        let r1 = bisect(0.5, 1.0);
        let rule = gauss_legendre_rule(2).unwrap();
        assert!((rule.nodes()[0] - r0).abs() < 1e-15);
        assert!((rule.nodes()[1] - r1).abs() < 1e-15);
        assert!((rule.nodes()[0] - (3.0 - 3f64.sqrt()) / 6.0).abs() < 1e-15);
        for w in rule.weights() {
            assert!((w - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn five_points_integrate_ninth_power() {
        let rule = gauss_legendre_rule(5).unwrap();
        assert!((rule.integrate(|t| t.powi(9)) - 0.1).abs() <= 1e-15);
    }

    #[test]
    fn out_of_range_counts_are_rejected() {
        assert!(matches!(
            gauss_legendre_rule(0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            gauss_legendre_rule(65),
            Err(Error::InvalidArgument(_))
        ));
        assert!(gauss_legendre_rule(64).is_ok());
    }

    #[test]
    fn monomial_exactness_up_to_twenty_points() {
        for s in 1..=20 {
            let rule = gauss_legendre_rule(s).unwrap();
            for k in 0..=(2 * s - 1) {
                let got = rule.integrate(|t| t.powi(k as i32));
                let want = 1.0 / (k as f64 + 1.0);
                assert!((got - want).abs() <= 1e-12, "s={s} k={k}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn structural_invariants_hold_for_all_sizes() {
        for s in 1..=MAX_POINTS {
            let rule = gauss_legendre_rule(s).unwrap();
            assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]), "s={s}");
            assert!(rule.nodes().iter().all(|&c| c > 0.0 && c < 1.0));
            assert!(rule.weights().iter().all(|&b| b > 0.0));
            let total: f64 = rule.weights().iter().sum();
            assert!((total - 1.0).abs() <= 1e-14, "s={s}: {total}");
        }
    }

    #[test]
    fn integrate_to_maps_the_interval() {
        let rule = gauss_legendre_rule(3).unwrap();
        let got = rule.integrate_to(0.4, |t| 3.0 * t * t);
        assert!((got - 0.064).abs() < 1e-15);
    }
}
