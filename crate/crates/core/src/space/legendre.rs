/// Orthonormal shifted Legendre polynomial `p̂_j` on `[0, 1]`.
///
/// Evaluated with the three-term recurrence in `x = 2t − 1` and scaled by
/// `√(2j + 1)`; this avoids the cancellation of the explicit binomial sum.
pub fn shifted_legendre(j: usize, t: f64) -> f64 {
    legendre_all(j + 1, t)[j]
}

/// `p̂_0(t), …, p̂_{n−1}(t)`.
pub(crate) fn legendre_all(n: usize, t: f64) -> Vec<f64> {
    let x = 2.0 * t - 1.0;
    let mut out = Vec::with_capacity(n);
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        out.push(cur * ((2 * k + 1) as f64).sqrt());
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: u64, k: u64) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    /// The explicit sum `(−1)^j √(2j+1) Σ_k C(j,k) C(j+k,k) (−t)^k`, with
    /// the magnitude of its terms as a bound on its own rounding error.
    fn explicit_sum(j: u64, t: f64) -> (f64, f64) {
        let terms: Vec<f64> = (0..=j)
            .map(|k| binomial(j, k) * binomial(j + k, k) * (-t).powi(k as i32))
            .collect();
        let scale = ((2 * j + 1) as f64).sqrt();
        let sum: f64 = terms.iter().sum();
        let mag: f64 = terms.iter().map(|x| x.abs()).sum();
        ((-1f64).powi(j as i32) * scale * sum, scale * mag)
    }

    #[test]
    fn low_order_values() {
        assert_eq!(shifted_legendre(0, 0.3), 1.0);
        assert!((shifted_legendre(1, 1.0) - 3f64.sqrt()).abs() < 1e-15);
        assert!((shifted_legendre(2, 0.5) + 5f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn recurrence_matches_binomial_sum() {
        for j in 0..=12u64 {
            for i in 0..=50 {
                let t = i as f64 / 50.0;
                let a = shifted_legendre(j as usize, t);
                let (b, mag) = explicit_sum(j, t);
                let tol = 1e-13 + 64.0 * f64::EPSILON * mag;
                assert!((a - b).abs() <= tol, "j={j} t={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn orthonormal_under_exact_quadrature() {
        let rule = crate::numeric::gauss_legendre_rule(14).unwrap();
        for i in 0..=12 {
            for j in 0..=12 {
                let g = rule.integrate(|t| shifted_legendre(i, t) * shifted_legendre(j, t));
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - want).abs() < 1e-12, "({i},{j}) {g}");
            }
        }
    }
}
