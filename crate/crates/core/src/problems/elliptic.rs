//! Complete elliptic integral `K(m)` and Jacobi elliptic functions via the
//! arithmetic–geometric mean. The second argument is the parameter `m = k²`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

const AGM_MAX_ITER: usize = 40;
const AGM_RTOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticState {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

fn check_parameter(m: f64) -> Result<()> {
    if !(0.0..1.0).contains(&m) {
        return Err(Error::InvalidArgument(format!(
            "elliptic parameter m = {m} outside [0, 1)"
        )));
    }
    Ok(())
}

fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= AGM_RTOL * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    0.5 * (a + b)
}

/// `K(m) = π / (2 AGM(1, √(1 − m)))`.
pub fn complete_elliptic_k(m: f64) -> Result<f64> {
    check_parameter(m)?;
    Ok(FRAC_PI_2 / agm(1.0, (1.0 - m).sqrt()))
}

/// `sn(u|m)`, `cn(u|m)`, `dn(u|m)` by the descending Landen sequence and
/// backward recovery of the amplitude `φ`; `sn = sin φ`, `cn = cos φ`.
pub fn jacobi_sn_cn_dn(u: f64, m: f64) -> Result<EllipticState> {
    check_parameter(m)?;
    if !u.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "argument u = {u} is not finite"
        )));
    }
    if m == 0.0 {
        return Ok(EllipticState {
            sn: u.sin(),
            cn: u.cos(),
            dn: 1.0,
        });
    }

    let mut a = vec![1.0];
    let mut c = vec![m.sqrt()];
    let mut b = (1.0 - m).sqrt();
    for _ in 0..AGM_MAX_ITER {
        let an = *a.last().unwrap();
        if c.last().unwrap().abs() <= AGM_RTOL * an {
            break;
        }
        a.push(0.5 * (an + b));
        c.push(0.5 * (an - b));
        b = (an * b).sqrt();
    }
    let n = a.len() - 1;
    let mut phi = (1u64 << n) as f64 * a[n] * u;
    for k in (1..=n).rev() {
        phi = 0.5 * (phi + (c[k] / a[k] * phi.sin()).asin());
    }
    let (sn, cn) = phi.sin_cos();
    // 1 − m sn² written without cancellation; the ratio cn / cos(φ₁ − φ₀)
    // is 0/0 at u = K
    let dn = (cn * cn + (1.0 - m) * sn * sn).sqrt();
    Ok(EllipticState { sn, cn, dn })
}
