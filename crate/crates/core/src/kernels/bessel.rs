//! Modified Bessel functions of the second kind, orders zero and one.
//!
//! Power series with the logarithmic term for `x <= 2`, Steed's continued
//! fraction (Temme's form) for `x > 2`. The continued fraction yields the
//! `e^x`-scaled values, so both branches stay accurate up to the underflow
//! threshold.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_CUTOFF: f64 = 2.0;
const MAX_ITER: usize = 10_000;

/// `K_0(x)` together with a flag telling whether the result underflowed to 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselK0 {
    pub value: f64,
    pub underflow: bool,
}

/// Modified Bessel function `K_0(x)` for `x > 0`.
pub fn bessel_k0(x: f64) -> Result<BesselK0> {
    let (k0, _) = k0_k1(x)?;
    let underflow = k0 < f64::MIN_POSITIVE;
    Ok(BesselK0 {
        value: if underflow { 0.0 } else { k0 },
        underflow,
    })
}

/// `(K_0(x), K_1(x))` for `x > 0`. Values below the normal range are flushed
/// to zero.
pub fn k0_k1(x: f64) -> Result<(f64, f64)> {
    check_arg(x)?;
    if x <= SERIES_CUTOFF {
        Ok(series(x))
    } else {
        let (k0e, k1e) = steed_scaled(x);
        let scale = (-x).exp();
        let flush = |v: f64| if v < f64::MIN_POSITIVE { 0.0 } else { v };
        Ok((flush(k0e * scale), flush(k1e * scale)))
    }
}

/// `(e^x K_0(x), e^x K_1(x))` for `x > 0`.
pub fn k0_k1_scaled(x: f64) -> Result<(f64, f64)> {
    check_arg(x)?;
    if x <= SERIES_CUTOFF {
        let (k0, k1) = series(x);
        let s = x.exp();
        Ok((k0 * s, k1 * s))
    } else {
        Ok(steed_scaled(x))
    }
}

fn check_arg(x: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::Domain(format!("Bessel K needs x > 0, got {x}")));
    }
    Ok(())
}

fn series(x: f64) -> (f64, f64) {
    let y = 0.25 * x * x;
    let log_term = (0.5 * x).ln();

    // I0, I1 and the digamma-weighted sums of the K-series.
    let mut i0 = 0.0;
    let mut i1 = 0.0;
    let mut k0_sum = 0.0;
    let mut k1_sum = 0.0;

    // t0 = y^k / (k!)^2, t1 = y^k / (k! (k+1)!)
    let mut t0 = 1.0;
    let mut t1 = 1.0;
    // h = H_k (harmonic number)
    let mut h = 0.0;
    for k in 0..MAX_ITER {
        let kf = k as f64;
        if k > 0 {
            t0 *= y / (kf * kf);
            t1 *= y / (kf * (kf + 1.0));
            h += 1.0 / kf;
        }
        let h_next = h + 1.0 / (kf + 1.0);
        i0 += t0;
        i1 += t1;
        k0_sum += h * t0;
        k1_sum += (h + h_next - 2.0 * EULER_GAMMA) * t1;
        if t0 < 1e-18 * i0 && t1 < 1e-18 * i1 {
            break;
        }
    }
    let i1 = 0.5 * x * i1;
    let k0 = -(log_term + EULER_GAMMA) * i0 + k0_sum;
    let k1 = 1.0 / x + log_term * i1 - 0.25 * x * k1_sum;
    (k0, k1)
}

/// Steed's method for `K_0`, `K_1` at `x >= 2`, returned scaled by `e^x`.
fn steed_scaled(x: f64) -> (f64, f64) {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < f64::EPSILON {
            break;
        }
    }
    let h = a1 * h;
    let k0 = (PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}
