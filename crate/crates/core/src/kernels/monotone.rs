use serde::Serialize;

use crate::error::{Error, Result};

const MAX_ORDER: usize = 8;
const TOLERANCE: f64 = 1e-12;

/// Outcome of [`complete_monotonicity_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub pass: bool,
    /// Largest amount by which `(-1)^n Δⁿ` fell below zero, over all windows
    /// and orders (0 when nothing was violated).
    pub worst_violation: f64,
    /// Order at which the worst violation occurred.
    pub worst_order: usize,
}

/// Finite-order certificate of complete monotonicity on `(0, 4]`.
///
/// For every `n <= order` and every window of `n + 1` consecutive sample
/// points, the `n`-th divided difference is computed on the window rescaled
/// to `[0, 1]` with function values divided by their largest magnitude in the
/// window, and `(-1)^n Δⁿ >= -1e-12` is required. Divided differences equal
/// `f⁽ⁿ⁾(ξ)/n!` for some interior `ξ`, so a completely monotonic `f` passes
/// every window.
pub fn complete_monotonicity_check<F>(f: F, order: usize, sample_points: &[f64]) -> Result<MonotonicityReport>
where
    F: Fn(f64) -> f64,
{
    if order > MAX_ORDER {
        return Err(Error::Argument(format!(
            "order must be at most {MAX_ORDER}, got {order}"
        )));
    }
    if sample_points.len() < order + 1 {
        return Err(Error::Argument(format!(
            "order {order} needs at least {} sample points, got {}",
            order + 1,
            sample_points.len()
        )));
    }
    if sample_points.iter().any(|&s| !(s > 0.0 && s <= 4.0)) {
        return Err(Error::Argument("sample points must lie in (0, 4]".into()));
    }
    if sample_points.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Argument("sample points must be strictly increasing".into()));
    }

    let values: Vec<f64> = sample_points.iter().map(|&s| f(s)).collect();
    let mut worst_violation = 0.0_f64;
    let mut worst_order = 0;

    for n in 0..=order {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        for start in 0..sample_points.len() - n {
            let s = &sample_points[start..=start + n];
            let v = &values[start..=start + n];
            let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            let delta = if scale == 0.0 {
                0.0
            } else {
                let width = if n == 0 { 1.0 } else { s[n] - s[0] };
                let t: Vec<f64> = s.iter().map(|x| (x - s[0]) / width).collect();
                let y: Vec<f64> = v.iter().map(|x| x / scale).collect();
                divided_difference(&t, &y)
            };
            let violation = -(sign * delta);
            if violation > worst_violation {
                worst_violation = violation;
                worst_order = n;
            }
        }
    }

    Ok(MonotonicityReport {
        pass: worst_violation <= TOLERANCE,
        worst_violation,
        worst_order,
    })
}

/// Top-order Newton divided difference `f[t_0, ..., t_n]`.
fn divided_difference(t: &[f64], y: &[f64]) -> f64 {
    let mut table = y.to_vec();
    let n = t.len();
    for level in 1..n {
        for i in 0..n - level {
            table[i] = (table[i + 1] - table[i]) / (t[i + level] - t[i]);
        }
    }
    table[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
    }

    #[test]
    fn yukawa_of_sqrt_passes() {
        let pts = log_spaced(1e-3, 4.0, 64);
        let f = |s: f64| (-s.sqrt()).exp() / (4.0 * PI * s.sqrt());
        let r = complete_monotonicity_check(f, 6, &pts).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.worst_violation < 1e-12);
    }

    #[test]
    fn linear_functions() {
        let pts = log_spaced(0.01, 4.0, 20);
        // Increasing: positive, but the first difference has the wrong sign.
        assert!(complete_monotonicity_check(|s| s, 0, &pts).unwrap().pass);
        let r = complete_monotonicity_check(|s| s, 1, &pts).unwrap();
        assert!(!r.pass);
        assert_eq!(r.worst_order, 1);
        // Positive decreasing linear: all differences beyond the first vanish.
        assert!(complete_monotonicity_check(|s| 4.5 - s, 2, &pts).unwrap().pass);
        // Negated: fails already at order 0.
        let r = complete_monotonicity_check(|s| s - 4.5, 2, &pts).unwrap();
        assert!(!r.pass);
        assert_eq!(r.worst_order, 0);
    }

    #[test]
    fn oscillation_fails() {
        let pts = log_spaced(1e-3, 4.0, 64);
        let r = complete_monotonicity_check(|s| (10.0 * s).sin(), 3, &pts).unwrap();
        assert!(!r.pass);
        assert!(r.worst_violation > 0.1);
    }

    #[test]
    fn argument_errors() {
        let pts = [0.5, 1.0, 2.0];
        assert!(complete_monotonicity_check(|s| s, 3, &pts).is_err());
        assert!(complete_monotonicity_check(|s| s, 9, &log_spaced(0.1, 4.0, 20)).is_err());
        assert!(complete_monotonicity_check(|s| s, 1, &[1.0, 0.5]).is_err());
        assert!(complete_monotonicity_check(|s| s, 1, &[0.0, 0.5]).is_err());
        assert!(complete_monotonicity_check(|s| s, 1, &[1.0, 5.0]).is_err());
    }
}
