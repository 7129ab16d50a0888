//! Green's functions of the free Laplacian evaluated between interaction
//! sites, the regularized diagonal values, and a finite-order complete
//! monotonicity certificate.
//!
//! Geometry is normalized: the loop has perimeter `2π`, circles and the sphere
//! have unit radius.

mod bessel;
mod monotone;

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bessel::{bessel_k0, k0_k1, k0_k1_scaled, BesselK0, EULER_GAMMA};
pub use monotone::{complete_monotonicity_check, MonotonicityReport};

/// Distance from an integer within which the positive-energy loop kernel is
/// treated as singular.
pub const POLE_GUARD: f64 = 1e-8;

/// Which half-line of the spectrum a spectral parameter addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParamKind {
    /// `E = -κ²`
    NegativeEnergy,
    /// `E = k²`
    PositiveEnergy,
}

/// A spectral parameter `κ > 0` (energy `-κ²`) or `k > 0` (energy `k²`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralParam {
    pub kind: ParamKind,
    pub value: f64,
}

impl SpectralParam {
    pub fn kappa(value: f64) -> Result<Self> {
        Self::new(ParamKind::NegativeEnergy, value)
    }

    pub fn k(value: f64) -> Result<Self> {
        Self::new(ParamKind::PositiveEnergy, value)
    }

    fn new(kind: ParamKind, value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::Domain(format!(
                "spectral parameter must be positive and finite, got {value}"
            )));
        }
        Ok(SpectralParam { kind, value })
    }

    pub fn energy(&self) -> f64 {
        match self.kind {
            ParamKind::NegativeEnergy => -self.value * self.value,
            ParamKind::PositiveEnergy => self.value * self.value,
        }
    }
}

/// A kernel value and its derivative with respect to the distance argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub derivative_in_distance: Option<f64>,
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::Domain(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

/// Reduces a loop distance in `[0, 2π]` to the geodesic distance in `[0, π]`.
/// The second component is the sign of `d(reduced)/d(input)`.
fn reduce_loop_distance(d: f64) -> Result<(f64, f64)> {
    if !(d.is_finite() && (0.0..=TAU).contains(&d)) {
        return Err(Error::Domain(format!("loop distance must lie in [0, 2π], got {d}")));
    }
    Ok(if d <= PI { (d, 1.0) } else { (TAU - d, -1.0) })
}

/// Loop resolvent kernel at energy `-κ²`:
/// `cosh(κ(π - d)) / (2κ sinh πκ)`.
///
/// Evaluated in exponential form so large `κ` does not overflow.
pub fn green_loop_negative(kappa: f64, d: f64) -> Result<KernelValue> {
    check_positive("kappa", kappa)?;
    let (dr, sign) = reduce_loop_distance(d)?;
    // cosh(κ(π-d))/sinh(πκ) = (e^{-κd} + e^{-κ(2π-d)}) / (1 - e^{-2πκ})
    let near = (-kappa * dr).exp();
    let far = (-kappa * (TAU - dr)).exp();
    let denom = -(-TAU * kappa).exp_m1();
    let value = (near + far) / (2.0 * kappa * denom);
    let derivative = -(near - far) / (2.0 * denom);
    Ok(KernelValue {
        value,
        derivative_in_distance: Some(sign * derivative),
    })
}

/// Loop resolvent kernel at energy `k²`:
/// `-cos(k(π - d)) / (2k sin πk)`.
pub fn green_loop_positive(k: f64, d: f64) -> Result<KernelValue> {
    check_positive("k", k)?;
    let nearest = k.round();
    if (k - nearest).abs() <= POLE_GUARD {
        return Err(Error::Pole {
            k,
            nearest: nearest as i64,
        });
    }
    let (dr, sign) = reduce_loop_distance(d)?;
    let s = (PI * k).sin();
    let arg = k * (PI - dr);
    let value = -arg.cos() / (2.0 * k * s);
    let derivative = -arg.sin() / (2.0 * s);
    Ok(KernelValue {
        value,
        derivative_in_distance: Some(sign * derivative),
    })
}

/// Free Green's function in `ℝ^ν` at energy `-κ²` and Euclidean distance `ℓ`:
/// `K₀(κℓ)/2π` for `ν = 2`, `e^{-κℓ}/(4πℓ)` for `ν = 3`.
pub fn green_free(nu: u32, kappa: f64, ell: f64) -> Result<KernelValue> {
    check_positive("kappa", kappa)?;
    check_positive("distance", ell)?;
    match nu {
        2 => {
            let (k0, k1) = k0_k1(kappa * ell)?;
            Ok(KernelValue {
                value: k0 / (2.0 * PI),
                derivative_in_distance: Some(-kappa * k1 / (2.0 * PI)),
            })
        }
        3 => {
            let e = (-kappa * ell).exp();
            Ok(KernelValue {
                value: e / (4.0 * PI * ell),
                derivative_in_distance: Some(-e * (kappa * ell + 1.0) / (4.0 * PI * ell * ell)),
            })
        }
        _ => Err(Error::Argument(format!("dimension must be 2 or 3, got {nu}"))),
    }
}

/// Regularized value of the free Green's function at the interaction site.
pub fn xi_regularized(nu: u32, kappa: f64) -> Result<f64> {
    check_positive("kappa", kappa)?;
    match nu {
        2 => Ok(-((0.5 * kappa).ln() + EULER_GAMMA) / (2.0 * PI)),
        3 => Ok(-kappa / (4.0 * PI)),
        _ => Err(Error::Argument(format!("dimension must be 2 or 3, got {nu}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `Σ_m e^{imd} / (2π(m² + κ²))`, summed until the terms drop below 1e-17.
    fn loop_series(kappa: f64, d: f64) -> f64 {
        let mut sum = 1.0 / (kappa * kappa);
        let mut m = 1.0_f64;
        loop {
            let t = 2.0 * (m * d).cos() / (m * m + kappa * kappa);
            sum += t;
            if 2.0 / (m * m) < 1e-11 {
                break;
            }
            m += 1.0;
        }
        // Tail Σ_{m>M} 2cos(md)/m² is O(1/M²) after partial summation; the
        // loop above stops once that is well below the tolerance.
        sum / TAU
    }

    #[test]
    fn loop_negative_midpoint_and_diagonal() {
        let g = green_loop_negative(1.0, PI).unwrap();
        assert!((g.value - 1.0 / (2.0 * PI.sinh())).abs() < 1e-15);
        assert!(g.derivative_in_distance.unwrap().abs() < 1e-15);
        let g0 = green_loop_negative(1.0, 0.0).unwrap();
        assert!((g0.value - 0.5 / PI.tanh()).abs() < 1e-15);
    }

    #[test]
    fn loop_negative_matches_eigenfunction_series() {
        let direct = green_loop_negative(0.5, PI / 2.0).unwrap().value;
        assert!((direct - 0.5755919354604243).abs() < 1e-14);
        for &kappa in &[0.3, 0.5, 1.0, 2.5] {
            for &d in &[0.1, 0.7, PI / 2.0, 2.0, PI, 4.0] {
                let s = loop_series(kappa, d);
                let g = green_loop_negative(kappa, d).unwrap().value;
                assert!((g - s).abs() < 1e-10, "κ={kappa} d={d}: {g} vs {s}");
            }
        }
    }

    #[test]
    fn loop_negative_symmetric_and_large_kappa() {
        for &d in &[0.2, 1.0, 3.0] {
            let a = green_loop_negative(1.3, d).unwrap();
            let b = green_loop_negative(1.3, TAU - d).unwrap();
            assert!((a.value - b.value).abs() < 1e-15);
            assert!((a.derivative_in_distance.unwrap() + b.derivative_in_distance.unwrap()).abs() < 1e-15);
        }
        let g = green_loop_negative(500.0, 0.0).unwrap().value;
        assert!((g - 1.0 / 1000.0).abs() < 1e-15);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-6;
        let fd = |f: &dyn Fn(f64) -> f64, x: f64| (f(x + h) - f(x - h)) / (2.0 * h);
        for &d in &[0.3, 1.1, 2.9, 3.5, 5.0] {
            let a = |x| green_loop_negative(0.8, x).unwrap().value;
            let da = green_loop_negative(0.8, d).unwrap().derivative_in_distance.unwrap();
            assert!((fd(&a, d) - da).abs() < 1e-7);
            let b = |x| green_loop_positive(0.37, x).unwrap().value;
            let db = green_loop_positive(0.37, d).unwrap().derivative_in_distance.unwrap();
            assert!((fd(&b, d) - db).abs() < 1e-7);
        }
        for nu in [2, 3] {
            for &l in &[0.05, 0.5, 1.4, 2.0] {
                let f = |x| green_free(nu, 1.7, x).unwrap().value;
                let df = green_free(nu, 1.7, l).unwrap().derivative_in_distance.unwrap();
                assert!(((fd(&f, l) - df) / df).abs() < 1e-6, "ν={nu} ℓ={l}");
            }
        }
    }

    #[test]
    fn loop_positive_examples() {
        // -cos(kπ)/(2k sin πk) at the site, -1/(2k sin πk) at the antipode.
        let g = green_loop_positive(0.5, 0.0).unwrap().value;
        assert!(g.abs() < 1e-15);
        let g = green_loop_positive(0.25, 0.0).unwrap().value;
        assert!((g + 2.0).abs() < 1e-14);
        let g = green_loop_positive(0.25, PI).unwrap().value;
        assert!((g + 2.0 * 2f64.sqrt()).abs() < 1e-14);
        for k in [1.0, 2.0, 3.0 + 5e-9] {
            assert!(matches!(green_loop_positive(k, 1.0), Err(Error::Pole { .. })));
        }
        assert!(green_loop_positive(1.0 + 1e-7, 1.0).is_ok());
    }

    #[test]
    fn loop_positive_pole_is_simple() {
        // g(k, d) sin(πk) is continuous across integers.
        for m in [1.0, 2.0, 3.0] {
            for &d in &[0.0, 0.9, 2.2] {
                let eps = 1e-5;
                let lo = green_loop_positive(m - eps, d).unwrap().value * (PI * (m - eps)).sin();
                let hi = green_loop_positive(m + eps, d).unwrap().value * (PI * (m + eps)).sin();
                let limit = -(m * (PI - d)).cos() / (2.0 * m);
                assert!((lo - limit).abs() < 1e-4 && (hi - limit).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(green_loop_negative(0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(green_loop_negative(f64::NAN, 1.0), Err(Error::Domain(_))));
        assert!(matches!(green_loop_negative(1.0, -0.1), Err(Error::Domain(_))));
        assert!(matches!(green_loop_negative(1.0, 7.0), Err(Error::Domain(_))));
        assert!(matches!(green_free(3, 1.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(green_free(4, 1.0, 1.0), Err(Error::Argument(_))));
        assert!(matches!(xi_regularized(3, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn free_kernel_examples() {
        let g = green_free(3, 1.0, 1.0).unwrap().value;
        assert!((g - (-1f64).exp() / (4.0 * PI)).abs() < 1e-16);
        let g = green_free(3, 2.0, 0.5).unwrap().value;
        assert!((g - (-1f64).exp() / (2.0 * PI)).abs() < 1e-16);
        let g = green_free(2, 1.0, 1.0).unwrap().value;
        assert!((g - 0.42102443824070834 / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn xi_examples() {
        assert!((xi_regularized(3, 4.0 * PI).unwrap() + 1.0).abs() < 1e-15);
        let k = 2.0 * (-EULER_GAMMA).exp();
        assert!(xi_regularized(2, k).unwrap().abs() < 1e-16);
        assert!((xi_regularized(2, 2.0).unwrap() + EULER_GAMMA / (2.0 * PI)).abs() < 1e-16);
    }

    #[test]
    fn free_kernel_decreasing_and_convex() {
        for nu in [2, 3] {
            for &kappa in &[0.1, 1.0, 5.0] {
                let h = 1e-3;
                let mut l = 0.01;
                while l < 2.0 {
                    let f = |x| green_free(nu, kappa, x).unwrap().value;
                    assert!(f(l + h) < f(l));
                    assert!(f(l + h) - 2.0 * f(l) + f(l - h) > 0.0, "ν={nu} κ={kappa} ℓ={l}");
                    l += 0.01;
                }
            }
        }
    }

    #[test]
    fn xi_relations() {
        let a = xi_regularized(2, 0.7).unwrap() - xi_regularized(2, 3.1).unwrap();
        assert!((a + (0.7f64 / 3.1).ln() / TAU).abs() < 1e-15);
        let x1 = xi_regularized(3, 1.0).unwrap();
        assert!((xi_regularized(3, 3.0).unwrap() - 3.0 * x1).abs() < 1e-15);
    }

    #[test]
    fn spectral_param() {
        assert_eq!(SpectralParam::kappa(2.0).unwrap().energy(), -4.0);
        assert_eq!(SpectralParam::k(3.0).unwrap().energy(), 9.0);
        assert!(SpectralParam::k(0.0).is_err());
        assert!(SpectralParam::kappa(f64::INFINITY).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn loop_negative_strictly_convex(
                kappa in prop::sample::select(vec![0.1, 0.5, 1.0, 3.0]),
                a in 0.01f64..3.1,
                b in 0.01f64..3.1,
                t in 0.05f64..0.95,
            ) {
                prop_assume!((a - b).abs() > 1e-2);
                let g = |x| green_loop_negative(kappa, x).unwrap().value;
                let lhs = g(t * a + (1.0 - t) * b);
                let rhs = t * g(a) + (1.0 - t) * g(b);
                prop_assert!(lhs < rhs);
            }

            #[test]
            fn negative_kernel_positive(kappa in 1e-3f64..50.0, d in 0.0f64..TAU) {
                prop_assert!(green_loop_negative(kappa, d).unwrap().value > 0.0);
            }
        }
    }
}
