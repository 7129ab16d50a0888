//! Transfer-matrix description of the loop: 2×2 propagators in the
//! `(ψ, ψ')` basis across the free arcs and the derivative jumps
//! `ψ'(y+) - ψ'(y-) = α ψ(y)` at the sites.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::configurations::{Configuration, Setting};
use crate::error::{Error, Result};

/// Monodromy of the loop at a fixed energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Monodromy {
    pub matrix: [[f64; 2]; 2],
    pub energy: f64,
    /// Trace of the matrix; `energy` is an eigenvalue of the loop operator
    /// iff it equals 2.
    pub discriminant: f64,
    /// Product of the norms of the factors; rounding errors in the entries
    /// are of order `ε · scale`, which can far exceed `‖matrix‖` when
    /// growing and decaying arcs cancel.
    pub scale: f64,
}

impl Monodromy {
    pub fn determinant(&self) -> f64 {
        let m = &self.matrix;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.matrix)
    }

    /// `|D - 2|` relative to the rounding scale of the product.
    pub fn periodic_defect(&self) -> f64 {
        (self.discriminant - 2.0).abs() / self.scale.max(1.0)
    }
}

fn norm2(m: &M2) -> f64 {
    m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

type M2 = [[f64; 2]; 2];

fn mul(a: &M2, b: &M2) -> M2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// Free propagation over an arc of length `len` at energy `energy`.
fn propagator(energy: f64, len: f64) -> M2 {
    if energy > 0.0 {
        let k = energy.sqrt();
        let (s, c) = (k * len).sin_cos();
        [[c, s / k], [-k * s, c]]
    } else if energy < 0.0 {
        let kappa = (-energy).sqrt();
        let (s, c) = ((kappa * len).sinh(), (kappa * len).cosh());
        [[c, s / kappa], [kappa * s, c]]
    } else {
        [[1.0, len], [0.0, 1.0]]
    }
}

fn jump(alpha: f64) -> M2 {
    [[1.0, 0.0], [alpha, 1.0]]
}

fn loop_angles(config: &Configuration) -> Result<&[f64]> {
    if config.setting() != Setting::Loop {
        return Err(Error::Argument(format!(
            "transfer matrices describe the loop, got {}",
            config.setting()
        )));
    }
    Ok(config.angles().expect("loop configurations carry angles"))
}

/// Arc lengths from each site to the next one, cyclically.
pub(crate) fn gaps(angles: &[f64]) -> Vec<f64> {
    let n = angles.len();
    (0..n)
        .map(|j| {
            if j + 1 < n {
                angles[j + 1] - angles[j]
            } else {
                angles[0] + TAU - angles[n - 1]
            }
        })
        .collect()
}

/// Monodromy around the loop starting just after the first site.
pub fn monodromy_discriminant(alpha: f64, config: &Configuration, energy: f64) -> Result<Monodromy> {
    let angles = loop_angles(config)?;
    if !energy.is_finite() || !alpha.is_finite() {
        return Err(Error::Argument("energy and alpha must be finite".into()));
    }
    let j = jump(alpha);
    let mut m: M2 = [[1.0, 0.0], [0.0, 1.0]];
    let mut scale = 1.0;
    for len in gaps(angles) {
        let f = mul(&j, &propagator(energy, len));
        scale *= norm2(&f);
        m = mul(&f, &m);
    }
    Ok(Monodromy {
        matrix: m,
        energy,
        discriminant: m[0][0] + m[1][1],
        scale,
    })
}

/// Number of zeros in `(x₀, x₀ + 2π]` of the solution with `ψ(x₀) = 0`,
/// `ψ'(x₀) = 1`, where `x₀` is the midpoint of the largest arc. By Sturm
/// oscillation this counts the Dirichlet eigenvalues of the loop cut open at
/// `x₀` that lie below `energy`.
pub fn dirichlet_zero_count(alpha: f64, config: &Configuration, energy: f64) -> Result<usize> {
    let angles = loop_angles(config)?;
    let g = gaps(angles);
    let n = g.len();
    let start = (0..n).max_by(|&a, &b| g[a].total_cmp(&g[b])).unwrap();
    // Arc pieces from the cut point, with a jump after every piece but the last.
    let mut pieces = Vec::with_capacity(n + 1);
    pieces.push(0.5 * g[start]);
    for step in 1..n {
        pieces.push(g[(start + step) % n]);
    }
    pieces.push(0.5 * g[start]);

    let mut psi = 0.0;
    let mut dpsi = 1.0;

    if energy > 0.0 {
        // Prüfer phase: ψ = R sin θ, ψ'/k = R cos θ.
        let k = energy.sqrt();
        let mut theta = 0.0_f64;
        for (i, &len) in pieces.iter().enumerate() {
            let p = propagator(energy, len);
            let (a, b) = (p[0][0] * psi + p[0][1] * dpsi, p[1][0] * psi + p[1][1] * dpsi);
            psi = a;
            dpsi = b;
            theta += k * len;
            if i + 1 < pieces.len() && psi != 0.0 {
                dpsi += alpha * psi;
                let branch = (theta / PI).floor();
                let phi = psi.atan2(dpsi / k);
                let base = branch * PI;
                let mut t = phi - TAU * ((phi - base) / TAU).floor();
                if t > base + PI {
                    t = base + PI;
                }
                theta = t;
            }
        }
        Ok((theta / PI).floor().max(0.0) as usize)
    } else {
        // At most one zero per arc for non-positive energies.
        let mut count = 0;
        let mut sign = 1.0_f64;
        for (i, &len) in pieces.iter().enumerate() {
            let p = propagator(energy, len);
            let (a, b) = (p[0][0] * psi + p[0][1] * dpsi, p[1][0] * psi + p[1][1] * dpsi);
            psi = a;
            dpsi = b;
            if psi == 0.0 {
                count += 1;
                sign = dpsi.signum();
            } else if psi.signum() != sign {
                count += 1;
                sign = psi.signum();
            }
            if i + 1 < pieces.len() {
                dpsi += alpha * psi;
            }
        }
        Ok(count)
    }
}

/// Whether `energy` lies strictly below the ground state of the loop
/// operator: the discriminant exceeds 2 and the cut-open solution has no zero.
pub fn below_ground_state(alpha: f64, config: &Configuration, energy: f64) -> Result<bool> {
    let m = monodromy_discriminant(alpha, config, energy)?;
    if m.discriminant.is_nan() || m.discriminant <= 2.0 {
        return Ok(false);
    }
    Ok(dirichlet_zero_count(alpha, config, energy)? == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configurations::{canonical_loop, random_config};

    #[test]
    fn free_loop_discriminant() {
        let c = random_config(Setting::Loop, 4, 3).unwrap();
        for &k in &[0.3, 1.0, 1.7, 2.0] {
            let m = monodromy_discriminant(0.0, &c, k * k).unwrap();
            assert!((m.discriminant - 2.0 * (TAU * k).cos()).abs() < 1e-12);
        }
        let m = monodromy_discriminant(0.0, &c, -1.0).unwrap();
        assert!((m.discriminant - 2.0 * TAU.cosh()).abs() < 1e-9 * TAU.cosh());
    }

    #[test]
    fn unimodular() {
        for seed in 0..20 {
            let c = random_config(Setting::Loop, 2 + (seed as usize % 5), seed).unwrap();
            let alpha = -3.0 + 0.37 * seed as f64;
            for &e in &[-4.0, -0.3, 0.0, 0.4, 3.3] {
                let m = monodromy_discriminant(alpha, &c, e).unwrap();
                assert!((m.determinant() - 1.0).abs() < 1e-12 * m.norm().powi(2).max(1.0));
            }
        }
    }

    #[test]
    fn single_site_closed_form() {
        // 2cos(2πk) + (α/k) sin(2πk)
        let c = Configuration::from_angles(Setting::Loop, &[1.0]).unwrap();
        for &(alpha, k) in &[(1.0, 0.3), (2.5, 0.8), (-1.0, 1.4)] {
            let m = monodromy_discriminant(alpha, &c, k * k).unwrap();
            let want = 2.0 * (TAU * k).cos() + alpha / k * (TAU * k).sin();
            assert!((m.discriminant - want).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_count_matches_free_dirichlet() {
        // α = 0: the cut loop is a Dirichlet interval of length 2π with
        // eigenvalues (m/2)².
        let c = canonical_loop(3).unwrap();
        for &(e, want) in &[(-1.0, 0), (0.2, 0), (0.3, 1), (0.9, 1), (1.1, 2), (5.0, 4)] {
            assert_eq!(dirichlet_zero_count(0.0, &c, e).unwrap(), want, "E = {e}");
        }
    }

    #[test]
    fn rejects_other_settings() {
        let c = canonical_loop(3).unwrap().in_setting(Setting::Circle2).unwrap();
        assert!(monodromy_discriminant(1.0, &c, 1.0).is_err());
    }
}
