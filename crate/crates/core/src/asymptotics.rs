//! Weak- and strong-coupling behaviour of the repulsive loop.
//!
//! For small `α > 0`, `λ₁(α, Y) = c₁α + c₂α² + O(α³)` with `c₁ = N/2π` and
//! `c₂ = -(1/2π²) Σ_{m≥1} |Σ_j e^{imy_j}|² / m²`. Summing the inner series
//! with `Σ_m cos(mθ)/m² = π² B₂(θ/2π)` gives `c₂ = -½ Σ_{j,j'} B₂(x_jj')`
//! with `x_jj'` the forward arc from `y_j` to `y_j'` as a fraction of the
//! loop. For large `α`, `λ₁` increases to the Dirichlet value `(π/max gap)²`
//! from below, with a gap of order `1/α`.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use serde::Serialize;

use crate::configurations::{Configuration, Setting};
use crate::error::{Error, Result};
use crate::optimizer::fmt_f64;
use crate::spectral::{dirichlet_ground, ground_state_positive_loop};

pub const MIN_SERIES_TERMS: usize = 100;
pub const WEAK_ALPHA_MAX: f64 = 0.2;
pub const STRONG_ALPHA_MIN: f64 = 10.0;
/// Couplings used for the extrapolation of `α (λ_D - λ₁(α))`.
pub const RICHARDSON_ALPHAS: [f64; 3] = [1e2, 1e3, 1e4];

#[derive(Debug, Clone, Copy, Serialize)]
pub struct WeakExpansion {
    pub c1: f64,
    pub c2_series: f64,
    pub c2_closed: f64,
    pub terms_used: usize,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SeriesValue {
    /// Partial sum plus the exact tail of the diagonal (`j = j'`) terms.
    pub value: f64,
    /// The plain partial sum up to `m_max`.
    pub partial_sum: f64,
    /// `N² / (2π² m_max)`, a bound on the omitted tail of the plain sum.
    pub tail_bound: f64,
    pub m_max: usize,
}

fn loop_angles(config: &Configuration) -> Result<&[f64]> {
    if config.setting() != Setting::Loop {
        return Err(Error::Argument(format!(
            "the expansion is developed for the loop, got {}",
            config.setting()
        )));
    }
    Ok(config.angles().expect("loop angles"))
}

/// `ψ₁(x) = Σ_{m≥0} 1/(x+m)²` for `x ≥ 1`: recurrence up to 30, then the
/// asymptotic series.
fn trigamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 30.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let r = 1.0 / x;
    let r2 = r * r;
    acc + r + 0.5 * r2 + r * r2 * (1.0 / 6.0 - r2 * (1.0 / 30.0 - r2 * (1.0 / 42.0 - r2 / 30.0)))
}

/// Second-order coefficient by direct summation of `m = 1..=m_max`.
///
/// The diagonal part of `|Σ_j e^{imy_j}|²` is the constant `N`, whose tail
/// `N ψ₁(m_max + 1)` is added exactly; the remaining tail is oscillatory and
/// of order `m_max⁻²`.
pub fn c2_series(config: &Configuration, m_max: usize) -> Result<SeriesValue> {
    let y = loop_angles(config)?;
    if m_max < MIN_SERIES_TERMS {
        return Err(Error::Argument(format!(
            "m_max must be at least {MIN_SERIES_TERMS}, got {m_max}"
        )));
    }
    let n = y.len() as f64;
    // Rotate each phase by y_j per step instead of calling sin_cos for each
    // m; renormalize periodically to stop drift.
    let steps: Vec<(f64, f64)> = y.iter().map(|&t| (t.cos(), t.sin())).collect();
    let mut phase = steps.clone();
    let mut sum = 0.0;
    for m in 1..=m_max {
        if m > 1 {
            if m % 64 == 0 {
                for (p, &t) in phase.iter_mut().zip(y) {
                    let (s, c) = ((m as f64) * t).sin_cos();
                    *p = (c, s);
                }
            } else {
                for (p, s) in phase.iter_mut().zip(&steps) {
                    *p = (p.0 * s.0 - p.1 * s.1, p.0 * s.1 + p.1 * s.0);
                }
            }
        }
        let (re, im) = phase.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
        let mf = m as f64;
        sum += (re * re + im * im) / (mf * mf);
    }
    let scale = -1.0 / (2.0 * PI * PI);
    let tail = n * trigamma(m_max as f64 + 1.0);
    Ok(SeriesValue {
        value: scale * (sum + tail),
        partial_sum: scale * sum,
        tail_bound: n * n / (2.0 * PI * PI * m_max as f64),
        m_max,
    })
}

fn bernoulli2(x: f64) -> f64 {
    x * x - x + 1.0 / 6.0
}

/// `(y' - y) mod 2π` as a fraction of the loop, in `[0, 1)`.
fn forward_fraction(y: f64, y2: f64) -> f64 {
    let x = (y2 - y).rem_euclid(TAU) / TAU;
    if x >= 1.0 {
        0.0
    } else {
        x
    }
}

/// Closed form `c₂ = -½ Σ_{j,j'} B₂(x_jj')`.
pub fn c2_closed(config: &Configuration) -> Result<f64> {
    let y = loop_angles(config)?;
    let mut s = 0.0;
    for &a in y {
        for &b in y {
            s += bernoulli2(forward_fraction(a, b));
        }
    }
    Ok(-0.5 * s)
}

/// `Σ_{j≠j'} ((y_j' - y_j) mod 2π)²`, the configuration-dependent part of
/// `c₂`; equal to `(2/3)π²(N-1)(2N-1)` for equidistant sites, its minimum.
pub fn forward_arc_square_sum(config: &Configuration) -> Result<f64> {
    let y = loop_angles(config)?;
    let mut s = 0.0;
    for &a in y {
        for &b in y {
            s += (TAU * forward_fraction(a, b)).powi(2);
        }
    }
    Ok(s)
}

pub fn weak_expansion(config: &Configuration, m_max: usize) -> Result<WeakExpansion> {
    let series = c2_series(config, m_max)?;
    Ok(WeakExpansion {
        c1: config.len() as f64 / (2.0 * PI),
        c2_series: series.value,
        c2_closed: c2_closed(config)?,
        terms_used: m_max,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExpansionRow {
    pub alpha: f64,
    pub lambda1: f64,
    pub model_value: f64,
    pub residual: f64,
}

fn rows_csv(rows: &[ExpansionRow]) -> String {
    let mut out = String::from("alpha,lambda1,model_value,residual\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_f64(r.alpha),
            fmt_f64(r.lambda1),
            fmt_f64(r.model_value),
            fmt_f64(r.residual)
        );
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct WeakReport {
    pub expansion: WeakExpansion,
    /// Intercept of a least-squares line through `(α, λ₁(α)/α)`.
    pub c1_recovered: f64,
    /// Slope `p` and prefactor `C` of the fit `|r(α)| ≈ C α^p`, where
    /// `r = λ₁ - c₁α - c₂α²`.
    pub exponent: f64,
    pub constant: f64,
    pub rows: Vec<ExpansionRow>,
}

impl WeakReport {
    pub fn to_csv(&self) -> String {
        rows_csv(&self.rows)
    }
}

fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}

/// Terms used for `c₂` in the expansion checks.
pub const CHECK_TERMS: usize = 100_000;

/// Compares the repulsive solver with `c₁α + c₂α²` on a grid of small
/// couplings and fits the remainder exponent.
pub fn weak_expansion_check(config: &Configuration, alpha_grid: &[f64]) -> Result<WeakReport> {
    if alpha_grid.len() < 4 {
        return Err(Error::Argument(format!(
            "the remainder fit needs at least 4 couplings, got {}",
            alpha_grid.len()
        )));
    }
    if let Some(a) = alpha_grid.iter().find(|&&a| !(a > 0.0 && a <= WEAK_ALPHA_MAX)) {
        return Err(Error::Argument(format!(
            "weak-coupling grid must lie in (0, {WEAK_ALPHA_MAX}], got {a}"
        )));
    }
    let expansion = weak_expansion(config, CHECK_TERMS)?;
    let (c1, c2) = (expansion.c1, expansion.c2_closed);
    let mut rows = Vec::with_capacity(alpha_grid.len());
    for &alpha in alpha_grid {
        let lambda1 = ground_state_positive_loop(alpha, config)?.lambda1;
        let model_value = c1 * alpha + c2 * alpha * alpha;
        rows.push(ExpansionRow {
            alpha,
            lambda1,
            model_value,
            residual: lambda1 - model_value,
        });
    }
    let alphas: Vec<f64> = rows.iter().map(|r| r.alpha).collect();
    let ratios: Vec<f64> = rows.iter().map(|r| r.lambda1 / r.alpha).collect();
    let (c1_recovered, _) = least_squares(&alphas, &ratios);
    let la: Vec<f64> = alphas.iter().map(|a| a.ln()).collect();
    let lr: Vec<f64> = rows
        .iter()
        .map(|r| r.residual.abs().max(f64::MIN_POSITIVE).ln())
        .collect();
    let (log_c, exponent) = least_squares(&la, &lr);
    Ok(WeakReport {
        expansion,
        c1_recovered,
        exponent,
        constant: log_c.exp(),
        rows,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StrongReport {
    pub dirichlet: f64,
    pub increasing: bool,
    pub below_dirichlet: bool,
    /// `α (λ_D - λ₁(α))` at the couplings of [`RICHARDSON_ALPHAS`].
    pub scaled_gaps: Vec<f64>,
    /// Richardson limit of the scaled gap, an estimate of `c` in
    /// `λ₁ = λ_D - c/α + O(α⁻²)`.
    pub c_estimate: f64,
    /// Rows on the requested grid; the model is `λ_D - c/α`.
    pub rows: Vec<ExpansionRow>,
}

impl StrongReport {
    pub fn to_csv(&self) -> String {
        rows_csv(&self.rows)
    }
}

/// Checks monotone convergence of `λ₁(α, Y)` to the Dirichlet value from
/// below and estimates the `1/α` coefficient.
pub fn strong_limit_check(config: &Configuration, alpha_grid: &[f64]) -> Result<StrongReport> {
    if let Some(a) = alpha_grid.iter().find(|&&a| !(a >= STRONG_ALPHA_MIN && a.is_finite())) {
        return Err(Error::Argument(format!(
            "strong-coupling grid must lie in [{STRONG_ALPHA_MIN}, ∞), got {a}"
        )));
    }
    let dirichlet = dirichlet_ground(config)?;
    let lambda = |a: f64| ground_state_positive_loop(a, config).map(|r| r.lambda1);
    let scaled_gaps = RICHARDSON_ALPHAS
        .iter()
        .map(|&a| Ok(a * (dirichlet - lambda(a)?)))
        .collect::<Result<Vec<f64>>>()?;
    // Quadratic extrapolation in h = 1/α to h = 0.
    let h: Vec<f64> = RICHARDSON_ALPHAS.iter().map(|a| 1.0 / a).collect();
    let c_estimate = (0..3)
        .map(|i| {
            let w: f64 = (0..3).filter(|&j| j != i).map(|j| h[j] / (h[j] - h[i])).product();
            w * scaled_gaps[i]
        })
        .sum::<f64>();
    let mut sorted = alpha_grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut rows = Vec::with_capacity(sorted.len());
    for &alpha in &sorted {
        let lambda1 = lambda(alpha)?;
        let model_value = dirichlet - c_estimate / alpha;
        rows.push(ExpansionRow {
            alpha,
            lambda1,
            model_value,
            residual: lambda1 - model_value,
        });
    }
    Ok(StrongReport {
        dirichlet,
        increasing: rows.windows(2).all(|w| w[1].lambda1 > w[0].lambda1),
        below_dirichlet: rows.iter().all(|r| r.lambda1 < dirichlet),
        scaled_gaps,
        c_estimate,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configurations::{canonical_loop, is_congruent, random_config};

    fn single() -> Configuration {
        Configuration::from_angles(Setting::Loop, &[2.0]).unwrap()
    }

    #[test]
    fn trigamma_values() {
        // ψ₁(1) = π²/6, ψ₁(2) = π²/6 - 1.
        assert!((trigamma(1.0) - PI * PI / 6.0).abs() < 1e-14);
        assert!((trigamma(2.0) - PI * PI / 6.0 + 1.0).abs() < 1e-14);
        assert!((trigamma(1e6 + 1.0) - 1.0 / (1e6 + 0.5)).abs() < 1e-18);
    }

    #[test]
    fn single_point_coefficient() {
        let s = c2_series(&single(), 1000).unwrap();
        assert!((s.value + 1.0 / 12.0).abs() < 1e-14);
        assert!((c2_closed(&single()).unwrap() + 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn canonical_first_harmonic_vanishes() {
        // The m = 1 term alone is the partial sum with the diagonal tail
        // removed.
        for n in 2..9 {
            let y = canonical_loop(n).unwrap();
            let (re, im) = y
                .angles()
                .unwrap()
                .iter()
                .fold((0.0, 0.0), |a, t| (a.0 + t.cos(), a.1 + t.sin()));
            assert!(re.hypot(im) < 1e-14);
        }
    }

    #[test]
    fn bernoulli_identity_at_pi() {
        // Σ cos(mπ)/m² = -π²/12 = π² B₂(1/2)
        assert!((PI * PI * bernoulli2(0.5) + PI * PI / 12.0).abs() < 1e-15);
    }

    #[test]
    fn bernoulli_identity_uniform() {
        // Partial sums converge uniformly with error ≤ Σ_{m>M} m⁻² < 1/M; the
        // Cesàro means converge as well, with error ≤ (H_M + 1)/M at θ = 0
        // and faster elsewhere.
        let m_max = 100_000;
        let harmonic: f64 = (1..=m_max).map(|m| 1.0 / m as f64).sum();
        for i in 0..=40 {
            let theta = TAU * i as f64 / 40.0;
            let mut partial = 0.0;
            let mut cesaro = 0.0;
            for m in 1..=m_max {
                partial += (m as f64 * theta).cos() / (m as f64).powi(2);
                cesaro += partial;
            }
            let mean = cesaro / m_max as f64;
            let exact = PI * PI * bernoulli2(forward_fraction(0.0, theta));
            assert!((partial - exact).abs() < 1e-4, "{theta}");
            assert!((mean - exact).abs() <= (harmonic + 1.0) / m_max as f64, "{theta}");
        }
    }

    #[test]
    fn series_matches_closed_form() {
        for seed in 0..6 {
            let y = random_config(Setting::Loop, 2 + seed as usize, seed).unwrap();
            let s = c2_series(&y, 1_000_000).unwrap();
            let c = c2_closed(&y).unwrap();
            assert!((s.value - c).abs() < 1e-8, "{seed}: {} {c}", s.value);
            assert!(s.value < 0.0);
            let s4 = c2_series(&y, 10_000).unwrap();
            let s5 = c2_series(&y, 100_000).unwrap();
            assert!((s4.partial_sum - s5.partial_sum).abs() <= s4.tail_bound);
        }
    }

    #[test]
    fn canonical_arc_sum() {
        for n in 2..10 {
            let s = forward_arc_square_sum(&canonical_loop(n).unwrap()).unwrap();
            let nf = n as f64;
            assert!((s - 2.0 / 3.0 * PI * PI * (nf - 1.0) * (2.0 * nf - 1.0)).abs() < 1e-10);
        }
        assert!((forward_arc_square_sum(&canonical_loop(2).unwrap()).unwrap() - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn canonical_maximizes_c2() {
        for n in 2..=8 {
            let best = c2_closed(&canonical_loop(n).unwrap()).unwrap();
            for seed in 0..100 {
                let y = random_config(Setting::Loop, n, 1000 * n as u64 + seed).unwrap();
                let c = c2_closed(&y).unwrap();
                if is_congruent(&y, &canonical_loop(n).unwrap(), 1e-9).unwrap() {
                    assert!(c <= best + 1e-12);
                } else {
                    assert!(c < best, "{n} {seed}");
                }
            }
        }
    }

    #[test]
    fn weak_check_canonical_three() {
        let grid: Vec<f64> = (1..=10).map(|i| 0.01 * i as f64).collect();
        let r = weak_expansion_check(&canonical_loop(3).unwrap(), &grid).unwrap();
        assert!(r.exponent > 2.7, "{}", r.exponent);
        assert!((r.c1_recovered / (3.0 / (2.0 * PI)) - 1.0).abs() < 0.01);
        assert!(weak_expansion_check(&canonical_loop(3).unwrap(), &grid[..3]).is_err());
        assert!(weak_expansion_check(&canonical_loop(3).unwrap(), &[0.1, 0.2, 0.3, 0.05]).is_err());
    }

    #[test]
    fn same_c1_different_c2() {
        let a = weak_expansion(&canonical_loop(4).unwrap(), 1000).unwrap();
        let b = weak_expansion(&random_config(Setting::Loop, 4, 3).unwrap(), 1000).unwrap();
        assert_eq!(a.c1, b.c1);
        assert!((a.c2_closed - b.c2_closed).abs() > 1e-3);
    }

    #[test]
    fn strong_check() {
        let r = strong_limit_check(&canonical_loop(4).unwrap(), &[10.0, 100.0, 1000.0]).unwrap();
        assert!(r.increasing && r.below_dirichlet);
        assert!((r.rows[2].lambda1 / 4.0 - 1.0).abs() < 0.01);
        assert!(r.c_estimate > 0.0);
        let y = Configuration::from_angles(Setting::Loop, &[0.1, 0.2]).unwrap();
        let r = strong_limit_check(&y, &[1e3, 1e5]).unwrap();
        assert!((r.dirichlet - (PI / (TAU - 0.1)).powi(2)).abs() < 1e-15);
        assert!((r.rows[1].lambda1 - r.dirichlet).abs() < 1e-4);
        assert!(r.c_estimate > 0.0);
        assert!(strong_limit_check(&y, &[5.0]).is_err());
    }
}
