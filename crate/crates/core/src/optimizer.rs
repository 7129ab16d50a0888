//! Configuration-space searches: maximizers of `λ₁`, minimizers of the
//! sphere surface energy, and randomized verification of `λ₁(Y) ≤ λ₁(Ỹ)`.
//!
//! Every start or trial `i` is seeded with `seed + i` and evaluated
//! independently (in parallel through rayon); results are collected in index
//! order, so reports do not depend on the number of workers.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::configurations::{
    canonical, distance_multiset, dot3, is_congruent, random_config, sharp_sphere, Configuration, Setting,
};
use crate::error::{Error, Result};
use crate::kernels::EULER_GAMMA;
use crate::nelder_mead::{self, Options};
use crate::spectral::{alpha_crit, ground_state, SpectralResult};

/// Congruence tolerance used when no other is requested.
pub const CONGRUENCE_TOL: f64 = 1e-5;
/// Allowance in `λ₁(Y) ≤ λ₁(Ỹ) + VIOLATION_TOL`.
pub const VIOLATION_TOL: f64 = 1e-9;

/// Sum of the spatial kernel over ordered pairs of distinct sites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceEnergy {
    pub kappa: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// Maximize the ground state.
    Lambda1,
    /// Minimize the surface energy.
    SurfaceEnergy,
}

#[derive(Debug, Clone, Serialize)]
pub struct StartOutcome {
    pub index: usize,
    pub seed: u64,
    pub value: f64,
    pub converged: bool,
    pub congruent: bool,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizationReport {
    pub objective: Objective,
    pub setting: Setting,
    #[serde(rename = "N")]
    pub n: usize,
    /// `α` for [`Objective::Lambda1`], `κ` for [`Objective::SurfaceEnergy`].
    pub parameter: f64,
    pub seed: u64,
    pub best_config: Configuration,
    pub best_value: f64,
    pub starts: usize,
    pub converged_starts: usize,
    /// Converged starts that ended congruent to the canonical configuration.
    pub congruent_starts: usize,
    pub per_start: Vec<StartOutcome>,
    /// `false` as well when the setting has no canonical configuration for
    /// this `N` (see `canonical_available`).
    pub matched_canonical: bool,
    pub canonical_available: bool,
    pub canonical_value: Option<f64>,
    pub tolerance_used: f64,
}

impl OptimizationReport {
    pub fn per_start_values(&self) -> Vec<f64> {
        self.per_start.iter().map(|s| s.value).collect()
    }

    /// One row per start: `start,seed,value,converged,congruent,evaluations`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("start,seed,value,converged,congruent,evaluations\n");
        for s in &self.per_start {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                s.index,
                s.seed,
                fmt_f64(s.value),
                s.converged,
                s.congruent,
                s.evaluations
            );
        }
        out
    }
}

/// Search controls shared by the optimizers.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Search {
    pub starts: usize,
    pub seed: u64,
    pub congruence_tol: f64,
    /// Simplex budget per start; `None` means `400 · dim`.
    pub max_evals: Option<usize>,
}

impl Search {
    pub fn new(starts: usize, seed: u64) -> Self {
        Search {
            starts,
            seed,
            congruence_tol: CONGRUENCE_TOL,
            max_evals: None,
        }
    }

    /// 20 starts on the loop and circles, 50 on the sphere.
    pub fn default_for(setting: Setting, seed: u64) -> Self {
        Self::new(if setting == Setting::Sphere { 50 } else { 20 }, seed)
    }
}

/// Seventeen significant digits: lossless for `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Gauge-fixed coordinates: on the loop/circle the first site sits at angle
/// 0 and the remaining `N - 1` angles are free; on the sphere the first site
/// is the north pole, the second has azimuth 0, leaving `2N - 3` polar and
/// azimuthal angles.
fn from_params(setting: Setting, p: &[f64]) -> Result<Configuration> {
    if setting.is_angular() {
        let mut angles = Vec::with_capacity(p.len() + 1);
        angles.push(0.0);
        angles.extend_from_slice(p);
        return Configuration::from_angles(setting, &angles);
    }
    Configuration::from_points(&sphere_points(p))
}

fn sphere_points(p: &[f64]) -> Vec<[f64; 3]> {
    let polar = |t: f64, f: f64| [t.sin() * f.cos(), t.sin() * f.sin(), t.cos()];
    let mut pts = vec![[0.0, 0.0, 1.0]];
    if !p.is_empty() {
        pts.push(polar(p[0], 0.0));
        for q in p[1..].chunks(2) {
            pts.push(polar(q[0], q[1]));
        }
    }
    pts
}

fn to_params(config: &Configuration) -> Vec<f64> {
    if let Some(a) = config.angles() {
        return a[1..].iter().map(|y| y - a[0]).collect();
    }
    let pts = config.positions();
    // Rotate the first site to the north pole (Rodrigues), then about the
    // pole so that the second site has azimuth 0.
    let p0 = pts[0];
    let rot = rotation_to_pole(&p0);
    let apply = |r: &[[f64; 3]; 3], v: &[f64; 3]| -> [f64; 3] { [dot3(&r[0], v), dot3(&r[1], v), dot3(&r[2], v)] };
    let rotated: Vec<[f64; 3]> = pts.iter().map(|v| apply(&rot, v)).collect();
    let phi0 = if rotated.len() > 1 {
        rotated[1][1].atan2(rotated[1][0])
    } else {
        0.0
    };
    let spherical = |v: &[f64; 3]| -> (f64, f64) {
        let theta = v[2].clamp(-1.0, 1.0).acos();
        (theta, v[1].atan2(v[0]) - phi0)
    };
    let mut p = Vec::with_capacity(2 * pts.len());
    if rotated.len() > 1 {
        p.push(spherical(&rotated[1]).0);
        for v in &rotated[2..] {
            let (t, f) = spherical(v);
            p.push(t);
            p.push(f);
        }
    }
    p
}

fn rotation_to_pole(a: &[f64; 3]) -> [[f64; 3]; 3] {
    // Rotation taking the unit vector a to e_z.
    let c = a[2];
    if c > 1.0 - 1e-15 {
        return [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    }
    if c < -1.0 + 1e-15 {
        return [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]];
    }
    // Axis k = a × e_z / |a × e_z| = (a_y, -a_x, 0)/s.
    let s = (a[0] * a[0] + a[1] * a[1]).sqrt();
    let k = [a[1] / s, -a[0] / s, 0.0];
    let kk = |i: usize, j: usize| k[i] * k[j];
    let kx = [[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]];
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let id = if i == j { 1.0 } else { 0.0 };
            r[i][j] = c * id + s * kx[i][j] + (1.0 - c) * kk(i, j);
        }
    }
    r
}

fn canonical_if_any(setting: Setting, n: usize) -> Option<Configuration> {
    canonical(setting, n).ok()
}

/// Picks the start with the highest score; scores within `1e-12`
/// (relative) of the optimum are ties, broken by the lexicographically
/// smallest sorted distance multiset.
fn select_best(candidates: &[(Configuration, f64)]) -> usize {
    let mut best = 0;
    for (i, (_, v)) in candidates.iter().enumerate() {
        if *v > candidates[best].1 {
            best = i;
        }
    }
    let target = candidates[best].1;
    let tie = 1e-12 * target.abs().max(1.0);
    let mut chosen: Option<(usize, Vec<f64>)> = None;
    for (i, (c, v)) in candidates.iter().enumerate() {
        if (v - target).abs() <= tie {
            let key = distance_multiset(c);
            let smaller = match &chosen {
                None => true,
                Some((_, k)) => key.iter().zip(k).find(|(a, b)| a != b).is_some_and(|(a, b)| a < b),
            };
            if smaller {
                chosen = Some((i, key));
            }
        }
    }
    chosen.map_or(best, |(i, _)| i)
}

/// Multistart simplex maximization of `λ₁(α, ·)` over `N`-point
/// configurations. Probe points without a bound state (or with coinciding
/// sites) score `-∞`.
pub fn maximize_lambda1(setting: Setting, alpha: f64, n: usize, search: &Search) -> Result<OptimizationReport> {
    if n < 2 {
        return Err(Error::Argument(format!("N must be at least 2, got {n}")));
    }
    if search.starts == 0 {
        return Err(Error::Argument("at least one start is required".into()));
    }
    let reference = canonical_if_any(setting, n);
    if setting.nu() == 3 {
        if let Some(c) = &reference {
            let ac = alpha_crit(c)?;
            if alpha >= ac {
                return Err(Error::Argument(format!(
                    "alpha = {alpha} is not below the critical coupling {ac} of the canonical configuration"
                )));
            }
        }
    }
    // In the planar and spatial settings λ₁ is a decreasing function of the
    // coupling ρ alone (see `SpectralResult::log_coupling`), so ln ρ is
    // minimized instead: it stays informative when the kernel entries are
    // far below the rounding level of λ₁.
    let objective = |p: &[f64]| -> f64 {
        match from_params(setting, p).and_then(|c| ground_state(alpha, &c)) {
            Ok(r) => r.log_coupling.unwrap_or(-r.lambda1),
            Err(_) => f64::INFINITY,
        }
    };
    let dim = if setting.is_angular() { n - 1 } else { 2 * n - 3 };
    let opts = Options {
        initial_step: 0.2,
        max_evals: search.max_evals.unwrap_or(400 * dim),
        ..Options::for_dim(dim)
    };
    let runs: Vec<Result<Run>> = (0..search.starts)
        .into_par_iter()
        .map(|i| {
            let start = random_config(setting, n, search.seed.wrapping_add(i as u64))?;
            let m = nelder_mead::minimize(objective, &to_params(&start), opts);
            let config = from_params(setting, &m.x)?;
            let lambda1 = ground_state(alpha, &config)?.lambda1;
            Ok(Run {
                config,
                value: lambda1,
                score: -m.value,
                converged: m.converged,
                evaluations: m.evaluations,
            })
        })
        .collect();
    let reference_value = match &reference {
        Some(c) => ground_state(alpha, c).ok().map(|r| r.lambda1),
        None => None,
    };
    assemble(
        Objective::Lambda1,
        setting,
        n,
        alpha,
        search,
        runs,
        reference,
        reference_value,
    )
}

struct Run {
    config: Configuration,
    value: f64,
    /// Higher is better.
    score: f64,
    converged: bool,
    evaluations: usize,
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    objective: Objective,
    setting: Setting,
    n: usize,
    parameter: f64,
    search: &Search,
    runs: Vec<Result<Run>>,
    reference: Option<Configuration>,
    canonical_value: Option<f64>,
) -> Result<OptimizationReport> {
    let runs: Vec<Run> = runs.into_iter().collect::<Result<_>>()?;
    let tol = search.congruence_tol;
    let congruent =
        |c: &Configuration| -> Result<bool> { reference.as_ref().map_or(Ok(false), |r| is_congruent(c, r, tol)) };
    let mut per_start = Vec::with_capacity(runs.len());
    for (i, r) in runs.iter().enumerate() {
        per_start.push(StartOutcome {
            index: i,
            seed: search.seed.wrapping_add(i as u64),
            value: r.value,
            converged: r.converged,
            congruent: congruent(&r.config)?,
            evaluations: r.evaluations,
        });
    }
    let candidates: Vec<(Configuration, f64)> = runs.iter().map(|r| (r.config.clone(), r.score)).collect();
    let best = select_best(&candidates);
    let best_config = runs[best].config.clone();
    let best_value = runs[best].value;
    Ok(OptimizationReport {
        objective,
        setting,
        n,
        parameter,
        seed: search.seed,
        matched_canonical: per_start[best].congruent,
        canonical_available: reference.is_some(),
        canonical_value,
        best_config,
        best_value,
        starts: per_start.len(),
        converged_starts: per_start.iter().filter(|s| s.converged).count(),
        congruent_starts: per_start.iter().filter(|s| s.converged && s.congruent).count(),
        per_start,
        tolerance_used: tol,
    })
}

fn yukawa(kappa: f64, l: f64) -> (f64, f64) {
    let g = (-kappa * l).exp() / (4.0 * PI * l);
    (g, -g * (kappa + 1.0 / l))
}

fn energy_of_points(kappa: f64, pts: &[[f64; 3]]) -> f64 {
    let mut e = 0.0;
    for i in 0..pts.len() {
        for j in 0..i {
            let l = crate::configurations::dist3(&pts[i], &pts[j]);
            e += yukawa(kappa, l).0;
        }
    }
    2.0 * e
}

/// Energy and its tangential gradient (projected onto each site's tangent
/// plane).
fn energy_and_gradient(kappa: f64, pts: &[[f64; 3]]) -> (f64, Vec<[f64; 3]>) {
    let n = pts.len();
    let mut e = 0.0;
    let mut g = vec![[0.0; 3]; n];
    for i in 0..n {
        for j in 0..i {
            let d = [pts[i][0] - pts[j][0], pts[i][1] - pts[j][1], pts[i][2] - pts[j][2]];
            let l = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            let (v, dv) = yukawa(kappa, l);
            e += v;
            // Each unordered pair appears twice in the ordered sum.
            let f = 2.0 * dv / l;
            for c in 0..3 {
                g[i][c] += f * d[c];
                g[j][c] -= f * d[c];
            }
        }
    }
    for (gi, p) in g.iter_mut().zip(pts) {
        let r = dot3(gi, p);
        for c in 0..3 {
            gi[c] -= r * p[c];
        }
    }
    (2.0 * e, g)
}

/// `Σ_{j≠j'} e^{-κℓ}/(4πℓ)` over ordered pairs; rotation invariant.
pub fn surface_energy(config: &Configuration, kappa: f64) -> Result<SurfaceEnergy> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::Domain(format!("kappa must be positive, got {kappa}")));
    }
    if config.len() < 2 {
        return Err(Error::Argument("the surface energy needs at least two sites".into()));
    }
    Ok(SurfaceEnergy {
        kappa,
        value: energy_of_points(kappa, &config.positions()),
    })
}

const DESCENT_MAX_ITER: usize = 20_000;
const DESCENT_GTOL: f64 = 1e-12;

/// Projected gradient descent on the sphere with Barzilai–Borwein steps and
/// Armijo backtracking. Returns the final points, the final gradient norm
/// and the number of energy evaluations.
fn descend(kappa: f64, mut x: Vec<[f64; 3]>) -> (Vec<[f64; 3]>, f64, usize) {
    let flat_dot = |a: &[[f64; 3]], b: &[[f64; 3]]| -> f64 { a.iter().zip(b).map(|(p, q)| dot3(p, q)).sum() };
    let retract = |x: &[[f64; 3]], g: &[[f64; 3]], t: f64| -> Vec<[f64; 3]> {
        x.iter()
            .zip(g)
            .map(|(p, d)| {
                let q = [p[0] - t * d[0], p[1] - t * d[1], p[2] - t * d[2]];
                let r = crate::configurations::norm3(&q);
                [q[0] / r, q[1] / r, q[2] / r]
            })
            .collect()
    };
    let (mut e, mut g) = energy_and_gradient(kappa, &x);
    let mut evals = 1;
    let gmax = |g: &[[f64; 3]]| g.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut t = 0.1 / gmax(&g).max(1e-300);
    for _ in 0..DESCENT_MAX_ITER {
        if gmax(&g) < DESCENT_GTOL * e.max(1.0) {
            break;
        }
        let gg = flat_dot(&g, &g);
        let mut step = t;
        let (xn, en, gn) = loop {
            let xn = retract(&x, &g, step);
            let (en, gn) = energy_and_gradient(kappa, &xn);
            evals += 1;
            if en <= e - 1e-4 * step * gg || step < 1e-300 {
                break (xn, en, gn);
            }
            step *= 0.5;
        };
        if en >= e && step < 1e-300 {
            break;
        }
        let s: Vec<[f64; 3]> = xn
            .iter()
            .zip(&x)
            .map(|(a, b)| [a[0] - b[0], a[1] - b[1], a[2] - b[2]])
            .collect();
        let y: Vec<[f64; 3]> = gn
            .iter()
            .zip(&g)
            .map(|(a, b)| [a[0] - b[0], a[1] - b[1], a[2] - b[2]])
            .collect();
        let sy = flat_dot(&s, &y).abs();
        t = if sy > 0.0 { flat_dot(&s, &s) / sy } else { step * 2.0 };
        let stalled = (e - en).abs() <= 1e-16 * e;
        x = xn;
        e = en;
        g = gn;
        if stalled && gmax(&g) < 1e-9 {
            break;
        }
    }
    (x, gmax(&g), evals)
}

/// Multistart minimization of the surface energy of `N` points on the unit
/// sphere: projected gradient descent from seeded random starts, then a
/// simplex polish in gauge-fixed coordinates. For `N ∈ {2, 3, 4, 6, 12}`
/// congruence with the sharp configuration is reported.
pub fn minimize_surface_energy(kappa: f64, n: usize, search: &Search) -> Result<OptimizationReport> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::Domain(format!("kappa must be positive, got {kappa}")));
    }
    if n < 2 {
        return Err(Error::Argument(format!("N must be at least 2, got {n}")));
    }
    if search.starts == 0 {
        return Err(Error::Argument("at least one start is required".into()));
    }
    let dim = 2 * n - 3;
    let opts = Options {
        initial_step: 1e-4,
        max_evals: search.max_evals.unwrap_or(400 * dim),
        max_restarts: 1,
        ..Options::for_dim(dim)
    };
    let runs: Vec<Result<Run>> = (0..search.starts)
        .into_par_iter()
        .map(|i| {
            let start = random_config(Setting::Sphere, n, search.seed.wrapping_add(i as u64))?;
            let (pts, gnorm, evals) = descend(kappa, start.positions());
            let descended = Configuration::from_directions(&pts)?;
            let m = nelder_mead::minimize(
                |p| energy_of_points(kappa, &sphere_points(p)),
                &to_params(&descended),
                opts,
            );
            let polished = from_params(Setting::Sphere, &m.x)?;
            let e_desc = energy_of_points(kappa, &pts);
            let (config, value) = if m.value < e_desc {
                (polished, m.value)
            } else {
                (descended, e_desc)
            };
            Ok(Run {
                config,
                value,
                score: -value,
                converged: gnorm < 1e-8,
                evaluations: evals + m.evaluations,
            })
        })
        .collect();
    let reference = sharp_sphere(n).ok().map(|(c, _)| c);
    let reference_value = match &reference {
        Some(c) => Some(surface_energy(c, kappa)?.value),
        None => None,
    };
    assemble(
        Objective::SurfaceEnergy,
        Setting::Sphere,
        n,
        kappa,
        search,
        runs,
        reference,
        reference_value,
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialOutcome {
    pub index: usize,
    pub seed: u64,
    /// `None` when the sample has no bound state.
    pub lambda1: Option<f64>,
    /// `λ₁(Ỹ) - λ₁(Y)`; `None` without a bound state.
    pub margin: Option<f64>,
    /// `ln` of a positive margin, available even when the margin itself
    /// underflows (planar setting at strong attraction).
    pub log_margin: Option<f64>,
    pub congruent: bool,
    pub violation: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub setting: Setting,
    pub alpha: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub canonical_lambda1: f64,
    pub violations: usize,
    /// Smallest margin over samples not congruent to `Ỹ`.
    pub min_gap: Option<f64>,
    /// Smallest `ln` margin over samples not congruent to `Ỹ`.
    pub min_log_gap: Option<f64>,
    /// Samples not congruent to `Ỹ` whose margin is not strictly positive.
    pub nonpositive_margins: usize,
    /// Samples without a bound state; they satisfy the inequality trivially.
    pub no_bound_state: usize,
    pub congruence_tol: f64,
    pub samples: Vec<TrialOutcome>,
}

impl VerifyReport {
    /// One row per trial: `trial,seed,lambda1,margin,log_margin,congruent,violation`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,seed,lambda1,margin,log_margin,congruent,violation\n");
        let opt = |x: Option<f64>| x.map_or(String::new(), fmt_f64);
        for s in &self.samples {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                s.index,
                s.seed,
                opt(s.lambda1),
                opt(s.margin),
                opt(s.log_margin),
                s.congruent,
                s.violation
            );
        }
        out
    }
}

/// `λ₁(reference) - λ₁(sample)` and its logarithm when positive.
///
/// On the loop this is the plain difference. For `ν = 2, 3` the secular
/// equation `ξ(κ) = α - ρ` gives `λ₁ = -κ₀² e^{4πρ}` with
/// `κ₀ = 2e^{-2πα-γ}` (`ν = 2`) and `λ₁ = -16π²(ρ - α)²` (`ν = 3`), and the
/// margin is evaluated from the two couplings `ρ` in logarithmic form.
fn margin_between(
    setting: Setting,
    alpha: f64,
    reference: &SpectralResult,
    sample: &SpectralResult,
) -> (f64, Option<f64>) {
    let plain = reference.lambda1 - sample.lambda1;
    let (Some(lr), Some(ly)) = (reference.log_coupling, sample.log_coupling) else {
        return (plain, (plain > 0.0).then(|| plain.ln()));
    };
    let delta = ly - lr;
    let (rr, ry) = (lr.exp(), ly.exp());
    // ln(ρ_y - ρ_r) when positive.
    let log_diff = (delta > 0.0).then(|| lr + delta.exp_m1().ln());
    let diff = rr * delta.exp_m1();
    match setting.nu() {
        2 => {
            let ln_k0_sq = 2.0 * (2f64.ln() - 2.0 * PI * alpha - EULER_GAMMA);
            let (a, b) = (4.0 * PI * ry, 4.0 * PI * rr);
            match log_diff {
                Some(ld) => {
                    let log_d = (4.0 * PI).ln() + ld;
                    let ln_expm1_d = if log_d < -30.0 {
                        log_d
                    } else {
                        log_d.exp().exp_m1().ln()
                    };
                    let lm = ln_k0_sq + b + ln_expm1_d;
                    (lm.exp(), Some(lm))
                }
                None => (-(ln_k0_sq + a).exp() * (b - a).exp_m1(), None),
            }
        }
        _ => {
            let sum = ry + rr - 2.0 * alpha;
            let m = 16.0 * PI * PI * diff * sum;
            let lm = log_diff.map(|ld| (16.0 * PI * PI).ln() + ld + sum.ln());
            (m, lm)
        }
    }
}

/// Draws `trials` random configurations (trial `i` seeded with `seed + i`)
/// and checks `λ₁(Y) ≤ λ₁(Ỹ) + 1e-9` against the canonical configuration.
pub fn verify_theorem(setting: Setting, alpha: f64, n: usize, trials: usize, seed: u64) -> Result<VerifyReport> {
    verify_samples(setting, alpha, n, trials, seed, |i| {
        random_config(setting, n, seed.wrapping_add(i as u64))
    })
}

/// Same as [`verify_theorem`] with caller-supplied samples.
pub fn verify_samples(
    setting: Setting,
    alpha: f64,
    n: usize,
    trials: usize,
    seed: u64,
    sample: impl Fn(usize) -> Result<Configuration> + Sync,
) -> Result<VerifyReport> {
    if trials == 0 {
        return Err(Error::Argument("trials must be at least 1".into()));
    }
    let reference = canonical(setting, n)?;
    let reference_state = ground_state(alpha, &reference)?;
    let canonical_lambda1 = reference_state.lambda1;
    let samples: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<TrialOutcome> {
            let y = sample(i)?;
            if y.setting() != setting || y.len() != n {
                return Err(Error::Argument(format!("sample {i} does not match {setting} N={n}")));
            }
            let congruent = is_congruent(&y, &reference, CONGRUENCE_TOL)?;
            let state = match ground_state(alpha, &y) {
                Ok(r) => Some(r),
                Err(Error::NoBoundState { .. }) => None,
                Err(e) => return Err(e),
            };
            let (margin, log_margin) = match &state {
                Some(r) => {
                    let (m, lm) = margin_between(setting, alpha, &reference_state, r);
                    (Some(m), lm)
                }
                None => (None, None),
            };
            Ok(TrialOutcome {
                index: i,
                seed: seed.wrapping_add(i as u64),
                lambda1: state.map(|r| r.lambda1),
                margin,
                log_margin,
                congruent,
                violation: margin.is_some_and(|m| m < -VIOLATION_TOL),
            })
        })
        .collect::<Result<_>>()?;
    let min_gap = samples
        .iter()
        .filter(|s| !s.congruent)
        .filter_map(|s| s.margin)
        .min_by(f64::total_cmp);
    let min_log_gap = samples
        .iter()
        .filter(|s| !s.congruent)
        .filter_map(|s| s.log_margin)
        .min_by(f64::total_cmp);
    let nonpositive_margins = samples
        .iter()
        .filter(|s| !s.congruent && s.margin.is_some() && s.log_margin.is_none())
        .count();
    Ok(VerifyReport {
        setting,
        alpha,
        n,
        trials,
        seed,
        canonical_lambda1,
        violations: samples.iter().filter(|s| s.violation).count(),
        min_gap,
        min_log_gap,
        nonpositive_margins,
        no_bound_state: samples.iter().filter(|s| s.lambda1.is_none()).count(),
        congruence_tol: CONGRUENCE_TOL,
        samples,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub alpha: f64,
    pub violations: usize,
    pub min_gap: Option<f64>,
    pub canonical_lambda1: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub rows: Vec<ScanRow>,
}

impl ScanReport {
    pub fn total_violations(&self) -> usize {
        self.rows.iter().map(|r| r.violations).sum()
    }

    /// `alpha,violations,min_gap,canonical_lambda1`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,violations,min_gap,canonical_lambda1\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                fmt_f64(r.alpha),
                r.violations,
                r.min_gap.map_or(String::new(), fmt_f64),
                fmt_f64(r.canonical_lambda1)
            );
        }
        out
    }
}

/// Repulsive-loop campaign: [`verify_theorem`] at every `α` of the grid.
pub fn conjecture_scan(n: usize, alpha_grid: &[f64], trials: usize, seed: u64) -> Result<ScanReport> {
    if let Some(a) = alpha_grid.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
        return Err(Error::Argument(format!("the scan covers alpha > 0, got {a}")));
    }
    let rows = alpha_grid
        .iter()
        .map(|&alpha| {
            let r = verify_theorem(Setting::Loop, alpha, n, trials, seed)?;
            Ok(ScanRow {
                alpha,
                violations: r.violations,
                min_gap: r.min_gap,
                canonical_lambda1: r.canonical_lambda1,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ScanReport { n, trials, seed, rows })
}

#[cfg(test)]
mod tests;
