//! Secular matrices and ground-state solvers.
//!
//! Two independent routes are provided for the loop: the Krein matrix `Γ`
//! (eigenvalue inertia of an `N × N` matrix) and the loop monodromy (a product
//! of 2×2 transfer matrices). Both locate the ground state through a
//! predicate "energy lies below `λ₁`" that is monotone in the energy, so
//! bisection cannot step over a nearly degenerate pair of low levels.
//!
//! Sign convention on the loop: `Γ_jj' = -δ_jj'/α - G(d_jj')`, so the single
//! site root satisfies `α = -2κ tanh(πκ)`. For `ν = 2, 3`:
//! `Γ_jj' = (α - ξ)δ_jj' - (1 - δ_jj') G(ℓ_jj')`.

mod transfer;

use std::f64::consts::PI;

use serde::Serialize;

use crate::configurations::{distances, Configuration, Setting};
use crate::error::{Error, Result};
use crate::kernels::{
    green_free, green_loop_negative, green_loop_positive, k0_k1_scaled, xi_regularized, ParamKind, SpectralParam,
    POLE_GUARD,
};
use crate::linalg::{determinant, is_positive_definite, min_eigenvalue_sym, symmetric_eigen, Matrix};

pub use transfer::{below_ground_state, dirichlet_zero_count, monodromy_discriminant, Monodromy};

const GRID_POINTS: usize = 400;
const KAPPA_MIN: f64 = 1e-4;
const KAPPA_FLOOR: f64 = 1e-280;
const KAPPA_CEIL: f64 = 1e12;
const MAX_BISECTIONS: usize = 200;

/// The secular matrix at a fixed spectral parameter.
#[derive(Debug, Clone, Serialize)]
pub struct KreinMatrix {
    pub entries: Matrix,
    pub setting: Setting,
    pub alpha: f64,
    pub param: SpectralParam,
}

/// How a ground state was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Vanishing of the smallest eigenvalue of the Krein matrix.
    Krein,
    /// Zero crossing of an eigenvalue of the Krein matrix at positive energy,
    /// located by inertia counting.
    KreinInertia,
    /// Loop monodromy discriminant.
    Transfer,
    /// Free loop, `λ₁ = 0`.
    Free,
}

/// Ground state of `H_{α,Y}` with solver diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralResult {
    pub setting: Setting,
    pub alpha: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub lambda1: f64,
    #[serde(rename = "param")]
    pub param_at_root: Option<SpectralParam>,
    /// `|μ|` of the Krein eigenvalue at the root, or the discriminant defect
    /// `|D - 2|` relative to the rounding scale of the monodromy product for
    /// the transfer route.
    pub residual: f64,
    /// Final bracket in the spectral parameter.
    pub bracket: (f64, f64),
    pub evaluations: usize,
    pub method: Method,
    /// Estimated multiplicity of the level at the root.
    pub multiplicity: usize,
    /// For the repulsive loop: whether `det Γ(k)` changes sign across the
    /// root (`None` when a pole of the kernel intervenes).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validated: Option<bool>,
    /// For `ν = 2, 3`: [`log_coupling`] at the root. The secular equation is
    /// `ξ(κ) = α - ρ`, so `λ₁` is a decreasing function of `ρ` alone.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_coupling: Option<f64>,
}

/// Precomputed pair distances for repeated secular matrix assembly.
struct Secular<'a> {
    config: &'a Configuration,
    alpha: f64,
    n: usize,
    /// Loop: geodesic distances, otherwise chordal.
    dist: Matrix,
}

impl<'a> Secular<'a> {
    fn new(alpha: f64, config: &'a Configuration) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::Argument(format!("alpha must be finite, got {alpha}")));
        }
        let d = distances(config);
        let dist = match config.setting() {
            Setting::Loop => d.geodesic.expect("loop distances"),
            _ => d.chordal,
        };
        Ok(Secular {
            config,
            alpha,
            n: config.len(),
            dist,
        })
    }

    fn matrix(&self, param: SpectralParam) -> Result<Matrix> {
        let n = self.n;
        let mut m = Matrix::zeros(n);
        match self.config.setting() {
            Setting::Loop => {
                if self.alpha == 0.0 {
                    return Err(Error::Argument(
                        "alpha = 0 is the free loop; its spectrum is known explicitly".into(),
                    ));
                }
                let g = |d: f64| match param.kind {
                    ParamKind::NegativeEnergy => green_loop_negative(param.value, d),
                    ParamKind::PositiveEnergy => green_loop_positive(param.value, d),
                };
                let diag = -1.0 / self.alpha - g(0.0)?.value;
                for i in 0..n {
                    m[(i, i)] = diag;
                    for j in 0..i {
                        let v = -g(self.dist[(i, j)])?.value;
                        m[(i, j)] = v;
                        m[(j, i)] = v;
                    }
                }
            }
            setting => {
                if param.kind != ParamKind::NegativeEnergy {
                    return Err(Error::Argument(format!(
                        "{setting} has no positive-energy bound states; use a negative-energy parameter"
                    )));
                }
                let nu = setting.nu();
                let diag = self.alpha - xi_regularized(nu, param.value)?;
                for i in 0..n {
                    m[(i, i)] = diag;
                    for j in 0..i {
                        let v = -green_free(nu, param.value, self.dist[(i, j)])?.value;
                        m[(i, j)] = v;
                        m[(j, i)] = v;
                    }
                }
            }
        }
        Ok(m)
    }

    fn at_kappa(&self, kappa: f64) -> Result<Matrix> {
        self.matrix(SpectralParam::kappa(kappa)?)
    }

    fn at_k(&self, k: f64) -> Result<Matrix> {
        self.matrix(SpectralParam::k(k)?)
    }
}

/// Secular matrix `Γ_{α,Y}` at the given spectral parameter.
pub fn krein_matrix(alpha: f64, config: &Configuration, param: SpectralParam) -> Result<KreinMatrix> {
    let entries = Secular::new(alpha, config)?.matrix(param)?;
    Ok(KreinMatrix {
        entries,
        setting: config.setting(),
        alpha,
        param,
    })
}

/// Smallest eigenvalue of the Krein matrix along a list of `κ` values.
pub fn min_eigenvalue_branch(alpha: f64, config: &Configuration, kappas: &[f64]) -> Result<Vec<f64>> {
    let s = Secular::new(alpha, config)?;
    kappas
        .iter()
        .map(|&k| Ok(min_eigenvalue_sym(&s.at_kappa(k)?)?.0))
        .collect()
}

/// Ground state for any admissible `(setting, α)`: the Krein route for
/// negative energies, the transfer route for the repulsive loop.
pub fn ground_state(alpha: f64, config: &Configuration) -> Result<SpectralResult> {
    match config.setting() {
        Setting::Loop if alpha > 0.0 => ground_state_positive_loop(alpha, config),
        Setting::Loop if alpha == 0.0 => Ok(free_loop(config)),
        _ => ground_state_negative(alpha, config),
    }
}

fn free_loop(config: &Configuration) -> SpectralResult {
    SpectralResult {
        setting: Setting::Loop,
        alpha: 0.0,
        n: config.len(),
        lambda1: 0.0,
        param_at_root: None,
        residual: 0.0,
        bracket: (0.0, 0.0),
        evaluations: 0,
        method: Method::Free,
        multiplicity: 1,
        validated: None,
        log_coupling: None,
    }
}

/// Negative ground state `-κ*²` from the vanishing of the smallest
/// eigenvalue of `Γ(iκ)`.
///
/// The eigenvalues of `Γ(iκ)` increase with `κ`, so `Γ(iκ)` is positive
/// definite exactly for `κ > κ*`. The root is bracketed on a geometric grid
/// (extended outward when the default range `[1e-4, max(10, N|α|)]` does not
/// contain it) and refined by bisection on the Cholesky test.
pub fn ground_state_negative(alpha: f64, config: &Configuration) -> Result<SpectralResult> {
    if config.setting() == Setting::Loop && (alpha.is_nan() || alpha >= 0.0) {
        return Err(Error::Argument(format!(
            "the negative-energy loop solver needs alpha < 0, got {alpha}"
        )));
    }
    let s = Secular::new(alpha, config)?;
    let mut evaluations = 0;
    let mut above = |kappa: f64| -> Result<bool> {
        evaluations += 1;
        Ok(is_positive_definite(&s.at_kappa(kappa)?))
    };

    let mut lo = KAPPA_MIN;
    let mut hi = (s.n as f64 * alpha.abs()).max(10.0);
    while above(lo)? {
        if lo < KAPPA_FLOOR {
            return Err(Error::NoBoundState {
                alpha,
                kappa_min: lo,
                kappa_max: hi,
            });
        }
        lo *= 1e-4;
    }
    while !above(hi)? {
        if hi > KAPPA_CEIL {
            return Err(Error::Solver(format!(
                "secular matrix not positive definite up to kappa = {hi:e}"
            )));
        }
        hi *= 4.0;
    }

    // Locate the grid cell by binary search; the predicate is monotone.
    let ratio = (hi / lo).ln() / (GRID_POINTS - 1) as f64;
    let node = |i: usize| lo * (ratio * i as f64).exp();
    let (mut a, mut b) = (0usize, GRID_POINTS - 1);
    while b - a > 1 {
        let mid = (a + b) / 2;
        if above(node(mid))? {
            b = mid;
        } else {
            a = mid;
        }
    }
    let (mut lo, mut hi) = (
        if a == 0 { lo } else { node(a) },
        if b == GRID_POINTS - 1 { hi } else { node(b) },
    );

    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if above(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let kappa = 0.5 * (lo + hi);
    let gamma = s.at_kappa(kappa)?;
    let eig = symmetric_eigen(&gamma)?;
    let scale = gamma.norm().max(1.0);
    let multiplicity = eig.values.iter().filter(|v| v.abs() <= 1e-8 * scale).count().max(1);
    Ok(SpectralResult {
        setting: config.setting(),
        alpha,
        n: s.n,
        lambda1: -kappa * kappa,
        param_at_root: Some(SpectralParam::kappa(kappa)?),
        residual: eig.values[0].abs(),
        bracket: (lo, hi),
        evaluations: evaluations + 1,
        method: Method::Krein,
        multiplicity,
        validated: None,
        log_coupling: if config.setting() == Setting::Loop {
            None
        } else {
            Some(log_coupling(config, kappa)?)
        },
    })
}

/// Lowest Dirichlet eigenvalue of the loop cut at the sites: `(π / max gap)²`.
pub fn dirichlet_ground(config: &Configuration) -> Result<f64> {
    if config.setting() != Setting::Loop {
        return Err(Error::Argument("the Dirichlet bound is defined on the loop".into()));
    }
    let gaps = transfer::gaps(config.angles().expect("loop angles"));
    let max_gap = gaps.iter().fold(0.0_f64, |m, &g| m.max(g));
    Ok((PI / max_gap).powi(2))
}

/// Ground state of the loop from the monodromy, for either sign of `α`.
///
/// The energy is bisected on [`below_ground_state`]. For `α > 0` the bracket
/// is `k ∈ (0, √λ_D)`; for `α < 0` it is `κ ∈ (0, κ_max]` with `κ_max`
/// enlarged until the predicate holds.
pub fn ground_state_transfer(alpha: f64, config: &Configuration) -> Result<SpectralResult> {
    if config.setting() != Setting::Loop {
        return Err(Error::Argument("the transfer route is defined on the loop".into()));
    }
    if alpha == 0.0 {
        return Ok(free_loop(config));
    }
    let n = config.len();
    let mut evaluations = 0;
    let repulsive = alpha > 0.0;
    // Parameter p is k for α > 0 and κ for α < 0; "below" is monotone
    // increasing in k and decreasing in κ.
    let energy = |p: f64| if repulsive { p * p } else { -p * p };
    let mut below = |p: f64| -> Result<bool> {
        evaluations += 1;
        below_ground_state(alpha, config, energy(p))
    };

    let (mut lo, mut hi);
    if repulsive {
        lo = 0.0;
        hi = dirichlet_ground(config)?.sqrt();
    } else {
        lo = 0.0;
        hi = 0.5 * n as f64 * alpha.abs() + 1.0;
        while !below(hi)? {
            if hi > 1e6 {
                return Err(Error::Solver("transfer bracket did not close".into()));
            }
            hi *= 2.0;
        }
    }
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        // For α > 0 "below" holds on the low side, for α < 0 on the high side.
        if below(mid)? == repulsive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p = 0.5 * (lo + hi);
    let e = energy(p);
    let m = monodromy_discriminant(alpha, config, e)?;
    let defect = m.periodic_defect();
    let identity_defect = ((m.matrix[0][0] - 1.0).powi(2)
        + m.matrix[0][1].powi(2)
        + m.matrix[1][0].powi(2)
        + (m.matrix[1][1] - 1.0).powi(2))
    .sqrt();
    let multiplicity = if identity_defect <= 1e-8 * m.scale.max(1.0) {
        2
    } else {
        1
    };
    let param = if repulsive {
        SpectralParam::k(p)?
    } else {
        SpectralParam::kappa(p)?
    };
    Ok(SpectralResult {
        setting: Setting::Loop,
        alpha,
        n,
        lambda1: e,
        param_at_root: Some(param),
        residual: defect,
        bracket: (lo, hi),
        evaluations: evaluations + 1,
        method: Method::Transfer,
        multiplicity,
        validated: None,
        log_coupling: None,
    })
}

/// Ground state of the repulsive loop (`α > 0`).
///
/// The monodromy is the primary route; the result is validated by checking
/// that `det Γ(k)` changes sign across the root when no integer `k` (a pole
/// of the positive-energy kernel) lies in between.
pub fn ground_state_positive_loop(alpha: f64, config: &Configuration) -> Result<SpectralResult> {
    if config.setting() != Setting::Loop || alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::Argument(format!(
            "the repulsive solver needs the loop and alpha > 0, got {} and {alpha}",
            config.setting()
        )));
    }
    let mut result = ground_state_transfer(alpha, config)?;
    let k = result.param_at_root.expect("positive root").value;
    let delta = 1e-7 * k.max(1e-3);
    let (a, b) = (k - delta, k + delta);
    let s = Secular::new(alpha, config)?;
    result.validated = if a <= 0.0 || a.floor() != b.floor() || pole_near(a) || pole_near(b) {
        None
    } else {
        let da = determinant(&s.at_k(a)?);
        let db = determinant(&s.at_k(b)?);
        result.evaluations += 2;
        Some(da * db < 0.0)
    };
    Ok(result)
}

fn pole_near(k: f64) -> bool {
    (k - k.round()).abs() <= POLE_GUARD
}

/// Number of free loop eigenvalues `m²` below `k²` that are visible from
/// the sites, i.e. the rank of `[e^{i m y_j}]` summed over `0 <= m < k`.
fn visible_free_levels(angles: &[f64], k: f64) -> usize {
    let mut count = 0;
    let mut m = 0usize;
    while (m as f64) < k {
        if m == 0 {
            count += 1;
        } else {
            // Gram matrix of the cos/sin columns.
            let (mut cc, mut ss, mut cs) = (0.0, 0.0, 0.0);
            for &y in angles {
                let (s, c) = (m as f64 * y).sin_cos();
                cc += c * c;
                ss += s * s;
                cs += c * s;
            }
            let tr = cc + ss;
            let det = cc * ss - cs * cs;
            let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
            let (big, small) = (0.5 * tr + disc, 0.5 * tr - disc);
            let tol = 1e-10 * angles.len() as f64;
            count += (big > tol) as usize + (small > tol) as usize;
        }
        m += 1;
    }
    count
}

/// Ground state of the repulsive loop from the Krein matrix alone.
///
/// For `k` away from the integers, the number of levels of `H_{α,Y}` below
/// `k²` equals the number of visible free levels below `k²` minus the number
/// of positive eigenvalues of `Γ(k)`. The ground state is where this count
/// first becomes positive; the count is bisected in `k ∈ (0, N/2 + 1/4)`.
pub fn ground_state_krein_positive(alpha: f64, config: &Configuration) -> Result<SpectralResult> {
    if config.setting() != Setting::Loop || alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::Argument(
            "the repulsive Krein route needs the loop and alpha > 0".into(),
        ));
    }
    let angles = config.angles().expect("loop angles").to_vec();
    let s = Secular::new(alpha, config)?;
    let mut evaluations = 0;
    let mut levels_below = |k: f64| -> Result<usize> {
        let k = nudge_off_pole(k);
        evaluations += 1;
        let eig = symmetric_eigen(&s.at_k(k)?)?;
        let positive = eig.values.iter().filter(|&&v| v > 0.0).count();
        Ok(visible_free_levels(&angles, k).saturating_sub(positive))
    };

    let mut lo = 0.0;
    let mut hi = 0.5 * s.n as f64 + 0.25;
    if levels_below(hi)? == 0 {
        return Err(Error::Solver(format!("no level below k = {hi}")));
    }
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if levels_below(mid)? == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let k = nudge_off_pole(0.5 * (lo + hi));
    let eig = symmetric_eigen(&s.at_k(k)?)?;
    let residual = eig.values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    Ok(SpectralResult {
        setting: Setting::Loop,
        alpha,
        n: s.n,
        lambda1: k * k,
        param_at_root: Some(SpectralParam::k(k)?),
        residual,
        bracket: (lo, hi),
        evaluations: evaluations + 1,
        method: Method::KreinInertia,
        multiplicity: 1,
        validated: None,
        log_coupling: None,
    })
}

fn nudge_off_pole(k: f64) -> f64 {
    let m = k.round();
    if (k - m).abs() <= 2.0 * POLE_GUARD {
        if k >= m {
            m + 2.0 * POLE_GUARD
        } else {
            m - 2.0 * POLE_GUARD
        }
    } else {
        k
    }
}

/// `ln ρ`, where `ρ` is the largest eigenvalue of the off-diagonal kernel
/// matrix `G_iκ(ℓ_jj')` (`j ≠ j'`) for `ν = 2, 3`.
///
/// The Krein matrix is `(α - ξ(κ)) I - G`, and `G` has positive entries, so
/// its smallest eigenvalue is `α - ξ(κ) - ρ(κ)`. The entries are rescaled by
/// `e^{κ ℓ_min}` before the eigenvalue is taken, so the result stays finite
/// (and differences between configurations stay resolvable) when the entries
/// themselves underflow. `-∞` for a single site.
pub fn log_coupling(config: &Configuration, kappa: f64) -> Result<f64> {
    let setting = config.setting();
    if setting == Setting::Loop {
        return Err(Error::Argument(
            "the coupling decomposition applies to circle2, circle3 and sphere".into(),
        ));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::Domain(format!("kappa must be positive, got {kappa}")));
    }
    let n = config.len();
    if n < 2 {
        return Ok(f64::NEG_INFINITY);
    }
    let d = distances(config).chordal;
    let mut l_min = f64::INFINITY;
    for i in 0..n {
        for j in 0..i {
            l_min = l_min.min(d[(i, j)]);
        }
    }
    let mut g = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..i {
            let l = d[(i, j)];
            let damp = (-kappa * (l - l_min)).exp();
            let v = if setting.nu() == 2 {
                k0_k1_scaled(kappa * l)?.0 * damp / (2.0 * PI)
            } else {
                damp / (4.0 * PI * l)
            };
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    let top = *symmetric_eigen(&g)?.values.last().expect("nonempty");
    Ok(top.ln() - kappa * l_min)
}

/// Critical coupling for `ν = 3`: the largest eigenvalue of
/// `C_jj' = 1/(4π ℓ_jj')` (zero diagonal). Bound states exist iff
/// `α < alpha_crit`.
pub fn alpha_crit(config: &Configuration) -> Result<f64> {
    if config.setting().nu() != 3 {
        return Err(Error::Argument(format!(
            "the critical coupling is defined for circle3 and sphere, got {}",
            config.setting()
        )));
    }
    let d = distances(config).chordal;
    let n = config.len();
    let c = Matrix::from_fn(n, |i, j| if i == j { 0.0 } else { 1.0 / (4.0 * PI * d[(i, j)]) });
    let eig = symmetric_eigen(&c)?;
    Ok(*eig.values.last().expect("nonempty"))
}
