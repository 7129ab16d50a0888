//! Interaction supports on the loop, the circle and the sphere: canonical and
//! sharp configurations, seeded random sampling, pairwise distances, the
//! operational congruence test and spherical-design certification.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Matrix};

/// Smallest admissible separation between two sites.
pub const MIN_GAP: f64 = 1e-9;
const UNIT_NORM_TOL: f64 = 1e-12;
const MAX_SAMPLING_ATTEMPTS: usize = 1000;
/// Schema version of the configuration JSON format.
pub const SCHEMA_VERSION: u32 = 1;

/// Geometry and free kernel in force.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Setting {
    /// One-dimensional loop of perimeter 2π.
    Loop,
    /// Unit circle in the plane, two-dimensional point interactions.
    Circle2,
    /// Unit circle in space, three-dimensional point interactions.
    Circle3,
    /// Unit sphere in space.
    Sphere,
}

impl Setting {
    /// Dimension of the ambient space carrying the free Green's function.
    pub fn nu(self) -> u32 {
        match self {
            Setting::Loop => 1,
            Setting::Circle2 => 2,
            Setting::Circle3 | Setting::Sphere => 3,
        }
    }

    pub fn is_angular(self) -> bool {
        !matches!(self, Setting::Sphere)
    }

    pub fn name(self) -> &'static str {
        match self {
            Setting::Loop => "loop",
            Setting::Circle2 => "circle2",
            Setting::Circle3 => "circle3",
            Setting::Sphere => "sphere",
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Setting {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "loop" => Ok(Setting::Loop),
            "circle2" => Ok(Setting::Circle2),
            "circle3" => Ok(Setting::Circle3),
            "sphere" => Ok(Setting::Sphere),
            other => Err(Error::Argument(format!(
                "unknown setting {other:?} (expected loop, circle2, circle3 or sphere)"
            ))),
        }
    }
}

/// Site coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Sites {
    /// Angles in `[0, 2π)`, strictly increasing (loop and circles).
    Angles(Vec<f64>),
    /// Unit vectors (sphere).
    Points(Vec<[f64; 3]>),
}

/// An interaction support `Y` on one of the manifolds.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    setting: Setting,
    sites: Sites,
    seed: Option<u64>,
}

impl Configuration {
    /// Builds a configuration on the loop or a circle. Angles are reduced
    /// modulo 2π and sorted.
    pub fn from_angles(setting: Setting, angles: &[f64]) -> Result<Self> {
        if !setting.is_angular() {
            return Err(Error::Argument("angles describe loop or circle configurations".into()));
        }
        if angles.is_empty() {
            return Err(Error::Argument("a configuration needs at least one site".into()));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::Argument("angles must be finite".into()));
        }
        let mut a: Vec<f64> = angles.iter().map(|&x| reduce_angle(x)).collect();
        a.sort_by(f64::total_cmp);
        let n = a.len();
        if n > 1 {
            for j in 0..n {
                let gap = if j + 1 < n {
                    a[j + 1] - a[j]
                } else {
                    a[0] + TAU - a[n - 1]
                };
                if gap <= MIN_GAP {
                    return Err(Error::Argument(format!(
                        "sites {} and {} are closer than {MIN_GAP:e}",
                        j,
                        (j + 1) % n
                    )));
                }
            }
        }
        Ok(Configuration {
            setting,
            sites: Sites::Angles(a),
            seed: None,
        })
    }

    /// Builds a sphere configuration from unit vectors.
    pub fn from_points(points: &[[f64; 3]]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Argument("a configuration needs at least one site".into()));
        }
        for (j, p) in points.iter().enumerate() {
            let norm = norm3(p);
            if !norm.is_finite() || (norm - 1.0).abs() > UNIT_NORM_TOL {
                return Err(Error::Argument(format!("site {j} is not a unit vector (norm {norm})")));
            }
        }
        for i in 0..points.len() {
            for j in 0..i {
                if dist3(&points[i], &points[j]) <= MIN_GAP {
                    return Err(Error::Argument(format!(
                        "sites {j} and {i} are closer than {MIN_GAP:e}"
                    )));
                }
            }
        }
        Ok(Configuration {
            setting: Setting::Sphere,
            sites: Sites::Points(points.to_vec()),
            seed: None,
        })
    }

    /// Normalizes arbitrary nonzero vectors onto the sphere.
    pub fn from_directions(directions: &[[f64; 3]]) -> Result<Self> {
        let pts: Vec<[f64; 3]> = directions
            .iter()
            .map(|d| {
                let r = norm3(d);
                [d[0] / r, d[1] / r, d[2] / r]
            })
            .collect();
        Self::from_points(&pts)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn setting(&self) -> Setting {
        self.setting
    }

    pub fn sites(&self) -> &Sites {
        &self.sites
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn len(&self) -> usize {
        match &self.sites {
            Sites::Angles(a) => a.len(),
            Sites::Points(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Angles of a loop/circle configuration.
    pub fn angles(&self) -> Option<&[f64]> {
        match &self.sites {
            Sites::Angles(a) => Some(a),
            Sites::Points(_) => None,
        }
    }

    /// Positions in the ambient space: circle sites lie in the `xy`-plane
    /// (the loop is embedded the same way).
    pub fn positions(&self) -> Vec<[f64; 3]> {
        match &self.sites {
            Sites::Angles(a) => a.iter().map(|t| [t.cos(), t.sin(), 0.0]).collect(),
            Sites::Points(p) => p.clone(),
        }
    }

    /// Same configuration in another setting of the same kind (loop and the
    /// two circles share angular coordinates).
    pub fn in_setting(&self, setting: Setting) -> Result<Self> {
        if setting.is_angular() != self.setting.is_angular() {
            return Err(Error::Argument(format!(
                "cannot reinterpret a {} configuration as {setting}",
                self.setting
            )));
        }
        Ok(Configuration {
            setting,
            ..self.clone()
        })
    }

    /// Rigid rotation: angle shift on the loop/circle, rotation matrix on the
    /// sphere.
    pub fn rotated_by_angle(&self, shift: f64) -> Result<Self> {
        let a = self
            .angles()
            .ok_or_else(|| Error::Argument("angle shift needs an angular configuration".into()))?;
        let shifted: Vec<f64> = a.iter().map(|t| t + shift).collect();
        Configuration::from_angles(self.setting, &shifted)
    }

    pub fn rotated(&self, r: &[[f64; 3]; 3]) -> Result<Self> {
        match &self.sites {
            Sites::Points(p) => {
                let q: Vec<[f64; 3]> = p.iter().map(|x| mat_vec(r, x)).collect();
                Configuration::from_directions(&q)
            }
            Sites::Angles(_) => Err(Error::Argument("rotation matrix needs a sphere configuration".into())),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ConfigFile::from(self)).expect("configuration serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let file: ConfigFile = serde_json::from_value(value.clone())
            .map_err(|e| Error::Argument(format!("bad configuration JSON: {e}")))?;
        file.try_into()
    }
}

/// On-disk form of a configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigFile {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub setting: Setting,
    #[serde(rename = "N")]
    pub n: usize,
    pub sites: Sites,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

impl From<&Configuration> for ConfigFile {
    fn from(c: &Configuration) -> Self {
        ConfigFile {
            schema_version: SCHEMA_VERSION,
            setting: c.setting,
            n: c.len(),
            sites: c.sites.clone(),
            seed: c.seed,
        }
    }
}

impl TryFrom<ConfigFile> for Configuration {
    type Error = Error;
    fn try_from(f: ConfigFile) -> Result<Self> {
        if f.schema_version != SCHEMA_VERSION {
            return Err(Error::Argument(format!(
                "unsupported schema_version {}",
                f.schema_version
            )));
        }
        let config = match (&f.sites, f.setting.is_angular()) {
            (Sites::Angles(a), true) => Configuration::from_angles(f.setting, a)?,
            (Sites::Points(p), false) => Configuration::from_points(p)?,
            _ => {
                return Err(Error::Argument(format!(
                    "site format does not match setting {}",
                    f.setting
                )));
            }
        };
        if config.len() != f.n {
            return Err(Error::Argument(format!("N = {} but {} sites given", f.n, config.len())));
        }
        Ok(Configuration { seed: f.seed, ..config })
    }
}

impl Serialize for Configuration {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ConfigFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Configuration {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = ConfigFile::deserialize(d)?;
        Configuration::try_from(f).map_err(serde::de::Error::custom)
    }
}

/// Pairwise distance data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceData {
    /// Loop geodesic distances in `[0, π]` (loop only).
    pub geodesic: Option<Matrix>,
    /// Euclidean distances in the ambient space.
    pub chordal: Matrix,
    /// Angular separations in `[0, π]` (circles only).
    pub angular: Option<Matrix>,
}

/// Named sharp configurations of the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SharpName {
    AntipodalPair,
    Triangle,
    Tetrahedron,
    Octahedron,
    Icosahedron,
}

impl SharpName {
    pub fn for_n(n: usize) -> Result<Self> {
        match n {
            2 => Ok(SharpName::AntipodalPair),
            3 => Ok(SharpName::Triangle),
            4 => Ok(SharpName::Tetrahedron),
            6 => Ok(SharpName::Octahedron),
            12 => Ok(SharpName::Icosahedron),
            other => Err(Error::UnsupportedN(other)),
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "antipodal" | "antipodal-pair" => Some(SharpName::AntipodalPair),
            "triangle" => Some(SharpName::Triangle),
            "tetrahedron" => Some(SharpName::Tetrahedron),
            "octahedron" => Some(SharpName::Octahedron),
            "icosahedron" => Some(SharpName::Icosahedron),
            _ => None,
        }
    }

    pub fn n(self) -> usize {
        match self {
            SharpName::AntipodalPair => 2,
            SharpName::Triangle => 3,
            SharpName::Tetrahedron => 4,
            SharpName::Octahedron => 6,
            SharpName::Icosahedron => 12,
        }
    }
}

/// A sharp (hence universally optimal) sphere configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpConfig {
    pub name: SharpName,
    #[serde(rename = "N")]
    pub n: usize,
    /// Distinct inner products between distinct points, ascending.
    pub inner_products: Vec<f64>,
    /// Number of distinct inner products.
    pub m: usize,
    /// `2m - 1`
    pub design_strength: usize,
}

/// Equidistant loop configuration `{π(2j-1)/N}`.
pub fn canonical_loop(n: usize) -> Result<Configuration> {
    canonical_angles(Setting::Loop, n)
}

/// Vertices of the regular `N`-gon inscribed in the unit circle, at the same
/// angles as [`canonical_loop`]. `setting` selects the planar or spatial
/// kernel.
pub fn canonical_circle(setting: Setting, n: usize) -> Result<Configuration> {
    if !matches!(setting, Setting::Circle2 | Setting::Circle3) {
        return Err(Error::Argument(format!("{setting} is not a circle setting")));
    }
    canonical_angles(setting, n)
}

fn canonical_angles(setting: Setting, n: usize) -> Result<Configuration> {
    if n < 2 {
        return Err(Error::Argument(format!("N must be at least 2, got {n}")));
    }
    let nf = n as f64;
    let angles: Vec<f64> = (1..=n).map(|j| PI * (2 * j - 1) as f64 / nf).collect();
    Configuration::from_angles(setting, &angles)
}

/// Canonical maximizer for a setting: equidistant points on the loop/circle,
/// the sharp configuration on the sphere.
pub fn canonical(setting: Setting, n: usize) -> Result<Configuration> {
    match setting {
        Setting::Loop => canonical_loop(n),
        Setting::Circle2 | Setting::Circle3 => canonical_circle(setting, n),
        Setting::Sphere => sharp_sphere(n).map(|(c, _)| c),
    }
}

/// Sharp sphere configuration with `N ∈ {2, 3, 4, 6, 12}` in its reference
/// orientation.
pub fn sharp_sphere(n: usize) -> Result<(Configuration, SharpConfig)> {
    let name = SharpName::for_n(n)?;
    let s3 = 1.0 / 3f64.sqrt();
    let dirs: Vec<[f64; 3]> = match name {
        SharpName::AntipodalPair => vec![[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]],
        SharpName::Triangle => (0..3)
            .map(|j| {
                let t = TAU * j as f64 / 3.0;
                [t.cos(), t.sin(), 0.0]
            })
            .collect(),
        SharpName::Tetrahedron => vec![[s3, s3, s3], [s3, -s3, -s3], [-s3, s3, -s3], [-s3, -s3, s3]],
        SharpName::Octahedron => vec![
            [1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
        ],
        SharpName::Icosahedron => {
            let phi = 0.5 * (1.0 + 5f64.sqrt());
            let mut v = Vec::with_capacity(12);
            for s1 in [1.0, -1.0] {
                for s2 in [1.0, -1.0] {
                    let (a, b) = (s1, s2 * phi);
                    v.push([0.0, a, b]);
                    v.push([a, b, 0.0]);
                    v.push([b, 0.0, a]);
                }
            }
            v
        }
    };
    let config = Configuration::from_directions(&dirs)?;
    let inner_products: Vec<f64> = match name {
        SharpName::AntipodalPair => vec![-1.0],
        SharpName::Triangle => vec![-0.5],
        SharpName::Tetrahedron => vec![-1.0 / 3.0],
        SharpName::Octahedron => vec![-1.0, 0.0],
        SharpName::Icosahedron => vec![-1.0, -1.0 / 5f64.sqrt(), 1.0 / 5f64.sqrt()],
    };
    let m = inner_products.len();
    Ok((
        config,
        SharpConfig {
            name,
            n,
            inner_products,
            m,
            design_strength: 2 * m - 1,
        },
    ))
}

/// Independent uniform sites, deterministic for a fixed seed. Angles are
/// uniform on `[0, 2π)`; sphere sites are normalized standard Gaussian
/// triples. Draws violating the minimum gap are rejected and redrawn.
pub fn random_config(setting: Setting, n: usize, seed: u64) -> Result<Configuration> {
    if n < 2 {
        return Err(Error::Argument(format!("N must be at least 2, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_SAMPLING_ATTEMPTS {
        let draw = if setting.is_angular() {
            let angles: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..TAU)).collect();
            Configuration::from_angles(setting, &angles)
        } else {
            let dirs: Vec<[f64; 3]> = (0..n)
                .map(|_| {
                    [
                        rng.sample(StandardNormal),
                        rng.sample(StandardNormal),
                        rng.sample(StandardNormal),
                    ]
                })
                .collect();
            if dirs.iter().any(|d| norm3(d) < 1e-12) {
                continue;
            }
            Configuration::from_directions(&dirs)
        };
        if let Ok(c) = draw {
            return Ok(c.with_seed(seed));
        }
    }
    Err(Error::Sampling {
        attempts: MAX_SAMPLING_ATTEMPTS,
    })
}

/// Pairwise distances.
pub fn distances(config: &Configuration) -> DistanceData {
    let pos = config.positions();
    let n = pos.len();
    let chordal = Matrix::from_fn(n, |i, j| if i == j { 0.0 } else { dist3(&pos[i], &pos[j]) });
    let separation = |a: &[f64]| {
        Matrix::from_fn(n, |i, j| {
            let d = (a[i] - a[j]).abs();
            d.min(TAU - d)
        })
    };
    match (config.setting, config.angles()) {
        (Setting::Loop, Some(a)) => DistanceData {
            geodesic: Some(separation(a)),
            chordal,
            angular: None,
        },
        (_, Some(a)) => DistanceData {
            geodesic: None,
            chordal,
            angular: Some(separation(a)),
        },
        _ => DistanceData {
            geodesic: None,
            chordal,
            angular: None,
        },
    }
}

/// Sorted multiset of chordal distances over unordered pairs.
pub fn distance_multiset(config: &Configuration) -> Vec<f64> {
    let pos = config.positions();
    let mut d = Vec::with_capacity(pos.len() * pos.len().saturating_sub(1) / 2);
    for i in 0..pos.len() {
        for j in 0..i {
            d.push(dist3(&pos[i], &pos[j]));
        }
    }
    d.sort_by(f64::total_cmp);
    d
}

/// Eigenvalues of the Gram matrix of site positions, ascending.
pub fn gram_spectrum(config: &Configuration) -> Result<Vec<f64>> {
    let pos = config.positions();
    let g = Matrix::from_fn(pos.len(), |i, j| dot3(&pos[i], &pos[j]));
    Ok(symmetric_eigen(&g)?.values)
}

/// Operational congruence: sorted pairwise chordal distances agree within
/// `tol`, and on the sphere the sorted Gram spectra agree as well.
pub fn is_congruent(a: &Configuration, b: &Configuration, tol: f64) -> Result<bool> {
    if a.setting != b.setting || a.len() != b.len() {
        return Err(Error::Argument(format!(
            "cannot compare {} N={} with {} N={}",
            a.setting,
            a.len(),
            b.setting,
            b.len()
        )));
    }
    let close = |x: &[f64], y: &[f64]| x.iter().zip(y).all(|(p, q)| (p - q).abs() <= tol);
    if !close(&distance_multiset(a), &distance_multiset(b)) {
        return Ok(false);
    }
    if a.setting == Setting::Sphere {
        return Ok(close(&gram_spectrum(a)?, &gram_spectrum(b)?));
    }
    Ok(true)
}

/// Normalized surface integral of `x^a y^b z^c` over the unit sphere.
pub fn sphere_monomial_mean(a: u32, b: u32, c: u32) -> f64 {
    if a % 2 == 1 || b % 2 == 1 || c % 2 == 1 {
        return 0.0;
    }
    double_factorial(a as i64 - 1) * double_factorial(b as i64 - 1) * double_factorial(c as i64 - 1)
        / double_factorial((a + b + c) as i64 + 1)
}

fn double_factorial(n: i64) -> f64 {
    let mut acc = 1.0;
    let mut k = n;
    while k > 1 {
        acc *= k as f64;
        k -= 2;
    }
    acc
}

const DESIGN_TOL: f64 = 1e-10;

/// Largest `M <= max_degree` for which the site average reproduces the sphere
/// average of every monomial of total degree at most `M`.
pub fn spherical_design_strength(config: &Configuration, max_degree: u32) -> Result<u32> {
    let Sites::Points(pts) = &config.sites else {
        return Err(Error::Argument(
            "design strength is defined for sphere configurations".into(),
        ));
    };
    if max_degree > 8 {
        return Err(Error::Argument(format!(
            "max degree must be at most 8, got {max_degree}"
        )));
    }
    let n = pts.len() as f64;
    let mut strength = 0;
    for degree in 1..=max_degree {
        for a in 0..=degree {
            for b in 0..=degree - a {
                let c = degree - a - b;
                let avg = pts
                    .iter()
                    .map(|p| p[0].powi(a as i32) * p[1].powi(b as i32) * p[2].powi(c as i32))
                    .sum::<f64>()
                    / n;
                if (avg - sphere_monomial_mean(a, b, c)).abs() > DESIGN_TOL {
                    return Ok(strength);
                }
            }
        }
        strength = degree;
    }
    Ok(strength)
}

/// Rotation matrix from a unit quaternion-free parametrization: a uniformly
/// random rotation drawn from a seeded generator.
pub fn random_rotation(seed: u64) -> [[f64; 3]; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q: [f64; 4] = [0.0; 4];
    loop {
        for x in q.iter_mut() {
            *x = rng.sample(StandardNormal);
        }
        let r = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r > 1e-6 {
            q.iter_mut().for_each(|x| *x /= r);
            break;
        }
    }
    let [w, x, y, z] = q;
    [
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
        ],
        [
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
        ],
        [
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ]
}

pub(crate) fn reduce_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

pub(crate) fn norm3(a: &[f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

pub(crate) fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn dist3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    norm3(&d)
}

fn mat_vec(r: &[[f64; 3]; 3], x: &[f64; 3]) -> [f64; 3] {
    [dot3(&r[0], x), dot3(&r[1], x), dot3(&r[2], x)]
}
