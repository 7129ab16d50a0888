//! Command-line arguments and their resolution into a [`RunSpec`].

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pointopt::configurations::{canonical, random_config, sharp_sphere, SharpName};
use pointopt::{Configuration, Error, Setting};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "pointopt",
    version,
    about = "Ground states of point interactions on loops, circles and spheres"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ground-state energy of one configuration, at one coupling or on a grid.
    Spectrum(Common),
    /// Multistart search for the maximizer of λ₁, or the minimizer of the
    /// sphere surface energy.
    Optimize(Common),
    /// Random-sample check that the canonical configuration maximizes λ₁.
    Verify(Common),
    /// The same check for the repulsive loop over a coupling grid.
    ConjectureScan(Common),
    /// Distinct inner products and design strength of a sphere configuration.
    DesignCheck(Common),
    /// Weak- and strong-coupling checks for the repulsive loop.
    Asymptotics(Common),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Optimize(_) => "optimize",
            Command::Verify(_) => "verify",
            Command::ConjectureScan(_) => "conjecture-scan",
            Command::DesignCheck(_) => "design-check",
            Command::Asymptotics(_) => "asymptotics",
        }
    }

    pub fn args(&self) -> &Common {
        match self {
            Command::Spectrum(a)
            | Command::Optimize(a)
            | Command::Verify(a)
            | Command::ConjectureScan(a)
            | Command::DesignCheck(a)
            | Command::Asymptotics(a) => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveArg {
    Lambda1,
    SurfaceEnergy,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// loop, circle2, circle3 or sphere.
    #[arg(long)]
    pub setting: Option<Setting>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_max: Option<f64>,
    /// Number of equally spaced couplings from --alpha-min to --alpha-max.
    #[arg(long)]
    pub alpha_steps: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub starts: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// A configuration JSON file, or a built-in name: canonical, random,
    /// antipodal, triangle, tetrahedron, octahedron, icosahedron.
    #[arg(long)]
    pub config: Option<String>,
    /// Objective of `optimize`.
    #[arg(long, value_enum, default_value = "lambda1")]
    pub objective: ObjectiveArg,
    /// Spectral parameter of the surface energy.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Write the artifact here (atomically) instead of to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

/// Everything a run depends on, after defaults are filled in. Embedded in
/// every artifact.
#[derive(Debug, Clone, Serialize)]
pub struct RunSpec {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub setting: Option<Setting>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_grid: Option<Vec<f64>>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub starts: Option<usize>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective: Option<ObjectiveArg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    pub format: Format,
}

impl RunSpec {
    /// The part of the spec every command shares; the commands fill in the
    /// rest as they resolve defaults.
    pub fn base(command: &Command) -> Self {
        let a = command.args();
        RunSpec {
            command: command.name(),
            setting: None,
            alpha: None,
            alpha_grid: None,
            n: None,
            trials: None,
            starts: None,
            seed: a.seed,
            config: None,
            objective: None,
            kappa: None,
            output_path: a.out.as_ref().map(|p| p.display().to_string()),
            format: a.format,
        }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}

pub fn require<T: Copy>(value: Option<T>, flag: &str, command: &str) -> Result<T, Error> {
    value.ok_or_else(|| usage(format!("{command} needs --{flag}")))
}

/// `--alpha-min/--alpha-max/--alpha-steps`, if any of them is given.
pub fn alpha_grid(a: &Common) -> Result<Option<Vec<f64>>, Error> {
    match (a.alpha_min, a.alpha_max, a.alpha_steps) {
        (None, None, None) => Ok(None),
        (Some(lo), Some(hi), Some(steps)) => {
            if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                return Err(usage(format!(
                    "need finite --alpha-min <= --alpha-max, got {lo} and {hi}"
                )));
            }
            if steps == 0 || (steps == 1 && lo != hi) {
                return Err(usage(format!(
                    "--alpha-steps must be at least 2 for a range, got {steps}"
                )));
            }
            if steps == 1 {
                return Ok(Some(vec![lo]));
            }
            let h = (hi - lo) / (steps - 1) as f64;
            let mut grid: Vec<f64> = (0..steps).map(|i| lo + h * i as f64).collect();
            grid[steps - 1] = hi;
            Ok(Some(grid))
        }
        _ => Err(usage("--alpha-min, --alpha-max and --alpha-steps go together")),
    }
}

/// Resolves `--config` (or its absence) into a configuration. Returns the
/// configuration and the normalized source recorded in the run spec.
pub fn resolve_config(
    a: &Common,
    default_setting: Option<Setting>,
    command: &str,
) -> Result<(Configuration, String), Error> {
    let source = a.config.clone().unwrap_or_else(|| "canonical".to_string());
    let setting = a.setting.or(default_setting);
    if let Some(name) = SharpName::from_name(&source) {
        if let Some(s) = setting.filter(|&s| s != Setting::Sphere) {
            return Err(usage(format!("built-in {source} is a sphere configuration, not {s}")));
        }
        if let Some(n) = a.n.filter(|&n| n != name.n()) {
            return Err(usage(format!("built-in {source} has N = {}, not {n}", name.n())));
        }
        return Ok((sharp_sphere(name.n())?.0, source));
    }
    match source.as_str() {
        "canonical" => {
            let setting = require(setting, "setting", command)?;
            let n = require(a.n, "n", command)?;
            Ok((canonical(setting, n)?, source))
        }
        "random" => {
            let setting = require(setting, "setting", command)?;
            let n = require(a.n, "n", command)?;
            Ok((random_config(setting, n, a.seed)?, source))
        }
        path => {
            let text =
                std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read configuration {path}: {e}")))?;
            let value: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| usage(format!("configuration {path} is not JSON: {e}")))?;
            let mut config = Configuration::from_json(&value)?;
            if let Some(s) = a.setting {
                config = config.in_setting(s)?;
            }
            if let Some(n) = a.n.filter(|&n| n != config.len()) {
                return Err(usage(format!("configuration {path} has N = {}, not {n}", config.len())));
            }
            Ok((config, source))
        }
    }
}
