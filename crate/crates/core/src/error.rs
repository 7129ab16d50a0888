use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of a function (non-positive
    /// spectral parameter, negative distance, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The positive-energy loop kernel was evaluated within the pole guard
    /// of an integer wave number.
    #[error("kernel pole at k = {k} (nearest integer {nearest})")]
    Pole { k: f64, nearest: i64 },

    /// Malformed or inconsistent input.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The secular equation has no root in the scanned range.
    #[error("no bound state for alpha = {alpha} in kappa range [{kappa_min:e}, {kappa_max:e}]")]
    NoBoundState { alpha: f64, kappa_min: f64, kappa_max: f64 },

    /// A root finder or eigen-solver failed to converge.
    #[error("solver failure: {0}")]
    Solver(String),

    /// Random configuration sampling kept violating the minimum-gap floor.
    #[error("sampling failed after {attempts} attempts")]
    Sampling { attempts: usize },

    /// No sharp configuration exists for this number of points on the sphere.
    #[error("N = {0} has no sharp configuration on the sphere (cube and dodecahedron vertex sets do not qualify for universality); supported: 2, 3, 4, 6, 12")]
    UnsupportedN(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
