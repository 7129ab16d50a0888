//! Ground states of Schrödinger operators with `N` equal point interactions
//! placed on a loop, a circle (in the plane or in space) or a sphere.
//!
//! The spectral problem is reduced to a finite secular matrix built from the
//! free Green's function (see [`spectral::krein_matrix`]); the ground state is
//! the spectral parameter at which its smallest eigenvalue vanishes. On top of
//! that the crate searches configuration space for the maximizers of the
//! ground state ([`optimizer`]), certifies the symmetric candidates
//! ([`configurations`]) and checks the weak and strong coupling asymptotics
//! of the repulsive loop ([`asymptotics`]).

pub mod asymptotics;
pub mod configurations;
pub mod error;
pub mod kernels;
pub mod linalg;
pub mod nelder_mead;
pub mod optimizer;
pub mod spectral;

pub use configurations::{Configuration, DistanceData, Setting, SharpConfig, Sites};
pub use error::{Error, Result};
pub use kernels::{KernelValue, SpectralParam};
pub use optimizer::{fmt_f64, OptimizationReport, SurfaceEnergy};
pub use spectral::{KreinMatrix, Monodromy, SpectralResult};
