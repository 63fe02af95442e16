//! Numerical laboratory for parabolic harmonic analysis on time-varying
//! Lipschitz graph domains.
//!
//! The crate is organised around a uniform parabolic grid (time step `h²`)
//! and a handful of instruments built on top of it:
//!
//! * [`grid`] and [`io`]: geometry, sampled fields, cube families and the
//!   PGRID file format.
//! * [`frac_ops`]: parabolic Fourier multipliers and the singular-integral
//!   half time-derivative.
//! * [`bmo`]: parabolic BMO norms and the dyadic inequalities around them.
//! * [`lewis_murray`]: the four equivalent regularity functionals.
//! * [`extension`]: the reflect, tile and blend extension of a boundary graph.
//! * [`pullback`]: mollified flattening map and pulled-back coefficients.
//! * [`solver`]: implicit finite differences on the flattened strip.
//! * [`functionals`]: cones, maximal, square and area functions, Carleson norms.
//! * [`experiments`]: corpus generation, suites and report emission.

pub mod bmo;
pub mod experiments;
pub mod extension;
pub mod frac_ops;
pub mod functionals;
pub mod grid;
pub mod io;
pub mod lewis_murray;
pub mod pullback;
pub mod solver;
pub mod strip;

mod boxsum;
mod quad;

pub use grid::{GridSpec, ParabolicCube, ParabolicPoint, Periodicity, ScalarField};

/// Errors raised across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("out of domain: {0}")]
    OutOfDomain(String),
    #[error("degenerate request: {0}")]
    Degenerate(String),
    #[error("insufficient margin: need {space} spatial and {time} temporal cells")]
    Margin { space: usize, time: usize },
    #[error("field is not periodic on the required axes")]
    NotPeriodic,
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("calibration failed: {0}")]
    Calibration(String),
    #[error("map not invertible: certificate {0}")]
    NotInvertible(f64),
    #[error("ellipticity lost: minimum eigenvalue {0}")]
    Ellipticity(f64),
    #[error("linear solver stalled: relative residual {residual:e} after {iterations} iterations")]
    Solver { residual: f64, iterations: usize },
    #[error("malformed PGRID header: {0}")]
    MalformedHeader(String),
    #[error("PGRID dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("truncated PGRID payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
