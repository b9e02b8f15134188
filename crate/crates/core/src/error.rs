//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid structure, mirror or environment parameters.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The Fabry-Pérot denominator 1 - r̃₁r̃₂ is numerically singular.
    /// `family` is `None` for the guided mode, otherwise the index of the
    /// offending radiation-mode family.
    #[error("LDOS pole at ħω = {omega_uev} μeV (|1 - r̃₁r̃₂| = {magnitude:.3e}{})",
            family.map(|m| format!(", mode family {m}")).unwrap_or_default())]
    Pole {
        omega_uev: f64,
        magnitude: f64,
        family: Option<usize>,
    },

    /// The LDOS decomposition optimizer failed to converge.
    #[error("LDOS fit failed to converge: {0}")]
    FitFailure(String),

    /// An adaptive quadrature did not reach its requested tolerance.
    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),

    /// Density-matrix propagation broke an accuracy or sanity bound.
    #[error("propagation failed at t = {t_ps} ps: {message}")]
    Propagation { t_ps: f64, message: String },

    /// A tabulated function was queried outside its range.
    #[error("range error: {0}")]
    Range(String),

    /// A ratio with a vanishing denominator (no emission, zero rates).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The correlator had not decayed sufficiently at the window boundary.
    #[error("time window too short: {0}")]
    Window(String),

    /// Configuration file or CLI usage problems.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 for usage/config errors, 1 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidInput(_) => 2,
            _ => 1,
        }
    }
}
