//! Simulation library for a two-level emitter in a waveguide-embedded
//! Fabry-Pérot cavity.
//!
//! The library spans the full transition from an open waveguide to a
//! high-quality cavity: the exact guided- and radiation-mode local density
//! of states (LDOS) of the mirror-terminated waveguide, extraction of
//! effective cavity parameters (background rate, cavity weight, linewidth,
//! coupling), longitudinal-acoustic phonon effects through the polaron
//! Franck-Condon factor and sideband correlator, Lindblad dynamics of the
//! emitter-cavity system, two-colour emission spectra, and single-photon
//! source figures of merit (indistinguishability, efficiency).
//!
//! Unit conventions used throughout:
//! - energies and rates are stored as `ħ × (angular frequency)` in μeV,
//! - lengths in μm, times in ps, phonon frequencies in ps⁻¹,
//! - the only physical constants are `ħc`, `ħ` and `k_B` (see [`constants`]).

pub mod config;
pub mod constants;
pub mod error;
pub mod fom;
pub mod linalg;
pub mod phonon;
pub mod photonic;
pub mod pipeline;
pub mod quantum;
pub mod spectra;
pub mod sweep;

pub use error::{Error, Result};

/// Complex double, the scalar type of all quantum-state arithmetic.
pub type C64 = num_complex::Complex64;
