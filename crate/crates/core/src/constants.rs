//! Physical constants in the crate's unit system (μeV, μm, ps, K).

/// ħc in μeV·μm. Converts between propagation phases and energies.
pub const HBAR_C_UEV_UM: f64 = 197_326.98;

/// ħ in μeV·ps. Converts between energies (μeV) and rates (ps⁻¹).
pub const HBAR_UEV_PS: f64 = 658.2120;

/// Boltzmann constant in μeV/K.
pub const KB_UEV_PER_K: f64 = 86.173_332_62;
