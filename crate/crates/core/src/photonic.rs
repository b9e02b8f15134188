//! Optical description of the mirror-terminated waveguide.
//!
//! The guided-mode LDOS of a waveguide section of length `L` closed by two
//! partially reflecting mirrors is
//!
//! ```text
//! L_B(ω) = Γ_B⁰ · Re{ [1 + r̃₁(ω)][1 + r̃₂(ω)] / [1 − r̃₁(ω) r̃₂(ω)] }
//! ```
//!
//! with effective complex reflectivities `r̃_j(ω) = r_j e^{i[φ₀ʲ + L n_eff ω / c]}`
//! for an emitter at the cavity midpoint. On resonance the LDOS peaks at
//! `Γ_B⁰ (1+r₁)(1+r₂)/(1−r₁r₂)`; at the antiresonance, half a free spectral
//! range away, it equals `Γ_B⁰ (1−r₁r₂)/(1+r₁r₂)`.
//!
//! [`decompose_ldos`] splits this profile into a constant background `Γ_B`
//! plus a Lorentzian quasimode of weight `L_c` and linewidth `κ`, from which
//! the emitter-cavity coupling follows as `g = √(ħc·L_c/(4 L n_eff))`.

use crate::constants::HBAR_C_UEV_UM;
use crate::error::{Error, Result};
use crate::C64;

mod fit;

pub use fit::decompose_ldos;

/// Threshold below which `|1 - r̃₁r̃₂|` is treated as an exact pole.
pub const POLE_EPS: f64 = 1e-12;

/// A single mirror: amplitude reflectivity, reflection phase, and amplitude
/// transmittivity. Mirrors are lossless, `r² + t² = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirrorSpec {
    /// Amplitude reflectivity, in `[0, 1]`.
    pub r: f64,
    /// Reflection phase in radians.
    pub phi0: f64,
    /// Amplitude transmittivity, `√(1 − r²)` for a lossless mirror.
    pub t: f64,
}

impl MirrorSpec {
    /// Lossless mirror with reflectivity `r` and zero reflection phase.
    pub fn lossless(r: f64) -> Result<Self> {
        Self::new(r, 0.0)
    }

    /// Lossless mirror with reflectivity `r` and reflection phase `phi0`.
    pub fn new(r: f64, phi0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) || !r.is_finite() {
            return Err(Error::InvalidInput(format!(
                "mirror reflectivity must be in [0, 1], got {r}"
            )));
        }
        Ok(Self {
            r,
            phi0,
            t: (1.0 - r * r).sqrt(),
        })
    }
}

/// One additional guided-mode family contributing to the radiation reservoir
/// of a multi-moded structure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeFamily {
    /// Bare emission rate into this family, μeV.
    pub gamma0: f64,
    /// Mirror amplitude reflectivities seen by this family.
    pub r1: f64,
    pub r2: f64,
    /// Effective index of this family.
    pub n_eff: f64,
}

impl ModeFamily {
    pub fn validate(&self) -> Result<()> {
        if self.gamma0 < 0.0 || !self.gamma0.is_finite() {
            return Err(Error::InvalidInput("mode family gamma0 must be >= 0".into()));
        }
        for r in [self.r1, self.r2] {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::InvalidInput(
                    "mode family reflectivities must be in [0, 1]".into(),
                ));
            }
        }
        if self.n_eff <= 0.0 {
            return Err(Error::InvalidInput("mode family n_eff must be > 0".into()));
        }
        Ok(())
    }
}

/// Geometric and optical description of the waveguide-embedded cavity.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveguideCavity {
    /// Cavity length, μm.
    pub length_um: f64,
    /// Effective refractive index of the guided mode of interest.
    pub n_eff: f64,
    /// Bare emission rate into the guided mode without mirrors, Γ_B⁰ (μeV).
    pub gamma_b0: f64,
    /// Emission rate into non-guided radiation modes, Γ_RM (μeV).
    pub gamma_rm: f64,
    pub mirror1: MirrorSpec,
    pub mirror2: MirrorSpec,
    /// Additional guided-mode families (empty for a single-moded structure).
    pub extra_families: Vec<ModeFamily>,
    /// Cavity resonance energy ħω_c, μeV.
    pub omega_c: f64,
}

impl WaveguideCavity {
    pub fn validate(&self) -> Result<()> {
        if self.length_um <= 0.0 || !self.length_um.is_finite() {
            return Err(Error::InvalidInput("cavity length must be > 0".into()));
        }
        if self.n_eff <= 0.0 {
            return Err(Error::InvalidInput("n_eff must be > 0".into()));
        }
        if self.gamma_b0 < 0.0 {
            return Err(Error::InvalidInput("gammaB0 must be >= 0".into()));
        }
        if self.gamma_rm < 0.0 {
            return Err(Error::InvalidInput("gammaRM must be >= 0".into()));
        }
        if self.omega_c <= 0.0 {
            return Err(Error::InvalidInput("omega_c must be > 0".into()));
        }
        for f in &self.extra_families {
            f.validate()?;
        }
        Ok(())
    }

    /// Free spectral range πħc/(n_eff L), μeV. Resonances of the guided LDOS
    /// sit at even multiples of the FSR from ω_c, antiresonances at odd
    /// half-multiples.
    pub fn fsr(&self) -> f64 {
        std::f64::consts::PI * HBAR_C_UEV_UM / (self.n_eff * self.length_um)
    }

    /// Dimensionless detuning ω̃ = L n_eff (ħω − ħω_c)/(ħc).
    pub fn dimensionless_detuning(&self, omega_uev: f64) -> f64 {
        self.length_um * self.n_eff * (omega_uev - self.omega_c) / HBAR_C_UEV_UM
    }

    /// Converts a dimensionless linewidth κ̃ to κ in μeV.
    pub fn kappa_from_dimensionless(&self, kappa_tilde: f64) -> f64 {
        kappa_tilde * HBAR_C_UEV_UM / (self.length_um * self.n_eff)
    }

    /// Emitter-cavity coupling from the Lorentzian LDOS weight,
    /// g = √(ħc·L_c/(4 L n_eff)), μeV.
    pub fn coupling_from_weight(&self, l_c: f64) -> f64 {
        (HBAR_C_UEV_UM * l_c / (4.0 * self.length_um * self.n_eff)).sqrt()
    }

    /// Replaces both mirrors by lossless mirrors of reflectivity `r`.
    pub fn with_symmetric_mirrors(&self, r: f64) -> Result<Self> {
        let m = MirrorSpec::lossless(r)?;
        Ok(Self {
            mirror1: m,
            mirror2: m,
            ..self.clone()
        })
    }
}

/// Effective cavity quantities extracted from the guided LDOS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    /// Constant waveguide background Γ_B, μeV.
    pub gamma_b: f64,
    /// Lorentzian quasimode weight L_c, μeV.
    pub l_c: f64,
    /// Quasimode linewidth κ, μeV.
    pub kappa: f64,
    /// Emitter-cavity coupling g = √(ħc·L_c/(4 L n_eff)), μeV.
    pub g: f64,
    /// Limiting coupling g_max = √(Γ_B⁰ ħc/(2 L n_eff)), μeV.
    pub g_max: f64,
    /// Limiting linewidth κ_max = 2ħc/(n_eff L), μeV.
    pub kappa_max: f64,
    /// Relative root-mean-square residual of the decomposition.
    pub fit_residual: f64,
}

/// Effective complex reflectivity r̃(ω) = r·exp(i[φ₀ + n_eff·ħω·L/(ħc)]).
///
/// The modulus equals `r` exactly for any ω.
pub fn effective_reflectivity(mirror: &MirrorSpec, omega_uev: f64, length_um: f64, n_eff: f64) -> C64 {
    let phase = mirror.phi0 + n_eff * omega_uev * length_um / HBAR_C_UEV_UM;
    C64::from_polar(mirror.r, phase)
}

/// r̃ evaluated with the propagation phase referenced to ω_c, so that the
/// resonance sits exactly at ω_c regardless of the absolute phase
/// n_eff·ω_c·L/(ħc). The absolute phase is absorbed into the mirror phase,
/// which only shifts the resonance comb.
fn pinned_reflectivity(mirror: &MirrorSpec, theta: f64) -> C64 {
    C64::from_polar(mirror.r, mirror.phi0 + theta)
}

/// Core Fabry-Pérot LDOS factor Re{(1+r̃₁)(1+r̃₂)/(1−r̃₁r̃₂)} for a given
/// dimensionless detuning. Shared by the guided mode and the radiation-mode
/// families.
fn ldos_factor(m1: &MirrorSpec, m2: &MirrorSpec, theta: f64) -> std::result::Result<f64, f64> {
    let r1 = pinned_reflectivity(m1, theta);
    let r2 = pinned_reflectivity(m2, theta);
    let den = C64::new(1.0, 0.0) - r1 * r2;
    if den.norm() < POLE_EPS {
        return Err(den.norm());
    }
    let num = (C64::new(1.0, 0.0) + r1) * (C64::new(1.0, 0.0) + r2);
    Ok((num / den).re)
}

/// Guided-mode LDOS L_B(ω), μeV.
///
/// Exact closed form of the mirror-terminated waveguide with the emitter at
/// the cavity midpoint; the resonance is pinned at `omega_c`. The profile is
/// periodic in ħω with period 2·FSR (alternating field antinodes and nodes at
/// the emitter), and its average over any resonance-anchored FSR window
/// equals Γ_B⁰ exactly.
pub fn ldos_guided(structure: &WaveguideCavity, omega_uev: f64) -> Result<f64> {
    let theta = structure.dimensionless_detuning(omega_uev);
    ldos_factor(&structure.mirror1, &structure.mirror2, theta)
        .map(|f| structure.gamma_b0 * f)
        .map_err(|magnitude| Error::Pole {
            omega_uev,
            magnitude,
            family: None,
        })
}

/// Radiation-reservoir LDOS L_R(ω) = Γ_RM + Σ_m (family LDOS), μeV.
pub fn ldos_radiation(structure: &WaveguideCavity, omega_uev: f64) -> Result<f64> {
    let mut total = structure.gamma_rm;
    for (idx, fam) in structure.extra_families.iter().enumerate() {
        let theta =
            structure.length_um * fam.n_eff * (omega_uev - structure.omega_c) / HBAR_C_UEV_UM;
        let m1 = MirrorSpec::lossless(fam.r1)?;
        let m2 = MirrorSpec::lossless(fam.r2)?;
        let f = ldos_factor(&m1, &m2, theta).map_err(|magnitude| Error::Pole {
            omega_uev,
            magnitude,
            family: Some(idx),
        })?;
        total += fam.gamma0 * f;
    }
    Ok(total)
}

/// Spontaneous emission rate into the radiation reservoir, Γ_R = L_R(ω_X).
pub fn radiation_rate(structure: &WaveguideCavity, omega_x_uev: f64) -> Result<f64> {
    ldos_radiation(structure, omega_x_uev)
}

/// Limiting values approached across the waveguide-to-cavity transition:
/// `g_max = √(Γ_B⁰ ħc/(2 L n_eff))` and `κ_max = 2ħc/(n_eff L)`, both in μeV.
/// κ_max is the inverse transit time from the cavity midpoint to a mirror.
pub fn limit_values(structure: &WaveguideCavity) -> (f64, f64) {
    let g_max =
        (structure.gamma_b0 * HBAR_C_UEV_UM / (2.0 * structure.length_um * structure.n_eff)).sqrt();
    let kappa_max = 2.0 * HBAR_C_UEV_UM / (structure.n_eff * structure.length_um);
    (g_max, kappa_max)
}

/// Renormalized rates for a perfectly reflecting back mirror with the emitter
/// at a field antinode: `Γ_B⁰* = 2Γ_B⁰`, `κ* = κ/2` (κ from the symmetric
/// two-mirror decomposition at the front reflectivity), and the waveguide
/// β-factor `β* = 2β/(β+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenormalizedRates {
    pub gamma_b0_star: f64,
    pub kappa_star: f64,
    pub beta_star: f64,
}

/// Computes the back-mirror renormalization of `structure`.
///
/// Requires `mirror1.r == 1` (perfect back mirror). The symmetric-cavity
/// decomposition is carried out at the front-mirror reflectivity.
pub fn back_mirror_renormalize(structure: &WaveguideCavity) -> Result<RenormalizedRates> {
    if (structure.mirror1.r - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!(
            "back-mirror renormalization requires mirror1.r = 1, got {}",
            structure.mirror1.r
        )));
    }
    let symmetric = structure.with_symmetric_mirrors(structure.mirror2.r)?;
    let params = decompose_ldos(&symmetric)?;
    let gamma_r = radiation_rate(structure, structure.omega_c)?;
    let beta = if structure.gamma_b0 + gamma_r > 0.0 {
        structure.gamma_b0 / (structure.gamma_b0 + gamma_r)
    } else {
        return Err(Error::Degenerate("gammaB0 + gammaR = 0".into()));
    };
    Ok(RenormalizedRates {
        gamma_b0_star: 2.0 * structure.gamma_b0,
        kappa_star: params.kappa / 2.0,
        beta_star: 2.0 * beta / (beta + 1.0),
    })
}

/// Samples the guided LDOS uniformly over exactly one free spectral range
/// centered on the resonance, returning dimensionless detunings ω̃ and LDOS
/// values in μeV. This fixed sampling defines the decomposition objective of
/// [`decompose_ldos`].
pub fn decompose_samples(structure: &WaveguideCavity) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = fit::FIT_SAMPLES;
    let half = std::f64::consts::PI / 2.0;
    let mut theta = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let th = -half + std::f64::consts::PI * i as f64 / (n - 1) as f64;
        let f = ldos_factor(&structure.mirror1, &structure.mirror2, th).map_err(|magnitude| {
            Error::Pole {
                omega_uev: structure.omega_c + th * HBAR_C_UEV_UM / (structure.length_um * structure.n_eff),
                magnitude,
                family: None,
            }
        })?;
        theta.push(th);
        values.push(structure.gamma_b0 * f);
    }
    Ok((theta, values))
}

/// Cavity filter amplitude G(ω) = (1 + r̃₁) t₂ / (1 − r̃₁ r̃₂).
///
/// |G|² weights the two-colour spectrum in the guided-emission integrals.
pub fn filter_function(structure: &WaveguideCavity, omega_uev: f64) -> Result<C64> {
    let theta = structure.dimensionless_detuning(omega_uev);
    let r1 = pinned_reflectivity(&structure.mirror1, theta);
    let r2 = pinned_reflectivity(&structure.mirror2, theta);
    let den = C64::new(1.0, 0.0) - r1 * r2;
    if den.norm() < POLE_EPS {
        return Err(Error::Pole {
            omega_uev,
            magnitude: den.norm(),
            family: None,
        });
    }
    Ok((C64::new(1.0, 0.0) + r1) * structure.mirror2.t / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn structure(r1: f64, r2: f64) -> WaveguideCavity {
        WaveguideCavity {
            length_um: 1.0,
            n_eff: 2.5,
            gamma_b0: 0.3,
            gamma_rm: 0.0,
            mirror1: MirrorSpec::lossless(r1).unwrap(),
            mirror2: MirrorSpec::lossless(r2).unwrap(),
            extra_families: vec![],
            omega_c: 1_305_000.0,
        }
    }

    #[test]
    fn reflectivity_zero_r_is_zero() {
        let m = MirrorSpec::lossless(0.0).unwrap();
        let r = effective_reflectivity(&m, 1000.0, 1.0, 2.5);
        assert_eq!(r, C64::new(0.0, 0.0));
    }

    #[test]
    fn reflectivity_full_round_phase() {
        // n_eff·ω·L/ħc = 2π  ->  r̃ = 1
        let m = MirrorSpec::lossless(1.0).unwrap();
        let omega = 2.0 * std::f64::consts::PI * HBAR_C_UEV_UM / 2.5;
        let r = effective_reflectivity(&m, omega, 1.0, 2.5);
        assert_relative_eq!(r.re, 1.0, epsilon = 1e-12);
        assert!(r.im.abs() < 1e-12);
    }

    #[test]
    fn reflectivity_quarter_phase() {
        // phase = π/2 -> r̃ = i·0.2
        let omega = 0.5 * std::f64::consts::PI * HBAR_C_UEV_UM / 2.5;
        let m = MirrorSpec::lossless(0.2).unwrap();
        let r = effective_reflectivity(&m, omega, 1.0, 2.5);
        assert!(r.re.abs() < 1e-12);
        assert_relative_eq!(r.im, 0.2, epsilon = 1e-12);
    }

    #[test]
    fn mirrorless_ldos_is_flat() {
        let s = structure(0.0, 0.0);
        for k in 0..40 {
            let om = s.omega_c + (k as f64 - 20.0) * 0.13 * s.fsr();
            assert_relative_eq!(ldos_guided(&s, om).unwrap(), 0.3, epsilon = 1e-14);
        }
    }

    #[test]
    fn resonance_and_antiresonance_closed_forms() {
        let s = structure(0.2, 0.2);
        let peak = ldos_guided(&s, s.omega_c).unwrap();
        assert_relative_eq!(peak, 0.3 * 1.44 / 0.96, epsilon = 1e-12);
        assert_relative_eq!(peak, 0.45, epsilon = 1e-12);
        let anti = ldos_guided(&s, s.omega_c + 0.5 * s.fsr()).unwrap();
        assert_relative_eq!(anti, 0.3 * 0.96 / 1.04, epsilon = 1e-12);
        // 0.3·0.96/1.04 = 0.276923...
        assert_relative_eq!(anti, 0.27692, epsilon = 1e-4);
    }

    #[test]
    fn ldos_periodic_at_twice_fsr() {
        let s = structure(0.73, 0.41);
        for k in 0..25 {
            let om = s.omega_c + (0.083 * k as f64 - 1.0) * s.fsr();
            let a = ldos_guided(&s, om).unwrap();
            let b = ldos_guided(&s, om + 2.0 * s.fsr()).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
    }

    #[test]
    fn pole_is_reported() {
        let s = structure(1.0, 1.0);
        match ldos_guided(&s, s.omega_c) {
            Err(Error::Pole { family: None, .. }) => {}
            other => panic!("expected pole error, got {other:?}"),
        }
    }

    #[test]
    fn radiation_ldos_empty_sum() {
        let s = structure(0.5, 0.5);
        let mut s = s;
        s.gamma_rm = 0.05;
        assert_relative_eq!(ldos_radiation(&s, s.omega_c).unwrap(), 0.05);
        assert_relative_eq!(radiation_rate(&s, s.omega_c + 0.3 * s.fsr()).unwrap(), 0.05);
    }

    #[test]
    fn radiation_ldos_mirrorless_family_adds_bare_rate() {
        let mut s = structure(0.5, 0.5);
        s.gamma_rm = 0.05;
        s.extra_families.push(ModeFamily {
            gamma0: 0.1,
            r1: 0.0,
            r2: 0.0,
            n_eff: 3.1,
        });
        assert_relative_eq!(
            ldos_radiation(&s, s.omega_c + 0.21 * s.fsr()).unwrap(),
            0.15,
            epsilon = 1e-14
        );
    }

    #[test]
    fn radiation_ldos_family_on_resonance() {
        let mut s = structure(0.0, 0.0);
        s.gamma_rm = 0.0;
        s.extra_families.push(ModeFamily {
            gamma0: 0.1,
            r1: 0.2,
            r2: 0.2,
            n_eff: 2.5,
        });
        // family resonance pinned at omega_c as well
        assert_relative_eq!(
            ldos_radiation(&s, s.omega_c).unwrap(),
            0.1 * 1.44 / 0.96,
            epsilon = 1e-12
        );
    }

    #[test]
    fn limit_values_closed_forms() {
        let s = structure(0.5, 0.5);
        let (g_max, kappa_max) = limit_values(&s);
        assert_relative_eq!(g_max, (0.3 * HBAR_C_UEV_UM / 5.0).sqrt(), epsilon = 1e-12);
        assert_relative_eq!(g_max, 108.81, max_relative = 1e-3);
        assert_relative_eq!(kappa_max, 157_861.6, max_relative = 1e-4);

        let mut s4 = s.clone();
        s4.length_um = 4.0;
        let (g4, k4) = limit_values(&s4);
        assert_relative_eq!(g4, 54.405, max_relative = 1e-3);
        assert_relative_eq!(k4, 39_465.4, max_relative = 1e-4);
    }

    #[test]
    fn limit_values_vanish_for_long_cavities() {
        let mut s = structure(0.5, 0.5);
        s.length_um = 1e9;
        let (g_max, kappa_max) = limit_values(&s);
        assert!(g_max < 1e-2);
        assert!(kappa_max < 1e-2);
    }

    #[test]
    fn back_mirror_renormalization() {
        let mut s = structure(1.0, 0.0);
        // Γ_B⁰ = 1.1 μeV, Γ_R chosen so β = 0.9493 (β* = 0.974)
        s.gamma_b0 = 1.1;
        s.gamma_rm = 1.1 * (1.0 - 0.949_317_738) / 0.949_317_738;
        let rr = back_mirror_renormalize(&s).unwrap();
        assert_relative_eq!(rr.gamma_b0_star, 2.2, epsilon = 1e-12);
        assert_relative_eq!(rr.beta_star, 0.974, epsilon = 1e-6);
        // r2 = 0 short-circuits the symmetric decomposition to κ = κ_max
        let (_, kappa_max) = limit_values(&s);
        assert_relative_eq!(rr.kappa_star, kappa_max / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn back_mirror_requires_perfect_mirror() {
        let s = structure(0.9, 0.0);
        assert!(back_mirror_renormalize(&s).is_err());
    }

    #[test]
    fn beta_one_maps_to_beta_star_one() {
        let mut s = structure(1.0, 0.3);
        s.gamma_rm = 0.0;
        let rr = back_mirror_renormalize(&s).unwrap();
        assert_relative_eq!(rr.beta_star, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn filter_no_mirrors_is_unity() {
        let s = structure(0.0, 0.0);
        let g = filter_function(&s, s.omega_c + 0.37 * s.fsr()).unwrap();
        assert_relative_eq!(g.re, 1.0, epsilon = 1e-12);
        assert!(g.im.abs() < 1e-12);
    }

    #[test]
    fn filter_back_mirror_on_resonance() {
        let s = structure(1.0, 0.0);
        let g = filter_function(&s, s.omega_c).unwrap();
        assert_relative_eq!(g.re, 2.0, epsilon = 1e-12);
        assert!(g.im.abs() < 1e-12);
    }

    #[test]
    fn filter_peak_scales_with_denominator() {
        let mut s = structure(1.0, 0.99);
        s.mirror2 = MirrorSpec::lossless(0.99).unwrap();
        let g = filter_function(&s, s.omega_c).unwrap();
        let expected = 4.0 * (1.0 - 0.99f64 * 0.99) / (1.0 - 0.99f64).powi(2);
        assert_relative_eq!(g.norm_sqr(), expected, max_relative = 1e-12);
    }

    #[test]
    fn fsr_average_equals_bare_rate() {
        // High-order quadrature of the LDOS over [ω_c, ω_c + FSR].
        for (r1, r2) in [(0.2, 0.2), (0.7, 0.3), (0.95, 0.95), (0.99, 0.5)] {
            let s = structure(r1, r2);
            let mean = fsr_window_mean(&s);
            assert_relative_eq!(mean, s.gamma_b0, max_relative = 1e-9);
        }
    }

    /// Composite Gauss-Legendre (5-point) average of the guided LDOS over one
    /// resonance-anchored FSR window.
    pub(super) fn fsr_window_mean(s: &WaveguideCavity) -> f64 {
        let (nodes, weights) = gauss5();
        let panels = 2000;
        let fsr = s.fsr();
        let h = fsr / panels as f64;
        let mut acc = 0.0;
        for p in 0..panels {
            let a = s.omega_c + p as f64 * h;
            for (x, w) in nodes.iter().zip(weights.iter()) {
                let om = a + 0.5 * h * (x + 1.0);
                acc += w * 0.5 * h * ldos_guided(s, om).unwrap();
            }
        }
        acc / fsr
    }

    fn gauss5() -> ([f64; 5], [f64; 5]) {
        (
            [
                -0.906_179_845_938_664,
                -0.538_469_310_105_683,
                0.0,
                0.538_469_310_105_683,
                0.906_179_845_938_664,
            ],
            [
                0.236_926_885_056_189,
                0.478_628_670_499_366,
                0.568_888_888_888_889,
                0.478_628_670_499_366,
                0.236_926_885_056_189,
            ],
        )
    }
}
