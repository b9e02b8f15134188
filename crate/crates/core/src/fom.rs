//! Single-photon source figures of merit.
//!
//! Indistinguishability and efficiency are computed two ways: numerically
//! from the two-colour spectrum,
//!
//! ```text
//! I = [2P_B/Γ_B⁰]⁻² ∬ dω dω′ |G*(ω) G(ω′) S₀(ω,ω′)|²,
//! E = P_B / (P_B + P_R),
//! ```
//!
//! and analytically in the weak-coupling regime,
//!
//! ```text
//! I = Γ_tot/(Γ_tot + 2γ_tot) · [(Γ_B+Γ_cav)B² / ((Γ_B+Γ_cav)B² + 2Γ_B⁰F(1−B²))]²,
//! E = [(Γ_cav+Γ_B)B² + 2Γ_B⁰F(1−B²)] / [(Γ_cav+Γ_B)B² + 2Γ_B⁰F(1−B²) + Γ_R],
//! ```
//!
//! with `Γ_tot = Γ_cav + Γ_B + Γ_R`, the resonant Purcell rate
//! `Γ_cav = 4g²/κ`, and `F` the fraction of the phonon sideband passed by
//! the cavity filter.

use crate::error::{Error, Result};
use crate::photonic::{filter_function, WaveguideCavity};
use crate::spectra::{power_guided, Part, TwoColourSpectrum};

/// Which route produced a figure of merit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Numeric,
    Analytic,
}

/// Bundle of figures of merit for one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureOfMerit {
    pub indistinguishability: f64,
    pub efficiency: f64,
    /// Guided and radiated emission powers (spectrum-normalization units).
    pub p_b: f64,
    pub p_r: f64,
    /// PSB fraction surviving the cavity filter.
    pub filter_fraction: f64,
    pub method: Method,
}

/// Rates entering the analytic weak-coupling formulas, all in μeV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticRates {
    /// Waveguide background Γ_B.
    pub gamma_b: f64,
    /// Purcell rate Γ_cav = 4g²/κ.
    pub gamma_cav: f64,
    /// Radiation-reservoir rate Γ_R.
    pub gamma_r: f64,
    /// Bare mirrorless guided rate Γ_B⁰.
    pub gamma_b0: f64,
}

/// Resonant weak-coupling Purcell rate Γ_cav = 4g²/κ, μeV.
pub fn purcell_rate(g_uev: f64, kappa_uev: f64) -> Result<f64> {
    if kappa_uev <= 0.0 {
        return Err(Error::Degenerate("Purcell rate requires kappa > 0".into()));
    }
    Ok(4.0 * g_uev * g_uev / kappa_uev)
}

/// Numeric indistinguishability from the two-colour spectrum and the cavity
/// filter of `structure`.
pub fn indistinguishability_numeric(
    s: &TwoColourSpectrum,
    structure: &WaveguideCavity,
) -> Result<f64> {
    let flat_filter = structure.mirror1.r == 0.0 && structure.mirror2.r == 0.0;
    if flat_filter {
        // |G|² is exactly constant; the filter drops out of the ratio and
        // both integrals are exact time-domain overlaps.
        let num = s.overlap_integral_flat(Part::Total);
        let den = s.norm_total;
        if den <= 0.0 {
            return Err(Error::Degenerate("no emission into the guided modes".into()));
        }
        return Ok((num / (den * den)).max(0.0));
    }
    let p_b = power_guided(s, structure)?;
    if p_b <= 0.0 {
        return Err(Error::Degenerate("no emission into the guided modes".into()));
    }
    let mut pole: Option<Error> = None;
    let num = s.overlap_integral(|om| match filter_function(structure, om) {
        Ok(g) => g.norm_sqr(),
        Err(e) => {
            pole.get_or_insert(e);
            0.0
        }
    })?;
    if let Some(e) = pole {
        return Err(e);
    }
    let prefactor = 2.0 * p_b / structure.gamma_b0;
    Ok((num / (prefactor * prefactor)).max(0.0))
}

/// Numeric efficiency from the emitted powers.
pub fn efficiency_numeric(p_b: f64, p_r: f64) -> Result<f64> {
    if p_b + p_r <= 0.0 {
        return Err(Error::Degenerate("total emitted power is zero".into()));
    }
    Ok((p_b / (p_b + p_r)).clamp(0.0, 1.0))
}

/// Fraction of the phonon sideband passed by the cavity filter,
/// F = [∫dω S_PSB(ω,ω)]⁻¹ (1/4) ∫dω |G(ω)|² S_PSB(ω,ω).
///
/// Defined as 0 when the sideband carries no weight (decoupled bath).
pub fn psb_filter_fraction(s: &TwoColourSpectrum, structure: &WaveguideCavity) -> Result<f64> {
    let psb_norm = s.diag_integral(Part::Psb, |_| 1.0);
    if psb_norm <= 1e-12 * s.norm_total.abs().max(1e-300) {
        return Ok(0.0);
    }
    let mut pole: Option<Error> = None;
    let weighted = s.diag_integral(Part::Psb, |om| match filter_function(structure, om) {
        Ok(g) => g.norm_sqr(),
        Err(e) => {
            pole.get_or_insert(e);
            0.0
        }
    });
    if let Some(e) = pole {
        return Err(e);
    }
    Ok((0.25 * weighted / psb_norm).max(0.0))
}

/// Analytic weak-coupling indistinguishability.
pub fn indistinguishability_analytic(
    rates: &AnalyticRates,
    b: f64,
    filter_fraction: f64,
    gamma_tot: f64,
) -> Result<f64> {
    let gamma_total = rates.gamma_cav + rates.gamma_b + rates.gamma_r;
    if gamma_total <= 0.0 {
        return Err(Error::Degenerate("no decay channels".into()));
    }
    let b2 = b * b;
    let zpl = (rates.gamma_b + rates.gamma_cav) * b2;
    let psb = 2.0 * rates.gamma_b0 * filter_fraction * (1.0 - b2);
    if zpl + psb <= 0.0 {
        return Err(Error::Degenerate("no guided emission".into()));
    }
    let dephasing_factor = gamma_total / (gamma_total + 2.0 * gamma_tot);
    let branching = zpl / (zpl + psb);
    Ok(dephasing_factor * branching * branching)
}

/// Analytic weak-coupling efficiency; reduces to Γ_B⁰*/(Γ_B⁰* + Γ_R) when
/// the front mirror vanishes.
pub fn efficiency_analytic(rates: &AnalyticRates, b: f64, filter_fraction: f64) -> Result<f64> {
    let b2 = b * b;
    let guided =
        (rates.gamma_cav + rates.gamma_b) * b2 + 2.0 * rates.gamma_b0 * filter_fraction * (1.0 - b2);
    let total = guided + rates.gamma_r;
    if total <= 0.0 {
        return Err(Error::Degenerate("no decay channels".into()));
    }
    Ok((guided / total).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn purcell_values() {
        assert_eq!(purcell_rate(0.0, 100.0).unwrap(), 0.0);
        assert_relative_eq!(purcell_rate(50.0, 200.0).unwrap(), 50.0);
        assert!(purcell_rate(50.0, 1e13).unwrap() < 1e-8);
        assert!(purcell_rate(50.0, 0.0).is_err());
    }

    #[test]
    fn analytic_unit_limits() {
        let rates = AnalyticRates {
            gamma_b: 2.2,
            gamma_cav: 0.0,
            gamma_r: 0.1,
            gamma_b0: 1.1,
        };
        // B = 1, γ_tot = 0: perfectly coherent emission
        assert_relative_eq!(
            indistinguishability_analytic(&rates, 1.0, 1.0, 0.0).unwrap(),
            1.0
        );
        // Γ_R = 0: all emission guided
        let lossless = AnalyticRates {
            gamma_r: 0.0,
            ..rates
        };
        assert_relative_eq!(efficiency_analytic(&lossless, 0.95, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn analytic_open_cavity_limits() {
        // Vanishing front mirror: Γ_cav = 0, Γ_B = Γ_B⁰* = 2Γ_B⁰, F = 1.
        let gamma_b0 = 1.1;
        let beta_star = 0.974;
        let gamma_r = 2.0 * gamma_b0 * (1.0 - beta_star) / beta_star;
        let rates = AnalyticRates {
            gamma_b: 2.0 * gamma_b0,
            gamma_cav: 0.0,
            gamma_r,
            gamma_b0,
        };
        let b = 0.826f64.powf(0.25);
        // E -> β*
        assert_relative_eq!(
            efficiency_analytic(&rates, b, 1.0).unwrap(),
            beta_star,
            max_relative = 1e-12
        );
        // I -> B⁴ at γ_tot = 0
        assert_relative_eq!(
            indistinguishability_analytic(&rates, b, 1.0, 0.0).unwrap(),
            0.826,
            max_relative = 1e-12
        );
    }

    #[test]
    fn efficiency_numeric_ratios() {
        assert_relative_eq!(efficiency_numeric(3.0, 0.0).unwrap(), 1.0);
        assert_relative_eq!(efficiency_numeric(2.0, 2.0).unwrap(), 0.5);
        assert!(efficiency_numeric(0.0, 0.0).is_err());
    }

    #[test]
    fn dephasing_degrades_indistinguishability() {
        let rates = AnalyticRates {
            gamma_b: 1.0,
            gamma_cav: 10.0,
            gamma_r: 0.5,
            gamma_b0: 0.5,
        };
        let total = 11.5;
        let gamma = 2.0;
        let expected_first = total / (total + 2.0 * gamma);
        let i = indistinguishability_analytic(&rates, 1.0, 1.0, gamma).unwrap();
        assert_relative_eq!(i, expected_first, max_relative = 1e-12);
    }
}
