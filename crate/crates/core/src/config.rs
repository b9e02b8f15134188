//! Flat key-value run configuration with unit-suffixed keys, plus the named
//! presets used by the sweep commands.
//!
//! Example file:
//!
//! ```text
//! # structure
//! L_um        = 1.0
//! n_eff       = 2.5
//! gammaB0_ueV = 0.3
//! gammaRM_ueV = 0.0
//! r1          = 0.2
//! r2          = 0.2
//! lambda_X_nm = 950
//! # phonons
//! alpha_ps2   = 0.0293975389
//! nu_c_per_ps = 2.2
//! T_K         = 4.2
//! gamma_ueV   = 0.0
//! n_max       = 2
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use crate::constants::HBAR_C_UEV_UM;
use crate::error::{Error, Result};
use crate::phonon::PhononEnvironment;
use crate::photonic::{MirrorSpec, ModeFamily, WaveguideCavity};

/// Exciton-phonon coupling (ps²) calibrated so that B⁴ = 0.826 at
/// ν_c = 2.2 ps⁻¹ and T = 4.2 K.
pub const ALPHA_CALIBRATED_PS2: f64 = 0.029_397_538_9;

/// Target renormalized β-factor of the reference source configuration.
pub const BETA_STAR_REFERENCE: f64 = 0.974;

/// Full run configuration: structure, phonon bath, truncation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub structure: WaveguideCavity,
    pub phonons: PhononEnvironment,
    pub n_max: usize,
}

impl RunConfig {
    /// Parses a flat key-value configuration text.
    pub fn parse(text: &str) -> Result<Self> {
        let mut map: BTreeMap<String, f64> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = if let Some((k, v)) = line.split_once('=') {
                (k.trim(), v.trim())
            } else {
                let mut it = line.split_whitespace();
                match (it.next(), it.next()) {
                    (Some(k), Some(v)) => (k, v),
                    _ => {
                        return Err(Error::Config(format!(
                            "line {}: expected `key = value`, got {raw:?}",
                            lineno + 1
                        )))
                    }
                }
            };
            let parsed: f64 = value.parse().map_err(|_| {
                Error::Config(format!("line {}: bad number {value:?}", lineno + 1))
            })?;
            if map.insert(key.to_string(), parsed).is_some() {
                return Err(Error::Config(format!("duplicate key {key:?}")));
            }
        }
        Self::from_map(map)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn from_map(mut map: BTreeMap<String, f64>) -> Result<Self> {
        let mut take = |k: &str| map.remove(k);
        let require = |v: Option<f64>, k: &str| {
            v.ok_or_else(|| Error::Config(format!("missing required key {k:?}")))
        };
        let length_um = require(take("L_um"), "L_um")?;
        let n_eff = require(take("n_eff"), "n_eff")?;
        let gamma_b0 = require(take("gammaB0_ueV"), "gammaB0_ueV")?;
        let gamma_rm = take("gammaRM_ueV").unwrap_or(0.0);
        let r1 = require(take("r1"), "r1")?;
        let r2 = require(take("r2"), "r2")?;
        let phi1 = take("phi0_1_rad").unwrap_or(0.0);
        let phi2 = take("phi0_2_rad").unwrap_or(0.0);
        let omega_c = match (take("omega_c_ueV"), take("lambda_X_nm")) {
            (Some(om), _) => om,
            (None, Some(nm)) => 2.0 * std::f64::consts::PI * HBAR_C_UEV_UM / (nm * 1e-3),
            (None, None) => {
                return Err(Error::Config(
                    "one of omega_c_ueV or lambda_X_nm is required".into(),
                ))
            }
        };

        let mut extra_families = Vec::new();
        for idx in 1..=8 {
            let g0 = take(&format!("family{idx}_gamma0_ueV"));
            if let Some(gamma0) = g0 {
                let fam = ModeFamily {
                    gamma0,
                    r1: require(take(&format!("family{idx}_r1")), "family r1")?,
                    r2: require(take(&format!("family{idx}_r2")), "family r2")?,
                    n_eff: require(take(&format!("family{idx}_n_eff")), "family n_eff")?,
                };
                extra_families.push(fam);
            }
        }

        let phonons = PhononEnvironment::new(
            take("alpha_ps2").unwrap_or(0.0),
            take("nu_c_per_ps").unwrap_or(2.2),
            take("T_K").unwrap_or(0.0),
            take("gamma_ueV").unwrap_or(0.0),
        )?;
        let n_max = take("n_max").unwrap_or(2.0) as usize;

        if let Some(k) = map.keys().next() {
            return Err(Error::Config(format!("unknown key {k:?}")));
        }

        let structure = WaveguideCavity {
            length_um,
            n_eff,
            gamma_b0,
            gamma_rm,
            mirror1: MirrorSpec::new(r1, phi1)?,
            mirror2: MirrorSpec::new(r2, phi2)?,
            extra_families,
            omega_c,
        };
        structure.validate()?;
        Ok(RunConfig {
            structure,
            phonons,
            n_max,
        })
    }

    /// Named presets backing the sweep commands.
    pub fn preset(name: &str) -> Result<Self> {
        let lambda_um = 0.950;
        let base = |length_um: f64, gamma_b0: f64, r: f64| -> Result<WaveguideCavity> {
            Ok(WaveguideCavity {
                length_um,
                n_eff: 2.5,
                gamma_b0,
                gamma_rm: 0.0,
                mirror1: MirrorSpec::lossless(r)?,
                mirror2: MirrorSpec::lossless(r)?,
                extra_families: vec![],
                omega_c: 2.0 * std::f64::consts::PI * HBAR_C_UEV_UM / lambda_um,
            })
        };
        match name {
            "fig1b" | "fig1c" | "fig1d" => {
                let r = match name {
                    "fig1b" => 0.0,
                    "fig1c" => 0.2,
                    _ => 0.9,
                };
                Ok(RunConfig {
                    structure: base(1.0, 0.3, r)?,
                    phonons: PhononEnvironment::decoupled(),
                    n_max: 2,
                })
            }
            "fig2" => Ok(RunConfig {
                structure: base(1.0, 0.3, 0.0)?,
                phonons: PhononEnvironment::decoupled(),
                n_max: 2,
            }),
            "fig3-short" | "fig3-long" => {
                let length = if name == "fig3-short" {
                    0.5 * lambda_um / 2.5
                } else {
                    15.0 * lambda_um / 2.5
                };
                let gamma_b0 = 1.1;
                let beta = BETA_STAR_REFERENCE / (2.0 - BETA_STAR_REFERENCE);
                let gamma_rm = gamma_b0 * (1.0 - beta) / beta;
                let mut structure = base(length, gamma_b0, 0.0)?;
                structure.gamma_rm = gamma_rm;
                structure.mirror1 = MirrorSpec::lossless(1.0)?;
                Ok(RunConfig {
                    structure,
                    phonons: PhononEnvironment::new(ALPHA_CALIBRATED_PS2, 2.2, 4.2, 0.0)?,
                    n_max: 2,
                })
            }
            other => Err(Error::Config(format!(
                "unknown preset {other:?} (expected fig1b|fig1c|fig1d|fig2|fig3-short|fig3-long)"
            ))),
        }
    }

    /// Key-value echo for CSV metadata headers.
    pub fn echo(&self) -> Vec<(String, String)> {
        let s = &self.structure;
        let p = &self.phonons;
        let mut out = vec![
            ("L_um".into(), format!("{}", s.length_um)),
            ("n_eff".into(), format!("{}", s.n_eff)),
            ("gammaB0_ueV".into(), format!("{}", s.gamma_b0)),
            ("gammaRM_ueV".into(), format!("{}", s.gamma_rm)),
            ("r1".into(), format!("{}", s.mirror1.r)),
            ("r2".into(), format!("{}", s.mirror2.r)),
            ("omega_c_ueV".into(), format!("{}", s.omega_c)),
            ("alpha_ps2".into(), format!("{}", p.alpha_ps2)),
            ("nu_c_per_ps".into(), format!("{}", p.nu_c)),
            ("T_K".into(), format!("{}", p.temperature_k)),
            ("gamma_ueV".into(), format!("{}", p.gamma_pd_uev)),
            ("n_max".into(), format!("{}", self.n_max)),
        ];
        for (i, f) in s.extra_families.iter().enumerate() {
            let n = i + 1;
            out.push((format!("family{n}_gamma0_ueV"), format!("{}", f.gamma0)));
            out.push((format!("family{n}_r1"), format!("{}", f.r1)));
            out.push((format!("family{n}_r2"), format!("{}", f.r2)));
            out.push((format!("family{n}_n_eff"), format!("{}", f.n_eff)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn parses_key_value_text() {
        let cfg = RunConfig::parse(
            "# comment\n\
             L_um = 1.0\n\
             n_eff = 2.5\n\
             gammaB0_ueV = 0.3\n\
             r1 0.2\n\
             r2 = 0.2  # inline comment\n\
             lambda_X_nm = 950\n\
             alpha_ps2 = 0.03\n\
             T_K = 4.2\n",
        )
        .unwrap();
        assert_relative_eq!(cfg.structure.length_um, 1.0);
        assert_relative_eq!(cfg.structure.mirror1.r, 0.2);
        assert_relative_eq!(cfg.phonons.alpha_ps2, 0.03);
        assert_eq!(cfg.n_max, 2);
        assert_relative_eq!(
            cfg.structure.omega_c,
            2.0 * std::f64::consts::PI * HBAR_C_UEV_UM / 0.95
        );
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        assert!(RunConfig::parse("L_um = 1\nL_um = 2\n").is_err());
        let text = "L_um=1\nn_eff=2.5\ngammaB0_ueV=0.3\nr1=0\nr2=0\nlambda_X_nm=950\nbogus=1\n";
        match RunConfig::parse(text) {
            Err(Error::Config(msg)) => assert!(msg.contains("bogus")),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn requires_resonance_energy() {
        let text = "L_um=1\nn_eff=2.5\ngammaB0_ueV=0.3\nr1=0\nr2=0\n";
        assert!(RunConfig::parse(text).is_err());
    }

    #[test]
    fn parses_mode_families() {
        let text = "L_um=1\nn_eff=2.5\ngammaB0_ueV=0.3\nr1=0\nr2=0\nlambda_X_nm=950\n\
                    family1_gamma0_ueV=0.1\nfamily1_r1=0.2\nfamily1_r2=0.2\nfamily1_n_eff=3.0\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.structure.extra_families.len(), 1);
        assert_relative_eq!(cfg.structure.extra_families[0].n_eff, 3.0);
    }

    #[test]
    fn fig3_presets_hit_beta_star() {
        for name in ["fig3-short", "fig3-long"] {
            let cfg = RunConfig::preset(name).unwrap();
            let s = &cfg.structure;
            let beta = s.gamma_b0 / (s.gamma_b0 + s.gamma_rm);
            let beta_star = 2.0 * beta / (beta + 1.0);
            assert_relative_eq!(beta_star, 0.974, epsilon = 1e-12);
            assert_relative_eq!(s.mirror1.r, 1.0);
        }
        let short = RunConfig::preset("fig3-short").unwrap();
        let long = RunConfig::preset("fig3-long").unwrap();
        assert_relative_eq!(short.structure.length_um, 0.19, epsilon = 1e-12);
        assert_relative_eq!(long.structure.length_um, 5.7, epsilon = 1e-12);
    }

    #[test]
    fn unknown_preset_is_config_error() {
        assert!(matches!(
            RunConfig::preset("fig9"),
            Err(Error::Config(_))
        ));
    }
}
