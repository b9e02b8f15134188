//! Parameter sweeps and plot-ready CSV emission.
//!
//! Sweep points are evaluated independently (optionally in parallel) and the
//! rows are always written in grid order with fixed float formatting, so a
//! given configuration produces byte-identical output at any worker count.

use std::io::Write;

use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::phonon::franck_condon;
use crate::photonic::{decompose_ldos, ldos_guided, limit_values, MirrorSpec};
use crate::pipeline::{evaluate_fom_point, FomMethod, FomRecord};

/// Which structure parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// Symmetric mirror reflectivity r ∈ [0, 1).
    Reflectivity,
    /// Front-mirror power transmittivity T = t₂² ∈ (0, 1].
    Transmittivity,
    /// Cavity length, μm.
    Length,
}

impl SweepParameter {
    fn domain_check(&self, v: f64) -> Result<()> {
        let ok = match self {
            SweepParameter::Reflectivity => (0.0..1.0).contains(&v),
            SweepParameter::Transmittivity => v > 0.0 && v <= 1.0,
            SweepParameter::Length => v > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "sweep value {v} outside the domain of {self:?}"
            )))
        }
    }
}

/// A parameter sweep: grid, base configuration, method, parallelism.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub grid: Vec<f64>,
    pub config: RunConfig,
    pub method: FomMethod,
    pub workers: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::Config("sweep grid is empty".into()));
        }
        for w in self.grid.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Config("sweep grid must be strictly increasing".into()));
            }
        }
        for &v in &self.grid {
            self.parameter.domain_check(v)?;
        }
        Ok(())
    }

    /// Applies one grid value to the base configuration.
    fn configure_point(&self, value: f64) -> Result<RunConfig> {
        let mut cfg = self.config.clone();
        match self.parameter {
            SweepParameter::Reflectivity => {
                cfg.structure.mirror2 = MirrorSpec::lossless(value)?;
            }
            SweepParameter::Transmittivity => {
                cfg.structure.mirror2 = MirrorSpec::lossless((1.0 - value).max(0.0).sqrt())?;
            }
            SweepParameter::Length => {
                cfg.structure.length_um = value;
            }
        }
        Ok(cfg)
    }
}

/// 60 logarithmic points over T ∈ [1e-3, 1], the default source sweep grid.
pub fn default_transmittivity_grid(points: usize) -> Vec<f64> {
    let n = points.max(2);
    (0..n)
        .map(|i| 10f64.powf(-3.0 + 3.0 * i as f64 / (n - 1) as f64))
        .collect()
}

/// Uniform reflectivity grid [0, r_max], the cavity-parameter sweep default.
pub fn default_reflectivity_grid(points: usize, r_max: f64) -> Vec<f64> {
    let n = points.max(2);
    (0..n).map(|i| r_max * i as f64 / (n - 1) as f64).collect()
}

fn write_metadata<W: Write>(w: &mut W, config: &RunConfig, extra: &[(String, String)]) -> Result<()> {
    writeln!(w, "# cwqed {}", env!("CARGO_PKG_VERSION"))?;
    for (k, v) in config.echo() {
        writeln!(w, "# {k} = {v}")?;
    }
    for (k, v) in extra {
        writeln!(w, "# {k} = {v}")?;
    }
    Ok(())
}

/// Guided-LDOS scan over a frequency range.
pub struct LdosScan {
    pub omega_uev: Vec<f64>,
    pub ldos_uev: Vec<f64>,
}

/// Samples the guided LDOS over `[omega_lo, omega_hi]` (absolute μeV).
pub fn run_ldos_scan(config: &RunConfig, omega_lo: f64, omega_hi: f64, points: usize) -> Result<LdosScan> {
    if !(omega_hi > omega_lo) || points < 2 {
        return Err(Error::Config("LDOS scan needs omega_hi > omega_lo and >= 2 points".into()));
    }
    let mut omega_uev = Vec::with_capacity(points);
    let mut ldos_uev = Vec::with_capacity(points);
    for i in 0..points {
        let om = omega_lo + (omega_hi - omega_lo) * i as f64 / (points - 1) as f64;
        omega_uev.push(om);
        ldos_uev.push(ldos_guided(&config.structure, om)?);
    }
    Ok(LdosScan { omega_uev, ldos_uev })
}

/// Writes an LDOS scan as CSV. With `fsr_units` the frequency column holds
/// (ω − ω_c)/FSR instead of absolute μeV.
pub fn write_ldos_csv<W: Write>(
    w: &mut W,
    config: &RunConfig,
    scan: &LdosScan,
    fsr_units: bool,
) -> Result<()> {
    let fsr = config.structure.fsr();
    write_metadata(
        w,
        config,
        &[("fsr_ueV".to_string(), format!("{fsr:.10e}"))],
    )?;
    if fsr_units {
        writeln!(w, "omega_fsr,ldos_ueV")?;
    } else {
        writeln!(w, "omega_ueV,ldos_ueV")?;
    }
    for (om, l) in scan.omega_uev.iter().zip(&scan.ldos_uev) {
        let x = if fsr_units {
            (om - config.structure.omega_c) / fsr
        } else {
            *om
        };
        writeln!(w, "{:.10e},{:.10e}", x, l)?;
    }
    Ok(())
}

/// One row of a cavity-parameter sweep.
#[derive(Debug, Clone, Copy)]
pub struct ParamsRecord {
    pub length_um: f64,
    pub r: f64,
    pub gamma_b: f64,
    pub l_c: f64,
    pub kappa: f64,
    pub g: f64,
    pub g_max: f64,
    pub kappa_max: f64,
    pub fit_residual: f64,
}

/// Decomposes the symmetric-cavity LDOS across a reflectivity grid for each
/// listed cavity length.
pub fn run_params_sweep(
    config: &RunConfig,
    lengths_um: &[f64],
    r_grid: &[f64],
) -> Result<Vec<ParamsRecord>> {
    if r_grid.is_empty() || lengths_um.is_empty() {
        return Err(Error::Config("params sweep needs a nonempty grid".into()));
    }
    let mut rows = Vec::with_capacity(lengths_um.len() * r_grid.len());
    for &length in lengths_um {
        for &r in r_grid {
            let mut s = config.structure.with_symmetric_mirrors(r)?;
            s.length_um = length;
            let p = decompose_ldos(&s).map_err(|e| {
                Error::FitFailure(format!("at L = {length} μm, r = {r}: {e}"))
            })?;
            let (g_max, kappa_max) = limit_values(&s);
            rows.push(ParamsRecord {
                length_um: length,
                r,
                gamma_b: p.gamma_b,
                l_c: p.l_c,
                kappa: p.kappa,
                g: p.g,
                g_max,
                kappa_max,
                fit_residual: p.fit_residual,
            });
        }
    }
    Ok(rows)
}

pub fn write_params_csv<W: Write>(
    w: &mut W,
    config: &RunConfig,
    rows: &[ParamsRecord],
) -> Result<()> {
    write_metadata(w, config, &[])?;
    writeln!(
        w,
        "L_um,r,gammaB_ueV,Lc_ueV,kappa_ueV,g_ueV,g_max_ueV,kappa_max_ueV,fit_residual"
    )?;
    for p in rows {
        writeln!(
            w,
            "{},{:.6},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e}",
            p.length_um, p.r, p.gamma_b, p.l_c, p.kappa, p.g, p.g_max, p.kappa_max, p.fit_residual
        )?;
    }
    Ok(())
}

/// Outcome of one figure-of-merit sweep point.
#[derive(Debug, Clone)]
pub enum PointOutcome {
    Ok(FomRecord),
    Failed { value: f64, error: String },
}

/// Runs the full source pipeline across the sweep grid. Failures are
/// recorded per point and do not stop the sweep.
pub fn run_fom_sweep(spec: &SweepSpec) -> Result<Vec<PointOutcome>> {
    spec.validate()?;
    let evaluate = |&value: &f64| -> PointOutcome {
        let point = match spec.configure_point(value) {
            Ok(p) => p,
            Err(e) => {
                return PointOutcome::Failed {
                    value,
                    error: e.to_string(),
                }
            }
        };
        match evaluate_fom_point(&point.structure, &point.phonons, point.n_max, spec.method) {
            Ok(rec) => PointOutcome::Ok(rec),
            Err(e) => PointOutcome::Failed {
                value,
                error: e.to_string(),
            },
        }
    };
    let outcomes: Vec<PointOutcome> = if spec.workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(spec.workers)
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
        pool.install(|| spec.grid.par_iter().map(evaluate).collect())
    } else {
        spec.grid.iter().map(evaluate).collect()
    };
    Ok(outcomes)
}

/// Writes a figure-of-merit sweep as CSV; failed points appear as comment
/// lines. Returns the number of failed points.
pub fn write_fom_csv<W: Write>(
    w: &mut W,
    config: &RunConfig,
    outcomes: &[PointOutcome],
) -> Result<usize> {
    write_metadata(w, config, &[])?;
    writeln!(
        w,
        "r2,T,g_ueV,kappa_ueV,I_numeric,I_analytic,E_numeric,E_analytic,F,P_B,P_R"
    )?;
    let mut failures = 0;
    for outcome in outcomes {
        match outcome {
            PointOutcome::Ok(p) => {
                writeln!(
                    w,
                    "{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e}",
                    p.r2,
                    p.transmittivity,
                    p.g,
                    p.kappa,
                    p.i_numeric,
                    p.i_analytic,
                    p.e_numeric,
                    p.e_analytic,
                    p.filter_fraction,
                    p.p_b,
                    p.p_r
                )?;
            }
            PointOutcome::Failed { value, error } => {
                failures += 1;
                writeln!(w, "# FAILED point {value}: {error}")?;
            }
        }
    }
    Ok(failures)
}

/// Checks that B⁴ of a configuration's phonon bath reproduces a target value
/// (used by the calibrated presets).
pub fn franck_condon_fourth_power(config: &RunConfig) -> Result<f64> {
    let b = franck_condon(&config.phonons)?;
    Ok(b.powi(4))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_config() -> RunConfig {
        RunConfig::preset("fig2").unwrap()
    }

    #[test]
    fn grids_are_valid() {
        let t = default_transmittivity_grid(60);
        assert_eq!(t.len(), 60);
        assert!((t[0] - 1e-3).abs() < 1e-12);
        assert!((t[59] - 1.0).abs() < 1e-12);
        assert!(t.windows(2).all(|w| w[1] > w[0]));
        let r = default_reflectivity_grid(100, 0.99);
        assert_eq!(r.len(), 100);
        assert_eq!(r[0], 0.0);
    }

    #[test]
    fn sweep_spec_validation() {
        let cfg = base_config();
        let mut spec = SweepSpec {
            parameter: SweepParameter::Transmittivity,
            grid: vec![],
            config: cfg,
            method: FomMethod::Analytic,
            workers: 1,
        };
        assert!(spec.validate().is_err());
        spec.grid = vec![0.5, 0.2];
        assert!(spec.validate().is_err());
        spec.grid = vec![0.2, 0.5, 1.0];
        assert!(spec.validate().is_ok());
        spec.grid = vec![0.0, 0.5];
        assert!(spec.validate().is_err());
    }

    #[test]
    fn ldos_scan_flat_for_mirrorless() {
        let cfg = RunConfig::preset("fig1b").unwrap();
        let om_c = cfg.structure.omega_c;
        let fsr = cfg.structure.fsr();
        let scan = run_ldos_scan(&cfg, om_c - fsr, om_c + fsr, 101).unwrap();
        for l in &scan.ldos_uev {
            assert!((l - 0.3).abs() < 1e-12);
        }
        let mut out = Vec::new();
        write_ldos_csv(&mut out, &cfg, &scan, false).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("omega_ueV,ldos_ueV"));
        assert!(text.contains("# r1 = 0"));
    }

    #[test]
    fn params_sweep_rows() {
        let cfg = base_config();
        let rows = run_params_sweep(&cfg, &[1.0, 4.0], &[0.0, 0.5, 0.9]).unwrap();
        assert_eq!(rows.len(), 6);
        assert!(rows[0].g <= rows[1].g && rows[1].g <= rows[2].g);
        let mut out = Vec::new();
        write_params_csv(&mut out, &cfg, &rows).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.lines().filter(|l| !l.starts_with('#')).count() == 7);
    }

    #[test]
    fn fom_sweep_deterministic_output() {
        let cfg = RunConfig::preset("fig3-short").unwrap();
        let grid = vec![0.5, 1.0];
        let run = |workers: usize| -> Vec<u8> {
            let spec = SweepSpec {
                parameter: SweepParameter::Transmittivity,
                grid: grid.clone(),
                config: cfg.clone(),
                method: FomMethod::Analytic,
                workers,
            };
            let outcomes = run_fom_sweep(&spec).unwrap();
            let mut out = Vec::new();
            write_fom_csv(&mut out, &cfg, &outcomes).unwrap();
            out
        };
        assert_eq!(run(1), run(2));
    }
}
