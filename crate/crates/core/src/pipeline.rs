//! End-to-end evaluation of a single-photon source operating point.
//!
//! For a structure with a perfect back mirror and a front mirror of
//! reflectivity r₂, one evaluation runs:
//!
//! 1. symmetric-cavity LDOS decomposition at r₂, then back-mirror
//!    renormalization Γ_B → 2Γ_B, g → √2·g, κ → κ/2, Γ_B⁰ → 2Γ_B⁰;
//! 2. phonon quantities B and γ_tot at the renormalized coupling;
//! 3. Lindblad dynamics and the regression correlator on automatically
//!    selected time grids (span 15 measured emitter lifetimes);
//! 4. phonon dressing, two-colour spectrum, powers, figures of merit;
//! 5. the analytic weak-coupling formulas on the same extracted rates.

use crate::constants::HBAR_UEV_PS;
use crate::error::{Error, Result};
use crate::fom::{
    efficiency_analytic, efficiency_numeric, indistinguishability_analytic,
    indistinguishability_numeric, psb_filter_fraction, purcell_rate, AnalyticRates,
};
use crate::phonon::{enhanced_dephasing, franck_condon, PhononEnvironment};
use crate::photonic::{
    decompose_ldos, filter_function, radiation_rate, WaveguideCavity,
};
use crate::quantum::{
    build_generator, dress_with_phonons, propagate, regression_correlator, QuantumState,
    SystemConfig,
};
use crate::spectra::{
    filon_weights, power_guided, power_radiation, trapezoid_weights, two_colour_spectrum, GridSpec,
};

/// Which figures of merit to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FomMethod {
    Numeric,
    Analytic,
    Both,
}

impl FomMethod {
    pub fn wants_numeric(self) -> bool {
        matches!(self, FomMethod::Numeric | FomMethod::Both)
    }
    pub fn wants_analytic(self) -> bool {
        matches!(self, FomMethod::Analytic | FomMethod::Both)
    }
}

/// One evaluated operating point (one sweep CSV row).
#[derive(Debug, Clone, Copy)]
pub struct FomRecord {
    pub r2: f64,
    /// Front-mirror power transmittivity T = t₂² = 1 − r₂².
    pub transmittivity: f64,
    /// Renormalized coupling g* and linewidth κ*, μeV.
    pub g: f64,
    pub kappa: f64,
    pub i_numeric: f64,
    pub i_analytic: f64,
    pub e_numeric: f64,
    pub e_analytic: f64,
    pub filter_fraction: f64,
    pub p_b: f64,
    pub p_r: f64,
}

/// Effective master-equation rates of an operating point after the
/// back-mirror renormalization.
#[derive(Debug, Clone, Copy)]
pub struct EffectiveRates {
    pub gamma_b: f64,
    pub gamma_r: f64,
    pub g: f64,
    pub kappa: f64,
    pub gamma_cav: f64,
    pub b_fc: f64,
    pub gamma_tot: f64,
}

/// Extracts the renormalized rates for a back-mirror structure.
pub fn effective_rates(
    structure: &WaveguideCavity,
    env: &PhononEnvironment,
) -> Result<EffectiveRates> {
    if (structure.mirror1.r - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput(
            "operating-point evaluation requires a perfect back mirror (r1 = 1)".into(),
        ));
    }
    let symmetric = structure.with_symmetric_mirrors(structure.mirror2.r)?;
    let params = decompose_ldos(&symmetric)?;
    let gamma_b = 2.0 * params.gamma_b;
    let g = std::f64::consts::SQRT_2 * params.g;
    let kappa = params.kappa / 2.0;
    let gamma_r = radiation_rate(structure, structure.omega_c)?;
    let b_fc = franck_condon(env)?;
    let gamma_tot = enhanced_dephasing(env, g, kappa, b_fc)?;
    let gamma_cav = purcell_rate(g, kappa)?;
    Ok(EffectiveRates {
        gamma_b,
        gamma_r,
        g,
        kappa,
        gamma_cav,
        b_fc,
        gamma_tot,
    })
}

/// Mean emitter lifetime ∫⟨σ†σ⟩dt / ⟨σ†σ⟩(0) measured by propagation, ps.
fn measure_lifetime(config: &SystemConfig) -> Result<f64> {
    let gen = build_generator(config)?;
    let g_h = config.g * config.b_fc;
    let pop_rate = (config.gamma_b + config.gamma_r)
        .max(0.5 * g_h)
        .max(purcell_rate(g_h.max(1e-12), config.kappa.max(1e-9))?)
        .max(1e-6);
    let dt = 0.1 * HBAR_UEV_PS / pop_rate;
    let stepper = gen.propagator(dt);
    let rho0 = QuantumState::excited_vacuum(config.n_max);
    let mut v = ndarray::Array1::from_iter(rho0.0.iter().cloned());
    let dim = gen.dim();
    let nf = config.n_max + 1;
    let pop_of = |v: &ndarray::Array1<crate::C64>| -> f64 {
        (0..nf).map(|n| v[(nf + n) * dim + (nf + n)].re).sum()
    };
    let mut pop = pop_of(&v);
    let mut integral = 0.0;
    let mut steps = 0usize;
    while pop > 1e-4 && steps < 400_000 {
        let next = stepper.dot(&v);
        let pop_next = pop_of(&next);
        integral += 0.5 * (pop + pop_next) * dt;
        v = next;
        pop = pop_next;
        steps += 1;
        if !pop.is_finite() {
            return Err(Error::Propagation {
                t_ps: steps as f64 * dt,
                message: "population diverged during lifetime probe".into(),
            });
        }
    }
    if steps >= 400_000 {
        return Err(Error::Propagation {
            t_ps: steps as f64 * dt,
            message: "lifetime probe did not reach decay".into(),
        });
    }
    Ok(integral.max(dt))
}

/// Time grids for the correlator band.
struct TimeGrids {
    t_grid: Vec<f64>,
    tau_grid: Vec<f64>,
}

fn build_time_grids(
    rates: &EffectiveRates,
    env: &PhononEnvironment,
    lifetime: f64,
    tau_scale: f64,
) -> TimeGrids {
    let g_h = rates.g * rates.b_fc;
    let pop_width = HBAR_UEV_PS / lifetime;
    let span = 15.0 * lifetime;

    // earlier-time axis: resolve Rabi beats and the decay envelope
    let s_rate = (2.0 * g_h).max(4.0 * pop_width).max(1e-9);
    let mut ds = (std::f64::consts::PI * HBAR_UEV_PS / (3.0 * s_rate)).min(span / 300.0);
    ds = ds.max(span / 6000.0);
    let n_s = (span / ds).ceil() as usize;
    let t_grid: Vec<f64> = (0..=n_s).map(|i| span * i as f64 / n_s as f64).collect();

    // delay axis: fine segment across the sideband memory, coarser segment
    // to full coherence decay
    let coh = 0.5 * (rates.gamma_b + rates.gamma_r) + rates.gamma_tot;
    let tau_end = (tau_scale * 15.0 * HBAR_UEV_PS / coh.max(1e-9)).min(40.0 * lifetime * tau_scale);
    let tau_psb = if env.alpha_ps2 > 0.0 {
        (30.0 / env.nu_c).min(tau_end)
    } else {
        0.0
    };
    let tau_rate = (2.2 * g_h)
        .max(3.0 * pop_width)
        .max(1.5 * rates.gamma_tot)
        .max(1e-9);
    let mut dtau_coarse = std::f64::consts::PI * HBAR_UEV_PS / (4.0 * tau_rate);
    dtau_coarse = dtau_coarse.min(tau_end / 200.0).max(tau_end / 6000.0);
    let mut tau_grid: Vec<f64> = Vec::new();
    if tau_psb > 0.0 {
        let dtau_fine = (0.1f64).min(1.0 / (10.0 * env.nu_c)).min(dtau_coarse);
        let nf = (tau_psb / dtau_fine).ceil() as usize;
        for j in 0..=nf {
            tau_grid.push(tau_psb * j as f64 / nf as f64);
        }
    } else {
        tau_grid.push(0.0);
    }
    let start = *tau_grid.last().unwrap();
    if tau_end > start {
        let nc = (((tau_end - start) / dtau_coarse).ceil() as usize).max(1);
        for j in 1..=nc {
            tau_grid.push(start + (tau_end - start) * j as f64 / nc as f64);
        }
    }
    TimeGrids { t_grid, tau_grid }
}

/// Analytic phonon-sideband filter fraction: the stationary sideband
/// lineshape (transform of B²(e^{φ(τ)}−1)) weighted by |G|²/4.
pub fn psb_filter_fraction_analytic(
    structure: &WaveguideCavity,
    env: &PhononEnvironment,
) -> Result<f64> {
    if env.alpha_ps2 == 0.0 {
        return Ok(0.0);
    }
    let b = franck_condon(env)?;
    let tau_max = 30.0 / env.nu_c;
    let n_tau = 600;
    let tau: Vec<f64> = (0..=n_tau)
        .map(|j| tau_max * j as f64 / n_tau as f64)
        .collect();
    let psi: Vec<crate::C64> = tau
        .iter()
        .map(|&t| {
            crate::phonon::phonon_correlation(env, t)
                .map(|phi| b * b * (phi.exp() - crate::C64::new(1.0, 0.0)))
        })
        .collect::<Result<_>>()?;
    // frequency grid across the sideband
    let half = 6500.0;
    let n_om = 240;
    let mut num = 0.0;
    let mut den = 0.0;
    let mut pole: Option<Error> = None;
    let omegas: Vec<f64> = (0..=n_om)
        .map(|k| structure.omega_c - half + 2.0 * half * k as f64 / n_om as f64)
        .collect();
    let wq = trapezoid_weights(&omegas);
    for (k, &om) in omegas.iter().enumerate() {
        let w = filon_weights(&tau, om - structure.omega_c);
        let mut acc = crate::C64::new(0.0, 0.0);
        for j in 0..tau.len() {
            acc += w[j] * psi[j];
        }
        let lineshape = (2.0 * acc.re).max(0.0);
        let g2 = match filter_function(structure, om) {
            Ok(g) => g.norm_sqr(),
            Err(e) => {
                pole.get_or_insert(e);
                0.0
            }
        };
        num += wq[k] * g2 * lineshape;
        den += wq[k] * lineshape;
    }
    if let Some(e) = pole {
        return Err(e);
    }
    if den <= 0.0 {
        return Ok(0.0);
    }
    Ok((0.25 * num / den).max(0.0))
}

/// Evaluates one operating point of a back-mirror structure.
pub fn evaluate_fom_point(
    structure: &WaveguideCavity,
    env: &PhononEnvironment,
    n_max: usize,
    method: FomMethod,
) -> Result<FomRecord> {
    let rates = effective_rates(structure, env)?;
    let r2 = structure.mirror2.r;
    let mut record = FomRecord {
        r2,
        transmittivity: 1.0 - r2 * r2,
        g: rates.g,
        kappa: rates.kappa,
        i_numeric: f64::NAN,
        i_analytic: f64::NAN,
        e_numeric: f64::NAN,
        e_analytic: f64::NAN,
        filter_fraction: f64::NAN,
        p_b: f64::NAN,
        p_r: f64::NAN,
    };

    if method.wants_analytic() {
        let f_analytic = psb_filter_fraction_analytic(structure, env)?;
        let analytic = AnalyticRates {
            gamma_b: rates.gamma_b,
            gamma_cav: rates.gamma_cav,
            gamma_r: rates.gamma_r,
            gamma_b0: structure.gamma_b0,
        };
        record.i_analytic =
            indistinguishability_analytic(&analytic, rates.b_fc, f_analytic, rates.gamma_tot)?;
        record.e_analytic = efficiency_analytic(&analytic, rates.b_fc, f_analytic)?;
        record.filter_fraction = f_analytic;
    }

    if method.wants_numeric() {
        let config = SystemConfig {
            omega_x: structure.omega_c,
            detuning: 0.0,
            g: rates.g,
            kappa: rates.kappa,
            gamma_b: rates.gamma_b,
            gamma_r: rates.gamma_r,
            gamma_tot_pd: rates.gamma_tot,
            b_fc: rates.b_fc,
            n_max,
        };
        let lifetime = measure_lifetime(&config)?;
        let gen = build_generator(&config)?;
        let rho0 = QuantumState::excited_vacuum(n_max);

        let g_h = rates.g * rates.b_fc;
        let pop_width = HBAR_UEV_PS / lifetime;
        let line_width = (pop_width + 2.0 * rates.gamma_tot).min(30_000.0);
        let strong = g_h > 0.25 * rates.kappa;
        let mut spec = GridSpec {
            carrier_uev: structure.omega_c,
            line_width,
            ridge_width: pop_width,
            w_inner: (25.0 * line_width).min(30_000.0).max(6.0 * rates.kappa.min(5_000.0)),
            patches: vec![],
            psb: if env.alpha_ps2 > 0.0 {
                Some((6_500.0, 120.0))
            } else {
                None
            },
        };
        if strong {
            let polariton_width = (0.25 * (rates.kappa + line_width)).max(line_width / 4.0);
            spec.patches.push((g_h, polariton_width));
            spec.patches.push((-g_h, polariton_width));
            spec.w_inner = spec.w_inner.max(2.0 * g_h + 3.0 * rates.kappa + 10.0 * line_width);
        }
        let grid = spec.build();

        // build the correlator, retrying with a longer delay window if the
        // band has not decayed at the boundary
        let mut tau_scale = 1.0;
        let mut spectrum = None;
        for _ in 0..3 {
            let grids = build_time_grids(&rates, env, lifetime, tau_scale);
            let corr = regression_correlator(&gen, &rho0, &grids.t_grid, &grids.tau_grid)?;
            let dressed = dress_with_phonons(corr, env)?;
            match two_colour_spectrum(&dressed, &grid) {
                Ok(s) => {
                    spectrum = Some(s);
                    break;
                }
                Err(Error::Window(_)) => {
                    tau_scale *= 2.0;
                }
                Err(e) => return Err(e),
            }
        }
        let spectrum = spectrum.ok_or_else(|| {
            Error::Window("correlator window did not converge after retries".into())
        })?;

        let p_b = power_guided(&spectrum, structure)?;
        let p_r = power_radiation(&spectrum, rates.gamma_r);
        record.p_b = p_b;
        record.p_r = p_r;
        record.i_numeric = indistinguishability_numeric(&spectrum, structure)?;
        record.e_numeric = efficiency_numeric(p_b, p_r)?;
        record.filter_fraction = psb_filter_fraction(&spectrum, structure)?;
    }

    Ok(record)
}

/// Convenience: propagates the master equation of an operating point and
/// checks the state invariants at every step (used by validation commands).
pub fn check_dynamics_invariants(
    structure: &WaveguideCavity,
    env: &PhononEnvironment,
    n_max: usize,
    steps: usize,
) -> Result<()> {
    let rates = effective_rates(structure, env)?;
    let config = SystemConfig {
        omega_x: structure.omega_c,
        detuning: 0.0,
        g: rates.g,
        kappa: rates.kappa,
        gamma_b: rates.gamma_b,
        gamma_r: rates.gamma_r,
        gamma_tot_pd: rates.gamma_tot,
        b_fc: rates.b_fc,
        n_max,
    };
    let lifetime = measure_lifetime(&config)?;
    let gen = build_generator(&config)?;
    let dt = 5.0 * lifetime / steps as f64;
    let t_grid: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
    let states = propagate(&gen, &QuantumState::excited_vacuum(n_max), &t_grid)?;
    for s in &states {
        s.validate()?;
    }
    Ok(())
}
