//! Longitudinal-acoustic phonon bath of the emitter.
//!
//! The bath enters through its spectral density
//! `J(ν) = α ν³ exp(−ν²/ν_c²)` (ν in ps⁻¹). In the polaron frame its effect
//! on emission reduces to three quantities:
//!
//! - the Franck-Condon factor `B`, renormalizing the coherent coupling
//!   `g → gB`, with `B²` the zero-phonon-line fraction under a flat LDOS,
//! - the phonon correlation function `φ(t)`, whose exponential dresses the
//!   dipole correlator and generates the phonon sideband,
//! - a phonon-enhanced pure-dephasing rate `γ_tot` active when the dressed
//!   emitter-cavity coupling `gB` is resonant with the bath.

use crate::constants::{HBAR_UEV_PS, KB_UEV_PER_K};
use crate::error::{Error, Result};
use crate::C64;

/// Relative tolerance of the adaptive bath quadratures.
const QUAD_REL_TOL: f64 = 1e-8;

/// φ(t) is treated as exactly zero beyond this many cutoff times; the
/// Gaussian cutoff of J(ν) bounds |φ| below 1e-12 long before that.
const CORRELATION_CUTOFF_FACTOR: f64 = 30.0;

/// Acoustic-phonon environment parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhononEnvironment {
    /// Exciton-phonon coupling α, ps².
    pub alpha_ps2: f64,
    /// Cutoff frequency ν_c, ps⁻¹.
    pub nu_c: f64,
    /// Lattice temperature, K.
    pub temperature_k: f64,
    /// Additional pure dephasing rate γ (charge/spin noise), μeV.
    pub gamma_pd_uev: f64,
}

impl PhononEnvironment {
    pub fn new(alpha_ps2: f64, nu_c: f64, temperature_k: f64, gamma_pd_uev: f64) -> Result<Self> {
        if alpha_ps2 < 0.0 || nu_c <= 0.0 || temperature_k < 0.0 || gamma_pd_uev < 0.0 {
            return Err(Error::InvalidInput(
                "phonon environment requires alpha >= 0, nu_c > 0, T >= 0, gamma >= 0".into(),
            ));
        }
        Ok(Self {
            alpha_ps2,
            nu_c,
            temperature_k,
            gamma_pd_uev,
        })
    }

    /// Environment with the bath decoupled (α = 0) and no extra dephasing.
    pub fn decoupled() -> Self {
        Self {
            alpha_ps2: 0.0,
            nu_c: 1.0,
            temperature_k: 0.0,
            gamma_pd_uev: 0.0,
        }
    }

    /// Upper bound on ∫₀^∞ (J(ν)/ν²)·coth dν, the natural magnitude scale
    /// of the bath integrals (coth(x) ≤ 1 + 1/x).
    fn envelope_scale(&self) -> f64 {
        let zero_t = self.alpha_ps2 * self.nu_c * self.nu_c / 2.0;
        let thermal = if self.temperature_k > 0.0 {
            self.alpha_ps2
                * (2.0 * KB_UEV_PER_K * self.temperature_k / HBAR_UEV_PS)
                * self.nu_c
                * (std::f64::consts::PI.sqrt() / 2.0)
        } else {
            0.0
        };
        zero_t + thermal
    }

    /// coth(ħν/(2k_B T)) with the T → 0 limit handled explicitly.
    fn thermal_coth(&self, nu: f64) -> f64 {
        if self.temperature_k <= 0.0 {
            return 1.0;
        }
        let x = HBAR_UEV_PS * nu / (2.0 * KB_UEV_PER_K * self.temperature_k);
        if x > 350.0 {
            1.0
        } else {
            1.0 / x.tanh()
        }
    }
}

/// Phononic spectral density J(ν) = α ν³ exp(−ν²/ν_c²), ps⁻¹.
pub fn spectral_density(env: &PhononEnvironment, nu: f64) -> f64 {
    if nu < 0.0 {
        return 0.0;
    }
    env.alpha_ps2 * nu.powi(3) * (-(nu / env.nu_c).powi(2)).exp()
}

/// Franck-Condon factor B = exp[−½ ∫₀^∞ dν (J(ν)/ν²) coth(ħν/(2k_B T))].
///
/// B ∈ (0, 1], equal to 1 iff the bath is decoupled; monotone nonincreasing
/// in temperature and coupling strength.
pub fn franck_condon(env: &PhononEnvironment) -> Result<f64> {
    if env.alpha_ps2 == 0.0 {
        return Ok(1.0);
    }
    let integrand = |nu: f64| {
        env.alpha_ps2 * nu * (-(nu / env.nu_c).powi(2)).exp() * env.thermal_coth(nu)
    };
    let floor = QUAD_REL_TOL * env.envelope_scale();
    let integral = adaptive_gk(&integrand, 0.0, 8.0 * env.nu_c, QUAD_REL_TOL, floor, 1)?;
    Ok((-0.5 * integral).exp())
}

/// Phonon correlation function
/// φ(t) = ∫₀^∞ dν (J(ν)/ν²) [coth(ħν/(2k_B T)) cos(νt) − i sin(νt)].
///
/// Satisfies φ(−t) = φ*(t) and e^{−Re φ(0)} = B². The Gaussian cutoff of
/// J(ν) forces φ(t) → 0 within a few 1/ν_c.
pub fn phonon_correlation(env: &PhononEnvironment, t_ps: f64) -> Result<C64> {
    if env.alpha_ps2 == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let t = t_ps.abs();
    if t > CORRELATION_CUTOFF_FACTOR / env.nu_c {
        return Ok(C64::new(0.0, 0.0));
    }
    // One panel per half oscillation period keeps the adaptive pass shallow.
    let panels = (1.0 + 8.0 * env.nu_c * t / std::f64::consts::PI).ceil() as usize;
    let panels = panels.clamp(1, 4096);
    let base = |nu: f64| env.alpha_ps2 * nu * (-(nu / env.nu_c).powi(2)).exp();
    let re_int = |nu: f64| base(nu) * env.thermal_coth(nu) * (nu * t).cos();
    let im_int = |nu: f64| base(nu) * (nu * t).sin();
    let floor = QUAD_REL_TOL * env.envelope_scale();
    let re = adaptive_gk(&re_int, 0.0, 8.0 * env.nu_c, QUAD_REL_TOL, floor, panels)?;
    let im = adaptive_gk(&im_int, 0.0, 8.0 * env.nu_c, QUAD_REL_TOL, floor, panels)?;
    let phi = C64::new(re, -im);
    Ok(if t_ps < 0.0 { phi.conj() } else { phi })
}

/// Sideband correlator B²(e^{φ(t)} − 1): the part of the dressed dipole
/// correlator whose transform is the phonon-sideband lineshape. Its value at
/// t = 0 is the total sideband weight 1 − B².
pub fn sideband_correlator(env: &PhononEnvironment, t_ps: f64) -> Result<C64> {
    if env.alpha_ps2 == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let b = franck_condon(env)?;
    let phi = phonon_correlation(env, t_ps)?;
    Ok(b * b * (phi.exp() - 1.0))
}

/// Phonon-enhanced pure dephasing
/// γ_tot = γ + 2π (gB/κ)² J(2gB) coth(gB/(k_B T)), μeV.
///
/// `g` and `κ` are energies in μeV; J takes its argument in ps⁻¹ and its
/// value is converted back to μeV through ħ.
pub fn enhanced_dephasing(env: &PhononEnvironment, g_uev: f64, kappa_uev: f64, b: f64) -> Result<f64> {
    if kappa_uev <= 0.0 {
        return Err(Error::Degenerate(
            "enhanced dephasing requires kappa > 0".into(),
        ));
    }
    let gb = g_uev * b;
    if gb == 0.0 || env.alpha_ps2 == 0.0 {
        return Ok(env.gamma_pd_uev);
    }
    let j = spectral_density(env, 2.0 * gb / HBAR_UEV_PS);
    let coth = if env.temperature_k <= 0.0 {
        1.0
    } else {
        let x = gb / (KB_UEV_PER_K * env.temperature_k);
        if x > 350.0 {
            1.0
        } else {
            1.0 / x.tanh()
        }
    };
    let enhancement =
        2.0 * std::f64::consts::PI * (gb / kappa_uev).powi(2) * HBAR_UEV_PS * j * coth;
    Ok(env.gamma_pd_uev + enhancement)
}

/// Tabulated phonon correlation function on a time grid.
#[derive(Debug, Clone)]
pub struct PhononCorrelation {
    pub t_ps: Vec<f64>,
    pub phi: Vec<C64>,
}

impl PhononCorrelation {
    /// Evaluates φ on the given grid (ascending, in ps).
    pub fn tabulate(env: &PhononEnvironment, t_grid: &[f64]) -> Result<Self> {
        let phi = t_grid
            .iter()
            .map(|&t| phonon_correlation(env, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            t_ps: t_grid.to_vec(),
            phi,
        })
    }

    /// φ at a tabulated time; times outside the grid are a range error.
    pub fn value(&self, t_ps: f64) -> Result<C64> {
        let t = t_ps.abs();
        let last = *self.t_ps.last().ok_or_else(|| Error::Range("empty φ table".into()))?;
        if t > last * (1.0 + 1e-12) {
            return Err(Error::Range(format!(
                "φ queried at |t| = {t} ps beyond table end {last} ps"
            )));
        }
        // linear interpolation between bracketing nodes
        let idx = self
            .t_ps
            .partition_point(|&x| x < t)
            .min(self.t_ps.len() - 1);
        let v = if idx == 0 {
            self.phi[0]
        } else {
            let (t0, t1) = (self.t_ps[idx - 1], self.t_ps[idx]);
            let w = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
            self.phi[idx - 1] * (1.0 - w) + self.phi[idx] * w
        };
        Ok(if t_ps < 0.0 { v.conj() } else { v })
    }
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod quadrature
// ---------------------------------------------------------------------------

/// 15-point Kronrod abscissae on [-1, 1] (positive half).
const XGK: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];

/// 7-point Gauss weights.
const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

/// 15-point Kronrod weights.
const WGK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];

/// One Gauss-Kronrod 15(7) panel; returns (integral, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut res_gauss = WG[3] * f_center;
    let mut res_kronrod = WGK[7] * f_center;
    for j in 0..7 {
        let x = half * XGK[j];
        let fsum = f(center - x) + f(center + x);
        res_kronrod += WGK[j] * fsum;
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * fsum;
        }
    }
    (
        res_kronrod * half,
        ((res_kronrod - res_gauss) * half).abs(),
    )
}

/// Adaptive Gauss-Kronrod integration of `f` over [a, b], starting from
/// `initial_panels` uniform panels. Converges when the error estimate drops
/// below `rel_tol` of the result or below `abs_floor` (the latter covers
/// oscillatory integrands whose value cancels to near zero).
fn adaptive_gk<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_floor: f64,
    initial_panels: usize,
) -> Result<f64> {
    struct Panel {
        a: f64,
        b: f64,
        value: f64,
        error: f64,
    }
    let n0 = initial_panels.max(1);
    let mut panels: Vec<Panel> = (0..n0)
        .map(|i| {
            let pa = a + (b - a) * i as f64 / n0 as f64;
            let pb = a + (b - a) * (i + 1) as f64 / n0 as f64;
            let (value, error) = gk15(f, pa, pb);
            Panel {
                a: pa,
                b: pb,
                value,
                error,
            }
        })
        .collect();

    for _ in 0..60 {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.error).sum();
        if err <= rel_tol * total.abs().max(1e-300) || err <= abs_floor || err < 1e-16 {
            return Ok(total);
        }
        // split the worst panel
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let Panel { a: pa, b: pb, .. } = panels[worst];
        if (pb - pa).abs() < 1e-14 * (b - a).abs() {
            break;
        }
        let mid = 0.5 * (pa + pb);
        let (v1, e1) = gk15(f, pa, mid);
        let (v2, e2) = gk15(f, mid, pb);
        panels[worst] = Panel {
            a: pa,
            b: mid,
            value: v1,
            error: e1,
        };
        panels.push(Panel {
            a: mid,
            b: pb,
            value: v2,
            error: e2,
        });
    }
    let total: f64 = panels.iter().map(|p| p.value).sum();
    let err: f64 = panels.iter().map(|p| p.error).sum();
    if err <= (rel_tol * total.abs().max(1e-300)).max(abs_floor) * 10.0 {
        Ok(total)
    } else {
        Err(Error::QuadratureFailure(format!(
            "relative error {:.2e} above tolerance {:.2e}",
            err / total.abs().max(1e-300),
            rel_tol
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn env() -> PhononEnvironment {
        PhononEnvironment::new(0.03, 2.2, 4.2, 0.0).unwrap()
    }

    #[test]
    fn spectral_density_values() {
        let e = env();
        assert_eq!(spectral_density(&e, 0.0), 0.0);
        // α ν_c³ / e at ν = ν_c
        assert_relative_eq!(
            spectral_density(&e, 2.2),
            0.03 * 2.2f64.powi(3) * (-1.0f64).exp(),
            epsilon = 1e-12
        );
        assert_relative_eq!(spectral_density(&e, 2.2), 0.117_515, max_relative = 1e-4);
        let decoupled = PhononEnvironment::new(0.0, 2.2, 4.2, 0.0).unwrap();
        assert_eq!(spectral_density(&decoupled, 1.0), 0.0);
    }

    #[test]
    fn franck_condon_zero_temperature_analytic() {
        let e = PhononEnvironment::new(0.03, 2.2, 0.0, 0.0).unwrap();
        let b = franck_condon(&e).unwrap();
        let analytic = (-0.03 * 2.2f64.powi(2) / 4.0).exp();
        assert_relative_eq!(b, analytic, max_relative = 1e-6);
        assert_relative_eq!(b, 0.96435, max_relative = 1e-4);
    }

    #[test]
    fn franck_condon_decoupled_is_one() {
        let e = PhononEnvironment::new(0.0, 2.2, 10.0, 0.0).unwrap();
        assert_eq!(franck_condon(&e).unwrap(), 1.0);
    }

    #[test]
    fn franck_condon_monotone_in_temperature_and_coupling() {
        let mut prev = 1.0;
        for t in [0.0, 2.0, 4.0, 10.0, 30.0] {
            let e = PhononEnvironment::new(0.03, 2.2, t, 0.0).unwrap();
            let b = franck_condon(&e).unwrap();
            assert!(b <= prev + 1e-12);
            assert!(b > 0.0 && b <= 1.0);
            prev = b;
        }
        let mut prev = 1.0;
        for a in [0.01, 0.03, 0.1, 0.3] {
            let e = PhononEnvironment::new(a, 2.2, 4.2, 0.0).unwrap();
            let b = franck_condon(&e).unwrap();
            assert!(b < prev);
            prev = b;
        }
    }

    #[test]
    fn correlation_consistency_with_franck_condon() {
        let e = env();
        let b = franck_condon(&e).unwrap();
        let phi0 = phonon_correlation(&e, 0.0).unwrap();
        assert!(phi0.im.abs() < 1e-12);
        assert_relative_eq!((-phi0.re).exp(), b * b, max_relative = 1e-6);
        assert_relative_eq!(phi0.re, -2.0 * b.ln(), max_relative = 1e-6);
    }

    #[test]
    fn correlation_symmetry_and_decay() {
        let e = env();
        let p = phonon_correlation(&e, 1.3).unwrap();
        let m = phonon_correlation(&e, -1.3).unwrap();
        assert_relative_eq!(p.re, m.re, epsilon = 1e-14);
        assert_relative_eq!(p.im, -m.im, epsilon = 1e-14);
        let far = phonon_correlation(&e, 20.0 / e.nu_c).unwrap();
        assert!(far.norm() < 1e-6);
    }

    #[test]
    fn correlation_zero_for_decoupled_bath() {
        let e = PhononEnvironment::new(0.0, 2.2, 4.2, 0.0).unwrap();
        assert_eq!(phonon_correlation(&e, 0.7).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn sideband_weight_at_zero() {
        let e = env();
        let b = franck_condon(&e).unwrap();
        let s0 = sideband_correlator(&e, 0.0).unwrap();
        assert_relative_eq!(s0.re, 1.0 - b * b, max_relative = 1e-6);
        assert!(s0.im.abs() < 1e-10);
        let far = sideband_correlator(&e, 25.0 / e.nu_c).unwrap();
        assert!(far.norm() < 1e-8);
    }

    #[test]
    fn enhanced_dephasing_limits() {
        let e = PhononEnvironment::new(0.03, 2.2, 4.0, 0.7).unwrap();
        assert_relative_eq!(enhanced_dephasing(&e, 0.0, 200.0, 0.95).unwrap(), 0.7);
        let off = PhononEnvironment::new(0.0, 2.2, 4.0, 0.7).unwrap();
        assert_relative_eq!(enhanced_dephasing(&off, 50.0, 200.0, 0.95).unwrap(), 0.7);
        assert!(enhanced_dephasing(&e, 50.0, 0.0, 0.95).is_err());
    }

    #[test]
    fn enhanced_dephasing_point_value() {
        // Independent single-point evaluation of the closed form at
        // g = 50 μeV, κ = 200 μeV, B = 0.95, α = 0.03 ps², ν_c = 2.2 ps⁻¹,
        // T = 4 K: the enhancement term is 0.15299407 μeV.
        let e = PhononEnvironment::new(0.03, 2.2, 4.0, 0.0).unwrap();
        let g = enhanced_dephasing(&e, 50.0, 200.0, 0.95).unwrap();
        assert_relative_eq!(g, 0.152_994_07, max_relative = 1e-6);
        let with_pd = PhononEnvironment::new(0.03, 2.2, 4.0, 0.25).unwrap();
        assert_relative_eq!(
            enhanced_dephasing(&with_pd, 50.0, 200.0, 0.95).unwrap(),
            0.25 + 0.152_994_07,
            max_relative = 1e-6
        );
    }

    #[test]
    fn tabulated_correlation_lookup() {
        let e = env();
        let grid: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
        let table = PhononCorrelation::tabulate(&e, &grid).unwrap();
        let direct = phonon_correlation(&e, 1.0).unwrap();
        let looked = table.value(1.0).unwrap();
        assert_relative_eq!(direct.re, looked.re, max_relative = 1e-9);
        assert_relative_eq!(direct.im, looked.im, max_relative = 1e-9);
        assert!(table.value(10.05).is_err());
        let neg = table.value(-1.0).unwrap();
        assert_relative_eq!(neg.im, -looked.im, epsilon = 1e-14);
    }
}
