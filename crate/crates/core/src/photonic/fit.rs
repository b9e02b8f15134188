//! Least-squares decomposition of the guided LDOS into a constant waveguide
//! background plus a Lorentzian cavity quasimode.
//!
//! The model `L̄_B(ω̃) = Γ_B + L_c·κ̃/(κ̃² + ω̃²)` is fitted to the exact LDOS
//! sampled uniformly over exactly one free spectral range centered on the
//! resonance. The model is linear in `(Γ_B, L_c)`, so the fit is solved by
//! variable projection: for each trial κ̃ the two linear parameters follow
//! from a bounded 2×2 normal-equation solve, and the remaining 1-D profile
//! residual is minimized over log κ̃ by golden-section search.
//!
//! Parameter bounds: `Γ_B ≥ 0`, `L_c ∈ [0, 2Γ_B⁰]` (so that `g ≤ g_max`),
//! `κ̃ ∈ [κ̃_min, 2]` (so that `κ ≤ κ_max`, the half-cavity transit rate the
//! linewidth saturates to as the mirrors are removed).

use super::{decompose_samples, limit_values, CavityParams, WaveguideCavity};
use crate::error::{Error, Result};

/// Number of uniform samples across the fit window.
pub(crate) const FIT_SAMPLES: usize = 2001;

/// κ̃ search range. The upper bound equals κ_max in dimensionless units.
const KT_MIN: f64 = 1e-8;
const KT_MAX: f64 = 2.0;

/// Relative bracket tolerance for the κ̃ search.
const KT_TOL: f64 = 1e-12;

/// Solution of the linear subproblem at fixed κ̃.
#[derive(Debug, Clone, Copy)]
struct LinearFit {
    ssr: f64,
    gamma_b: f64,
    l_c: f64,
}

/// Bounded least squares for (Γ_B, L_c) at fixed κ̃ against samples
/// `(ω̃_i, f_i)`.
fn solve_linear(theta: &[f64], f: &[f64], kappa_tilde: f64, l_c_max: f64) -> LinearFit {
    let n = theta.len() as f64;
    let mut s_phi = 0.0;
    let mut s_phi2 = 0.0;
    let mut s_f = 0.0;
    let mut s_f_phi = 0.0;
    for (&th, &fi) in theta.iter().zip(f) {
        let phi = kappa_tilde / (kappa_tilde * kappa_tilde + th * th);
        s_phi += phi;
        s_phi2 += phi * phi;
        s_f += fi;
        s_f_phi += fi * phi;
    }
    let det = n * s_phi2 - s_phi * s_phi;
    let (mut gamma_b, mut l_c) = if det.abs() > 1e-300 {
        (
            (s_f * s_phi2 - s_f_phi * s_phi) / det,
            (n * s_f_phi - s_f * s_phi) / det,
        )
    } else {
        (s_f / n, 0.0)
    };
    // Active-set clamping against the box constraints.
    if l_c > l_c_max {
        l_c = l_c_max;
        gamma_b = (s_f - l_c * s_phi) / n;
    }
    if l_c < 0.0 {
        l_c = 0.0;
        gamma_b = s_f / n;
    }
    if gamma_b < 0.0 {
        gamma_b = 0.0;
        l_c = (s_f_phi / s_phi2).clamp(0.0, l_c_max);
    }
    let mut ssr = 0.0;
    for (&th, &fi) in theta.iter().zip(f) {
        let phi = kappa_tilde / (kappa_tilde * kappa_tilde + th * th);
        let r = fi - gamma_b - l_c * phi;
        ssr += r * r;
    }
    LinearFit { ssr, gamma_b, l_c }
}

/// Decomposes the guided LDOS of `structure` into `CavityParams`.
///
/// For `r₁ = r₂ = 0` the profile is exactly flat and the decomposition
/// short-circuits to `(Γ_B⁰, 0, κ_max)`; a zero-amplitude Lorentzian has no
/// defined linewidth, so the limiting value is reported.
pub fn decompose_ldos(structure: &WaveguideCavity) -> Result<CavityParams> {
    structure.validate()?;
    let (g_max, kappa_max) = limit_values(structure);
    let r1 = structure.mirror1.r;
    let r2 = structure.mirror2.r;
    if r1 >= 1.0 || r2 >= 1.0 {
        return Err(Error::InvalidInput(
            "LDOS decomposition requires r1, r2 < 1".into(),
        ));
    }
    if r1 == 0.0 && r2 == 0.0 {
        return Ok(CavityParams {
            gamma_b: structure.gamma_b0,
            l_c: 0.0,
            kappa: kappa_max,
            g: 0.0,
            g_max,
            kappa_max,
            fit_residual: 0.0,
        });
    }

    let (theta, f) = decompose_samples(structure)?;
    let f_norm: f64 = f.iter().map(|x| x * x).sum();
    if !f_norm.is_finite() || f_norm <= 0.0 {
        return Err(Error::FitFailure("non-finite LDOS samples".into()));
    }
    let l_c_max = 2.0 * structure.gamma_b0;

    // Coarse scan in log κ̃ to bracket the global minimum, seeded by the
    // analytic pole half-width (1 − r₁r₂)/(2√(r₁r₂)) clamped to [1e-6, 2].
    let seed = if r1 * r2 > 0.0 {
        ((1.0 - r1 * r2) / (2.0 * (r1 * r2).sqrt())).clamp(1e-6, KT_MAX)
    } else {
        1.0
    };
    let mut grid: Vec<f64> = (0..=48)
        .map(|i| {
            let t = i as f64 / 48.0;
            KT_MIN.ln() + t * (KT_MAX.ln() - KT_MIN.ln())
        })
        .collect();
    grid.push(seed.ln());
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut best_idx = 0;
    let mut best_ssr = f64::INFINITY;
    for (i, &lk) in grid.iter().enumerate() {
        let ssr = solve_linear(&theta, &f, lk.exp(), l_c_max).ssr;
        if ssr < best_ssr {
            best_ssr = ssr;
            best_idx = i;
        }
    }
    let mut a = if best_idx == 0 { grid[0] } else { grid[best_idx - 1] };
    let mut b = if best_idx + 1 == grid.len() {
        grid[best_idx]
    } else {
        grid[best_idx + 1]
    };

    // Golden-section refinement of log κ̃ on [a, b].
    let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = solve_linear(&theta, &f, c.exp(), l_c_max).ssr;
    let mut fd = solve_linear(&theta, &f, d.exp(), l_c_max).ssr;
    let mut iterations = 0usize;
    while (b - a).abs() > KT_TOL {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = solve_linear(&theta, &f, c.exp(), l_c_max).ssr;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = solve_linear(&theta, &f, d.exp(), l_c_max).ssr;
        }
        iterations += 1;
        if iterations > 400 {
            return Err(Error::FitFailure(format!(
                "κ̃ bracket stalled at width {:.3e}",
                (b - a).abs()
            )));
        }
    }
    let kappa_tilde = (0.5 * (a + b)).exp();
    let lin = solve_linear(&theta, &f, kappa_tilde, l_c_max);
    if !lin.ssr.is_finite() {
        return Err(Error::FitFailure("non-finite residual".into()));
    }

    let kappa = structure.kappa_from_dimensionless(kappa_tilde);
    let g = structure.coupling_from_weight(lin.l_c);
    Ok(CavityParams {
        gamma_b: lin.gamma_b,
        l_c: lin.l_c,
        kappa,
        g,
        g_max,
        kappa_max,
        fit_residual: (lin.ssr / f_norm).sqrt(),
    })
}
