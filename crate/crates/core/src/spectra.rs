//! Two-colour emission spectra from two-time dipole correlators.
//!
//! The two-colour spectrum is the double transform
//!
//! ```text
//! S₀(ω, ω′) = ∫dt ∫dt′ e^{i(ωt − ω′t′)/ħ} ⟨σ†(t) σ(t′)⟩
//! ```
//!
//! evaluated from the banded correlator representation C(t′+τ, t′). Writing
//! t = t′+τ and splitting the plane at the diagonal,
//!
//! ```text
//! S₀(ω, ω′) = ∫dτ e^{iδτ/ħ} K(τ) A(Δ, τ) + ∫dτ e^{−iδ′τ/ħ} K*(τ) A*(−Δ, τ),
//! A(Δ, τ) = ∫ds e^{iΔs/ħ} C(s+τ, s),
//! ```
//!
//! with δ = ω − ω_X, Δ = δ − δ′ and K the phonon dressing kernel. Both
//! transforms use piecewise-linear Filon quadrature, so arbitrarily large
//! frequencies are handled without aliasing; the grids only need to resolve
//! the correlator itself.
//!
//! The spectrum splits exactly into S₀ = S_ZPL + S_PSB through the kernel
//! split B²e^{φ} = B² + B²(e^{φ} − 1). Frequency integrals over the finite
//! window carry Lorentzian edge-tail corrections; the plain diagonal norm
//! ∫S₀(ω,ω)dω is available exactly through Parseval as 2πħ∫C(t,t)dt.

use ndarray::Array2;

use crate::constants::HBAR_UEV_PS;
use crate::error::{Error, Result};
use crate::quantum::DressedCorrelator;
use crate::C64;

// ---------------------------------------------------------------------------
// Filon quadrature for ∫ f(t) e^{iδt/ħ} dt with piecewise-linear f
// ---------------------------------------------------------------------------

/// φ₀(x) = ∫₀¹ (1−u) e^{ixu} du and φ₁(x) = ∫₀¹ u e^{ixu} du.
fn filon_basis(x: f64) -> (C64, C64) {
    if x.abs() < 0.5 {
        // series; 14 terms reach machine precision at |x| = 0.5
        let ix = C64::new(0.0, x);
        let mut e0 = C64::new(0.0, 0.0);
        let mut e1 = C64::new(0.0, 0.0);
        let mut term = C64::new(1.0, 0.0);
        let mut fact_k1 = 1.0f64; // (k+1)!
        let mut fact_k2 = 2.0f64; // (k+2)!
        for k in 0..14 {
            e0 += term / fact_k1;
            e1 += term * ((k + 1) as f64) / fact_k2;
            term *= ix;
            fact_k1 *= (k + 2) as f64;
            fact_k2 *= (k + 3) as f64;
        }
        (e0 - e1, e1)
    } else {
        let eix = C64::from_polar(1.0, x);
        let ix = C64::new(0.0, x);
        let e1 = (eix * (ix - 1.0) + 1.0) / (ix * ix);
        let e0 = (eix - 1.0) / ix;
        (e0 - e1, e1)
    }
}

/// Node weights such that Σ_j w_j f(t_j) ≈ ∫ f(t) e^{iδ t/ħ} dt for
/// piecewise-linear `f` on the (possibly nonuniform) ascending `nodes`.
pub fn filon_weights(nodes: &[f64], delta_uev: f64) -> Vec<C64> {
    let n = nodes.len();
    let mut w = vec![C64::new(0.0, 0.0); n];
    for k in 0..n.saturating_sub(1) {
        let h = nodes[k + 1] - nodes[k];
        let x = delta_uev * h / HBAR_UEV_PS;
        let (p0, p1) = filon_basis(x);
        let phase = C64::from_polar(h, delta_uev * nodes[k] / HBAR_UEV_PS);
        w[k] += phase * p0;
        w[k + 1] += phase * p1;
    }
    w
}

/// Plain trapezoid weights on an ascending nonuniform grid.
pub fn trapezoid_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut w = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        let h = 0.5 * (nodes[k + 1] - nodes[k]);
        w[k] += h;
        w[k + 1] += h;
    }
    w
}

// ---------------------------------------------------------------------------
// Frequency grids
// ---------------------------------------------------------------------------

/// Frequency grids of a two-colour spectrum: the evaluation grid (with an
/// extension zone reachable by the rotated-coordinate quadrature), the inner
/// quadrature window, and the difference-frequency grid resolving the
/// near-diagonal ridge.
#[derive(Debug, Clone)]
pub struct FrequencyGrid {
    /// Absolute energies ħω (μeV), sorted ascending; spans the inner window
    /// plus the interpolation extension.
    pub eval_omega: Vec<f64>,
    /// Index range `[inner_lo, inner_hi]` of the quadrature window.
    pub inner_lo: usize,
    pub inner_hi: usize,
    /// Difference-frequency grid Δ (μeV), symmetric about 0.
    pub delta: Vec<f64>,
    /// Spectral carrier ħω_X (μeV).
    pub carrier_uev: f64,
}

/// Construction parameters for [`FrequencyGrid`].
#[derive(Debug, Clone)]
pub struct GridSpec {
    /// Spectral carrier ħω_X, μeV.
    pub carrier_uev: f64,
    /// Zero-phonon line width scale (population + dephasing), μeV.
    pub line_width: f64,
    /// Near-diagonal ridge width scale (population decay), μeV.
    pub ridge_width: f64,
    /// Half-width of the diagonal quadrature window, μeV.
    pub w_inner: f64,
    /// Extra dense patches (center offset from carrier, local width), μeV.
    pub patches: Vec<(f64, f64)>,
    /// Phonon-sideband block: (half width, step), μeV.
    pub psb: Option<(f64, f64)>,
}

impl GridSpec {
    /// Minimal grid for a single line of width `line_width`.
    pub fn line(carrier_uev: f64, line_width: f64) -> Self {
        GridSpec {
            carrier_uev,
            line_width,
            ridge_width: line_width,
            w_inner: 25.0 * line_width,
            patches: vec![],
            psb: None,
        }
    }

    pub fn build(&self) -> FrequencyGrid {
        let lw = self.line_width.max(1e-9);
        let rw = self.ridge_width.max(1e-12).min(lw);

        // difference grid: fine over the ridge, medium over the line,
        // sparse far region; optional patches for polariton beats
        let mut dpos: Vec<f64> = Vec::new();
        push_range(&mut dpos, 0.0, 12.0 * rw, rw / 5.0, 140);
        push_range(&mut dpos, 12.0 * rw, 12.0 * lw, lw / 5.0, 120);
        push_range(&mut dpos, 12.0 * lw, 30.0 * lw, lw, 60);
        for &(center, local) in &self.patches {
            // beat note between a patch line and the carrier line
            let beat = 2.0 * center.abs();
            if beat > 0.0 {
                push_range(
                    &mut dpos,
                    beat - 6.0 * local,
                    beat + 6.0 * local,
                    local / 4.0,
                    80,
                );
            }
        }
        dpos.retain(|&x| x >= 0.0);
        dedup_sorted(&mut dpos, rw / 50.0);
        let mut delta: Vec<f64> = dpos.iter().rev().map(|&x| -x).collect();
        delta.extend(dpos.iter().skip(1));
        if delta.is_empty() {
            delta.push(0.0);
        }
        let w_delta = *dpos.last().unwrap_or(&0.0);

        // detuning grid
        let mut det: Vec<f64> = Vec::new();
        push_sym_range(&mut det, 0.0, 10.0 * lw, lw / 8.0, 200);
        for &(center, local) in &self.patches {
            push_sym_range(&mut det, center, 8.0 * local, local / 7.0, 80);
        }
        push_sym_range(&mut det, 0.0, self.w_inner, lw / 2.0, 480);
        if let Some((half, step)) = self.psb {
            push_sym_range(&mut det, 0.0, half, step, 400);
        }
        let w_inner = det
            .iter()
            .fold(0.0f64, |m, &x| m.max(x.abs()))
            .max(self.w_inner);
        // extension so that δ_c ± Δ/2 stays on the evaluation grid
        let ext_step = (w_delta / 2.0 / 30.0).max(lw);
        push_sym_range(
            &mut det,
            0.0,
            w_inner + w_delta / 2.0 + ext_step,
            ext_step,
            120,
        );
        det.sort_by(|a, b| a.partial_cmp(b).unwrap());
        dedup_sorted(&mut det, lw / 40.0);

        let eval_omega: Vec<f64> = det.iter().map(|d| self.carrier_uev + d).collect();
        let inner_lo = det.partition_point(|&d| d < -w_inner - 1e-9);
        let inner_hi = det.partition_point(|&d| d <= w_inner + 1e-9) - 1;
        FrequencyGrid {
            eval_omega,
            inner_lo,
            inner_hi,
            delta,
            carrier_uev: self.carrier_uev,
        }
    }
}

fn push_range(out: &mut Vec<f64>, from: f64, to: f64, step: f64, cap: usize) {
    if to <= from {
        return;
    }
    let step = step.max((to - from) / cap as f64);
    let n = ((to - from) / step).ceil() as usize;
    for i in 0..=n {
        out.push((from + i as f64 * step).min(to));
    }
}

fn push_sym_range(out: &mut Vec<f64>, center: f64, half: f64, step: f64, cap: usize) {
    if half <= 0.0 {
        return;
    }
    let step = step.max(2.0 * half / cap as f64);
    let n = (half / step).ceil() as usize;
    for i in 0..=n {
        let d = (i as f64 * step).min(half);
        out.push(center + d);
        if i > 0 {
            out.push(center - d);
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
}

fn dedup_sorted(v: &mut Vec<f64>, min_gap: f64) {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out: Vec<f64> = Vec::with_capacity(v.len());
    for &x in v.iter() {
        if out.last().map(|&l| x - l >= min_gap).unwrap_or(true) {
            out.push(x);
        }
    }
    *v = out;
}

// ---------------------------------------------------------------------------
// Two-colour spectrum
// ---------------------------------------------------------------------------

/// Component selector of the decomposed spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Total,
    Zpl,
    Psb,
}

/// The two-colour dipole spectrum on a frequency grid, with its zero-phonon
/// and phonon-sideband components tagged.
#[derive(Debug, Clone)]
pub struct TwoColourSpectrum {
    pub grid: FrequencyGrid,
    /// Inner-window quadrature weights (indices `inner_lo..=inner_hi`).
    quad_w: Vec<f64>,
    /// Filon τ-transforms of the kernel-weighted band, per evaluation
    /// frequency, per earlier-time node: `I⁺_X[a, i]`.
    ip_zpl: Array2<C64>,
    ip_psb: Array2<C64>,
    /// Earlier-time nodes and their trapezoid weights.
    s_nodes: Vec<f64>,
    s_weights: Vec<f64>,
    /// The rotating-frame correlator band and its dressing kernels, kept for
    /// exact time-domain (Parseval) functionals.
    band: Array2<C64>,
    band_tau: Vec<f64>,
    psb_kernel: Vec<C64>,
    b2: f64,
    /// Diagonals on the full evaluation grid.
    diag_zpl: Vec<f64>,
    diag_psb: Vec<f64>,
    /// Exact diagonal norms from Parseval: 2πħ ∫ C(t,t) K(0) dt.
    pub norm_total: f64,
    pub norm_zpl: f64,
    pub norm_psb: f64,
    /// Measured half-width at half-maximum of the total diagonal.
    half_width: f64,
    /// Window metadata: fraction of the band magnitude remaining at the
    /// time-window boundary (recorded truncation level).
    pub boundary_decay: f64,
}

/// Transforms a dressed correlator into its two-colour spectrum.
///
/// Fails with a window error if the correlator has not decayed below 1e-6 of
/// its maximum at the time-grid boundary.
pub fn two_colour_spectrum(
    dressed: &DressedCorrelator,
    grid: &FrequencyGrid,
) -> Result<TwoColourSpectrum> {
    let band = &dressed.base.band;
    let (n_tau, n_s) = band.dim();
    if n_tau < 2 || n_s < 2 {
        return Err(Error::InvalidInput("correlator band is degenerate".into()));
    }
    let band_max = band.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
    let edge_s = (0..n_tau)
        .map(|j| band[[j, n_s - 1]].norm())
        .fold(0.0f64, f64::max);
    let edge_tau = (0..n_s)
        .map(|i| band[[n_tau - 1, i]].norm())
        .fold(0.0f64, f64::max);
    let boundary_decay = edge_s.max(edge_tau) / band_max.max(1e-300);
    if boundary_decay > 1e-6 {
        return Err(Error::Window(format!(
            "correlator at the window boundary is {boundary_decay:.2e} of its maximum (needs < 1e-6)"
        )));
    }

    let b2 = dressed.zpl_kernel();
    let zpl_kernel: Vec<C64> = (0..n_tau).map(|_| C64::new(b2, 0.0)).collect();
    let psb_kernel: Vec<C64> = (0..n_tau)
        .map(|j| dressed.psb_kernel(j))
        .collect::<Result<_>>()?;
    let psb_end = psb_kernel
        .iter()
        .rposition(|k| k.norm() > 1e-14)
        .map(|j| j + 1)
        .unwrap_or(0);

    let tau = &dressed.base.tau_ps;
    let s_nodes = dressed.base.t_ps.clone();
    let s_weights = trapezoid_weights(&s_nodes);
    let n_omega = grid.eval_omega.len();

    // I⁺_X = (W ⊙ K_X) · band as weight-matrix × band products
    let mut w_zpl = Array2::zeros((n_omega, n_tau));
    let mut w_psb = Array2::zeros((n_omega, psb_end));
    for (a, &om) in grid.eval_omega.iter().enumerate() {
        let delta = om - grid.carrier_uev;
        let w = filon_weights(tau, delta);
        for j in 0..n_tau {
            w_zpl[[a, j]] = w[j] * zpl_kernel[j];
        }
        for j in 0..psb_end {
            w_psb[[a, j]] = w[j] * psb_kernel[j];
        }
    }
    let ip_zpl = w_zpl.dot(band);
    let ip_psb = if psb_end > 0 {
        let band_head = band.slice(ndarray::s![0..psb_end, ..]);
        w_psb.dot(&band_head)
    } else {
        Array2::zeros((n_omega, n_s))
    };

    // diagonals: S(ω,ω) = Σ_i w_i 2Re I⁺(ω, i)
    let diag_of = |ip: &Array2<C64>| -> Vec<f64> {
        (0..n_omega)
            .map(|a| {
                (0..n_s)
                    .map(|i| 2.0 * s_weights[i] * ip[[a, i]].re)
                    .sum::<f64>()
            })
            .collect()
    };
    let diag_zpl = diag_of(&ip_zpl);
    let diag_psb = diag_of(&ip_psb);

    // Parseval norms from the equal-time diagonal
    let pop_integral: f64 = (0..n_s)
        .map(|i| s_weights[i] * band[[0, i]].re)
        .sum();
    let norm_total = 2.0 * std::f64::consts::PI * HBAR_UEV_PS * pop_integral;
    let norm_zpl = b2 * norm_total;
    let norm_psb = (1.0 - b2) * norm_total;

    // half-width at half max of the total diagonal, for tail extrapolation
    let diag_tot: Vec<f64> = diag_zpl
        .iter()
        .zip(&diag_psb)
        .map(|(z, p)| z + p)
        .collect();
    let peak = diag_tot.iter().cloned().fold(0.0f64, f64::max);
    let mut lo = grid.eval_omega[0];
    let mut hi = grid.eval_omega[n_omega - 1];
    if peak > 0.0 {
        let above: Vec<usize> = (0..n_omega)
            .filter(|&a| diag_tot[a] >= 0.5 * peak)
            .collect();
        if let (Some(&first), Some(&last)) = (above.first(), above.last()) {
            lo = grid.eval_omega[first];
            hi = grid.eval_omega[last];
        }
    }
    let half_width = (0.5 * (hi - lo)).max(1e-9);

    let inner_nodes: Vec<f64> = grid.eval_omega[grid.inner_lo..=grid.inner_hi].to_vec();
    let quad_w = trapezoid_weights(&inner_nodes);

    Ok(TwoColourSpectrum {
        grid: grid.clone(),
        quad_w,
        ip_zpl,
        ip_psb,
        s_nodes,
        s_weights,
        band: band.clone(),
        band_tau: tau.clone(),
        psb_kernel,
        b2,
        diag_zpl,
        diag_psb,
        norm_total,
        norm_zpl,
        norm_psb,
        half_width,
        boundary_decay,
    })
}

/// A tagged component (ZPL or PSB) of a spectrum.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumPart<'a> {
    pub spectrum: &'a TwoColourSpectrum,
    pub part: Part,
}

/// Splits a spectrum into its tagged zero-phonon and sideband components.
/// The components sum entrywise to the total by construction.
pub fn decompose_spectrum(s: &TwoColourSpectrum) -> (SpectrumPart<'_>, SpectrumPart<'_>) {
    (
        SpectrumPart {
            spectrum: s,
            part: Part::Zpl,
        },
        SpectrumPart {
            spectrum: s,
            part: Part::Psb,
        },
    )
}

impl TwoColourSpectrum {
    /// Inner-window frequencies (the quadrature window), absolute μeV.
    pub fn inner_omega(&self) -> &[f64] {
        &self.grid.eval_omega[self.grid.inner_lo..=self.grid.inner_hi]
    }

    /// Diagonal S_X(ω,ω) on the inner window.
    pub fn diag(&self, part: Part) -> Vec<f64> {
        (self.grid.inner_lo..=self.grid.inner_hi)
            .map(|a| self.diag_at(part, a))
            .collect()
    }

    fn diag_at(&self, part: Part, a: usize) -> f64 {
        match part {
            Part::Total => self.diag_zpl[a] + self.diag_psb[a],
            Part::Zpl => self.diag_zpl[a],
            Part::Psb => self.diag_psb[a],
        }
    }

    fn ip_at(&self, part: Part, a: usize, i: usize) -> C64 {
        match part {
            Part::Total => self.ip_zpl[[a, i]] + self.ip_psb[[a, i]],
            Part::Zpl => self.ip_zpl[[a, i]],
            Part::Psb => self.ip_psb[[a, i]],
        }
    }

    /// ∫ w(ω) S_X(ω,ω) dω over the inner window, with Lorentzian edge-tail
    /// corrections weighted by `w` at the window edges.
    pub fn diag_integral(&self, part: Part, mut weight: impl FnMut(f64) -> f64) -> f64 {
        let lo = self.grid.inner_lo;
        let hi = self.grid.inner_hi;
        let mut acc = 0.0;
        for (k, a) in (lo..=hi).enumerate() {
            acc += self.quad_w[k] * weight(self.grid.eval_omega[a]) * self.diag_at(part, a);
        }
        // tail corrections apply to the Lorentzian-tailed components only;
        // the sideband is Gaussian-cut and fully inside the window
        if part != Part::Psb {
            let w_edge = self.window_half_width();
            let corr = (w_edge * w_edge + self.half_width * self.half_width) / w_edge;
            acc += self.diag_at(part, lo).max(0.0) * corr * weight(self.grid.eval_omega[lo]);
            acc += self.diag_at(part, hi).max(0.0) * corr * weight(self.grid.eval_omega[hi]);
        }
        acc
    }

    fn window_half_width(&self) -> f64 {
        let lo = (self.grid.eval_omega[self.grid.inner_lo] - self.grid.carrier_uev).abs();
        let hi = (self.grid.eval_omega[self.grid.inner_hi] - self.grid.carrier_uev).abs();
        lo.max(hi)
    }

    /// Single spectrum entry S_X(ω_a, ω_b) by the rotated-coordinate
    /// transform; `omega_a`, `omega_b` must lie on the evaluation grid range.
    pub fn value(&self, part: Part, omega_a: f64, omega_b: f64) -> Result<C64> {
        let delta_ab = omega_a - omega_b;
        let u = filon_weights(&self.s_nodes, delta_ab);
        let pa = self.interp_row(part, omega_a)?;
        let pb = self.interp_row(part, omega_b)?;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.s_nodes.len() {
            acc += u[i] * (pa[i] + pb[i].conj());
        }
        Ok(acc)
    }

    /// Materializes the S_X matrix on the inner window (row = ω, col = ω′).
    pub fn matrix(&self, part: Part) -> Result<Array2<C64>> {
        let omega = self.inner_omega().to_vec();
        let n = omega.len();
        let mut m = Array2::zeros((n, n));
        for a in 0..n {
            for b in a..n {
                let v = self.value(part, omega[a], omega[b])?;
                m[[a, b]] = v;
                m[[b, a]] = v.conj();
            }
        }
        Ok(m)
    }

    /// Linear interpolation of I⁺_X(·, i) at an arbitrary frequency.
    fn interp_row(&self, part: Part, omega: f64) -> Result<Vec<C64>> {
        let om = &self.grid.eval_omega;
        if omega < om[0] - 1e-9 || omega > om[om.len() - 1] + 1e-9 {
            return Err(Error::Range(format!(
                "frequency {omega} μeV outside the evaluation grid"
            )));
        }
        let idx = om.partition_point(|&x| x < omega).clamp(1, om.len() - 1);
        let (o0, o1) = (om[idx - 1], om[idx]);
        let f = if o1 > o0 {
            ((omega - o0) / (o1 - o0)).clamp(0.0, 1.0)
        } else {
            0.0
        };
        Ok((0..self.s_nodes.len())
            .map(|i| {
                self.ip_at(part, idx - 1, i) * (1.0 - f) + self.ip_at(part, idx, i) * f
            })
            .collect())
    }

    /// ∬ w(ω) w(ω′) |S₀(ω,ω′)|² dω dω′ over the window, computed in rotated
    /// coordinates (δ_c, Δ) with ridge and difference-tail corrections.
    ///
    /// `weight` is the per-frequency nonnegative weight (e.g. |G(ω)|²).
    pub fn overlap_integral(&self, mut weight: impl FnMut(f64) -> f64) -> Result<f64> {
        let lo = self.grid.inner_lo;
        let hi = self.grid.inner_hi;
        let centers: Vec<f64> = (lo..=hi).map(|a| self.grid.eval_omega[a]).collect();
        let wc = trapezoid_weights(&centers);
        let wd = trapezoid_weights(&self.grid.delta);
        let n_s = self.s_nodes.len();

        let gw: Vec<f64> = centers.iter().map(|&om| weight(om)).collect();
        // Cauchy-Schwarz bound |S(a,b)|² ≤ S(a,a)·S(b,b) prunes pairs with
        // negligible contribution.
        let diag_tot: Vec<f64> = (0..self.grid.eval_omega.len())
            .map(|a| (self.diag_zpl[a] + self.diag_psb[a]).max(0.0))
            .collect();
        let mut bound_peak = 0.0f64;
        for (k, a) in (lo..=hi).enumerate() {
            bound_peak = bound_peak.max(gw[k] * gw[k] * diag_tot[a] * diag_tot[a]);
        }
        let prune = 1e-11 * bound_peak;

        let mut total = 0.0;
        let mut ridge_lo = 0.0;
        let mut ridge_hi = 0.0;
        let mut m_first = 0.0;
        let mut m_last = 0.0;
        let om = &self.grid.eval_omega;
        let om_min = om[0];
        let om_max = om[om.len() - 1];

        for (kd, &d) in self.grid.delta.iter().enumerate() {
            let u = filon_weights(&self.s_nodes, d);
            let mut marginal = 0.0;
            for (kc, &c) in centers.iter().enumerate() {
                let oa = c + 0.5 * d;
                let ob = c - 0.5 * d;
                if oa < om_min || oa > om_max || ob < om_min || ob > om_max {
                    continue;
                }
                let ga = weight(oa);
                let gb = weight(ob);
                // pruning on the PSD diagonal bound
                let da = diag_lookup(om, &diag_tot, oa);
                let db = diag_lookup(om, &diag_tot, ob);
                if ga * gb * da * db < prune {
                    continue;
                }
                let pa = self.interp_pair(Part::Total, oa);
                let pb = self.interp_pair(Part::Total, ob);
                let mut s = C64::new(0.0, 0.0);
                for i in 0..n_s {
                    let va = self.ip_at(Part::Total, pa.0, i) * (1.0 - pa.2)
                        + self.ip_at(Part::Total, pa.1, i) * pa.2;
                    let vb = self.ip_at(Part::Total, pb.0, i) * (1.0 - pb.2)
                        + self.ip_at(Part::Total, pb.1, i) * pb.2;
                    s += u[i] * (va + vb.conj());
                }
                let contrib = ga * gb * s.norm_sqr();
                marginal += wc[kc] * contrib;
                if kc == 0 {
                    ridge_lo += wd[kd] * contrib;
                }
                if kc + 1 == centers.len() {
                    ridge_hi += wd[kd] * contrib;
                }
            }
            total += wd[kd] * marginal;
            if kd == 0 {
                m_first = marginal;
            }
            if kd + 1 == self.grid.delta.len() {
                m_last = marginal;
            }
        }

        // edge-tail corrections: Lorentzian extrapolation along the diagonal
        // (ridge running off the window) and along the difference axis
        let w_edge = self.window_half_width();
        let hw = self.half_width;
        total += (ridge_lo + ridge_hi) * (w_edge * w_edge + hw * hw) / w_edge;
        let w_delta = self.grid.delta.last().copied().unwrap_or(0.0).abs();
        if w_delta > 0.0 {
            total += (m_first + m_last) * (w_delta * w_delta + 4.0 * hw * hw) / w_delta;
        }
        Ok(total)
    }

    fn interp_pair(&self, _part: Part, omega: f64) -> (usize, usize, f64) {
        let om = &self.grid.eval_omega;
        let idx = om.partition_point(|&x| x < omega).clamp(1, om.len() - 1);
        let (o0, o1) = (om[idx - 1], om[idx]);
        let f = if o1 > o0 {
            ((omega - o0) / (o1 - o0)).clamp(0.0, 1.0)
        } else {
            0.0
        };
        (idx - 1, idx, f)
    }

    /// Time-domain overlap ∬|C_X(t,t′)|² dt dt′ mapped through Parseval:
    /// equals (2πħ)⁻² ∬|S_X(ω,ω′)|² dω dω′ without any frequency window.
    /// Valid as the full-plane overlap for a frequency-flat filter.
    pub fn overlap_integral_flat(&self, part: Part) -> f64 {
        let n_s = self.s_nodes.len();
        let wt = trapezoid_weights(&self.band_tau);
        let mut acc = 0.0;
        for j in 0..wt.len() {
            let kernel = match part {
                Part::Total => C64::new(self.b2, 0.0) + self.psb_kernel[j],
                Part::Zpl => C64::new(self.b2, 0.0),
                Part::Psb => self.psb_kernel[j],
            };
            let k2 = kernel.norm_sqr();
            if k2 == 0.0 {
                continue;
            }
            let mut row = 0.0;
            for i in 0..n_s {
                row += self.s_weights[i] * self.band[[j, i]].norm_sqr();
            }
            acc += 2.0 * wt[j] * k2 * row;
        }
        acc * (2.0 * std::f64::consts::PI * HBAR_UEV_PS).powi(2)
    }

    /// Writes the diagonal as CSV `omega_ueV,s_diag` rows.
    pub fn write_diag_csv<W: std::io::Write>(&self, part: Part, mut w: W) -> std::io::Result<()> {
        writeln!(w, "omega_ueV,s_diag")?;
        for (k, a) in (self.grid.inner_lo..=self.grid.inner_hi).enumerate() {
            let _ = k;
            writeln!(
                w,
                "{:.10e},{:.10e}",
                self.grid.eval_omega[a],
                self.diag_at(part, a)
            )?;
        }
        Ok(())
    }

    /// Writes the full matrix as CSV `omega_ueV,omegaprime_ueV,re,im`.
    pub fn write_matrix_csv<W: std::io::Write>(&self, part: Part, mut w: W) -> Result<()> {
        let m = self.matrix(part)?;
        let omega = self.inner_omega();
        writeln!(w, "omega_ueV,omegaprime_ueV,re,im")?;
        for (a, &oa) in omega.iter().enumerate() {
            for (b, &ob) in omega.iter().enumerate() {
                writeln!(w, "{:.10e},{:.10e},{:.10e},{:.10e}", oa, ob, m[[a, b]].re, m[[a, b]].im)?;
            }
        }
        Ok(())
    }
}

fn diag_lookup(om: &[f64], diag: &[f64], omega: f64) -> f64 {
    let idx = om.partition_point(|&x| x < omega).clamp(1, om.len() - 1);
    let (o0, o1) = (om[idx - 1], om[idx]);
    let f = if o1 > o0 {
        ((omega - o0) / (o1 - o0)).clamp(0.0, 1.0)
    } else {
        0.0
    };
    diag[idx - 1] * (1.0 - f) + diag[idx] * f
}

/// Total power emitted into the guided modes,
/// P_B = (Γ_B⁰/2) ∫dω |G(ω)|² S₀(ω,ω).
pub fn power_guided(
    s: &TwoColourSpectrum,
    structure: &crate::photonic::WaveguideCavity,
) -> Result<f64> {
    let mut pole: Option<Error> = None;
    let p = s.diag_integral(Part::Total, |om| {
        match crate::photonic::filter_function(structure, om) {
            Ok(g) => g.norm_sqr(),
            Err(e) => {
                pole.get_or_insert(e);
                0.0
            }
        }
    });
    if let Some(e) = pole {
        return Err(e);
    }
    Ok(0.5 * structure.gamma_b0 * p.max(0.0))
}

/// Total power emitted into the radiation reservoir,
/// P_R = Γ_R ∫dω S₀(ω,ω), using the exact Parseval norm.
pub fn power_radiation(s: &TwoColourSpectrum, gamma_r: f64) -> f64 {
    gamma_r * s.norm_total
}
