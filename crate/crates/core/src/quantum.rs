//! Lindblad dynamics of the emitter-cavity system and two-time dipole
//! correlators via the quantum regression theorem.
//!
//! The Hilbert space is the two-level emitter tensored with a truncated
//! cavity Fock space. The master equation, in the frame rotating at the
//! exciton energy, reads
//!
//! ```text
//! ρ̇ = -(i/ħ)[-Δ a†a + gB (a†σ + a σ†), ρ]
//!      + (Γ_B + Γ_R) D[σ]ρ + κ D[a]ρ + 2γ_tot D[σ†σ]ρ
//! ```
//!
//! with `Δ = ħ(ω_X − ω_c)` and the coherent coupling renormalized by the
//! Franck-Condon factor `B`. Propagation uses the exact matrix exponential
//! of the dense superoperator, so the local error is at machine level for
//! any step size.

use ndarray::{Array1, Array2};
use std::collections::HashMap;

use crate::constants::HBAR_UEV_PS;
use crate::error::{Error, Result};
use crate::linalg::{dagger, expm, kron};
use crate::phonon::{PhononCorrelation, PhononEnvironment};
use crate::C64;

/// Rates and couplings of the emitter-cavity master equation, in μeV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    /// Exciton energy ħω_X (the spectral carrier).
    pub omega_x: f64,
    /// ħ(ω_X − ω_c).
    pub detuning: f64,
    /// Bare emitter-cavity coupling g; the Hamiltonian uses g·B.
    pub g: f64,
    /// Cavity decay κ.
    pub kappa: f64,
    /// Guided-background emission rate Γ_B.
    pub gamma_b: f64,
    /// Radiation-mode emission rate Γ_R.
    pub gamma_r: f64,
    /// Total pure dephasing γ_tot.
    pub gamma_tot_pd: f64,
    /// Franck-Condon factor B ∈ (0, 1].
    pub b_fc: f64,
    /// Cavity Fock-space truncation (highest retained photon number).
    pub n_max: usize,
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_max < 1 {
            return Err(Error::InvalidInput("n_max must be at least 1".into()));
        }
        for (name, v) in [
            ("g", self.g),
            ("kappa", self.kappa),
            ("gamma_b", self.gamma_b),
            ("gamma_r", self.gamma_r),
            ("gamma_tot_pd", self.gamma_tot_pd),
        ] {
            if v < 0.0 || !v.is_finite() {
                return Err(Error::InvalidInput(format!("{name} must be >= 0, got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.b_fc) || self.b_fc == 0.0 {
            return Err(Error::InvalidInput("B must lie in (0, 1]".into()));
        }
        Ok(())
    }

    /// Hilbert-space dimension 2(n_max + 1).
    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }
}

/// Emitter lowering operator σ = |g⟩⟨e| ⊗ I.
pub fn sigma_op(n_max: usize) -> Array2<C64> {
    let mut s2 = Array2::zeros((2, 2));
    s2[[0, 1]] = C64::new(1.0, 0.0);
    kron(&s2, &Array2::eye(n_max + 1))
}

/// Cavity annihilation operator a = I ⊗ â.
pub fn annihilation_op(n_max: usize) -> Array2<C64> {
    let nf = n_max + 1;
    let mut a = Array2::zeros((nf, nf));
    for n in 1..nf {
        a[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    kron(&Array2::eye(2), &a)
}

/// Density matrix on the emitter ⊗ cavity space.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState(pub Array2<C64>);

impl QuantumState {
    /// |e⟩⟨e| ⊗ |0⟩⟨0| — emitter excited, cavity empty.
    pub fn excited_vacuum(n_max: usize) -> Self {
        let dim = 2 * (n_max + 1);
        let mut rho = Array2::zeros((dim, dim));
        let e0 = n_max + 1; // index of |e, 0⟩
        rho[[e0, e0]] = C64::new(1.0, 0.0);
        QuantumState(rho)
    }

    pub fn trace(&self) -> C64 {
        self.0.diag().iter().sum()
    }

    /// Checks trace normalization, hermiticity and positivity within the
    /// propagation tolerances (1e-10 / 1e-12 / −1e-8 respectively).
    pub fn validate(&self) -> Result<()> {
        let tr = self.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::Propagation {
                t_ps: f64::NAN,
                message: format!("trace drifted to {tr}"),
            });
        }
        let herm_defect = (&self.0 - &dagger(&self.0))
            .iter()
            .map(|v| v.norm())
            .fold(0.0f64, f64::max);
        if herm_defect > 1e-12 {
            return Err(Error::Propagation {
                t_ps: f64::NAN,
                message: format!("hermiticity defect {herm_defect:.3e}"),
            });
        }
        let min_eig = crate::linalg::eigvalsh(&self.0)[0];
        if min_eig < -1e-8 {
            return Err(Error::Propagation {
                t_ps: f64::NAN,
                message: format!("negative eigenvalue {min_eig:.3e}"),
            });
        }
        Ok(())
    }

    /// ⟨σ†σ⟩ — excited-state population.
    pub fn excited_population(&self, n_max: usize) -> f64 {
        let nf = n_max + 1;
        (0..nf).map(|n| self.0[[nf + n, nf + n]].re).sum()
    }
}

/// Lindblad generator as a dense superoperator on row-major flattened
/// density matrices, in ps⁻¹.
#[derive(Debug, Clone)]
pub struct Generator {
    pub config: SystemConfig,
    superop: Array2<C64>,
    dim: usize,
}

fn vec_index(dim: usize, i: usize, j: usize) -> usize {
    i * dim + j
}

fn flatten(rho: &Array2<C64>) -> Array1<C64> {
    Array1::from_iter(rho.iter().cloned())
}

fn unflatten(v: &Array1<C64>, dim: usize) -> Array2<C64> {
    Array2::from_shape_vec((dim, dim), v.to_vec()).expect("dimension mismatch")
}

/// Adds γ·D[c] to the superoperator, with vec(AρB) = (A ⊗ Bᵀ)vec(ρ).
fn add_dissipator(superop: &mut Array2<C64>, c: &Array2<C64>, rate_per_ps: f64) {
    if rate_per_ps == 0.0 {
        return;
    }
    let dim = c.nrows();
    let cd = dagger(c);
    let cdc = cd.dot(c);
    let eye = Array2::eye(dim);
    let jump = kron(c, &c.mapv(|v| v.conj()));
    let left = kron(&cdc, &eye);
    let right = kron(&eye, &cdc.t().to_owned());
    let half = C64::new(0.5, 0.0);
    *superop = &*superop + &(jump - (left + right).mapv(|v| v * half)).mapv(|v| v * rate_per_ps);
}

/// Builds the Lindblad generator for `config`.
pub fn build_generator(config: &SystemConfig) -> Result<Generator> {
    config.validate()?;
    let dim = config.dim();
    let n_max = config.n_max;
    let sigma = sigma_op(n_max);
    let a = annihilation_op(n_max);
    let a_dag = dagger(&a);
    let sigma_dag = dagger(&sigma);

    // H/ħ in ps⁻¹, rotating frame at ω_X
    let g_eff = config.g * config.b_fc;
    let mut h = a_dag.dot(&a).mapv(|v| v * (-config.detuning / HBAR_UEV_PS));
    let coupling = (a_dag.dot(&sigma) + a.dot(&sigma_dag)).mapv(|v| v * (g_eff / HBAR_UEV_PS));
    h = h + coupling;

    let eye = Array2::eye(dim);
    let minus_i = C64::new(0.0, -1.0);
    let mut superop =
        (kron(&h, &eye) - kron(&eye, &h.t().to_owned())).mapv(|v| v * minus_i);

    add_dissipator(
        &mut superop,
        &sigma,
        (config.gamma_b + config.gamma_r) / HBAR_UEV_PS,
    );
    add_dissipator(&mut superop, &a, config.kappa / HBAR_UEV_PS);
    let proj_e = sigma_dag.dot(&sigma);
    add_dissipator(&mut superop, &proj_e, 2.0 * config.gamma_tot_pd / HBAR_UEV_PS);

    Ok(Generator {
        config: *config,
        superop,
        dim,
    })
}

impl Generator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Maximum defect of trace annihilation: |tr L(ρ)| over unit basis
    /// matrices, i.e. the column sums of the superoperator under the trace
    /// functional.
    pub fn trace_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for col in 0..self.dim * self.dim {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..self.dim {
                acc += self.superop[[vec_index(self.dim, i, i), col]];
            }
            worst = worst.max(acc.norm());
        }
        worst
    }

    /// Propagator exp(L·dt) for a step of `dt_ps`.
    pub fn propagator(&self, dt_ps: f64) -> Array2<C64> {
        expm(&self.superop.mapv(|v| v * dt_ps))
    }

    /// Applies the generator once, L(ρ).
    pub fn apply(&self, rho: &Array2<C64>) -> Array2<C64> {
        unflatten(&self.superop.dot(&flatten(rho)), self.dim)
    }
}

/// Caches step propagators keyed by the exact bit pattern of dt.
struct StepperCache<'a> {
    gen: &'a Generator,
    cache: HashMap<u64, Array2<C64>>,
}

impl<'a> StepperCache<'a> {
    fn new(gen: &'a Generator) -> Self {
        Self {
            gen,
            cache: HashMap::new(),
        }
    }

    fn get(&mut self, dt: f64) -> &Array2<C64> {
        self.cache
            .entry(dt.to_bits())
            .or_insert_with(|| self.gen.propagator(dt))
    }
}

/// Propagates `rho0` through the ascending time grid (ps), returning the
/// state at every grid point. The first grid point must be 0, where the
/// initial state is returned unchanged.
pub fn propagate(gen: &Generator, rho0: &QuantumState, t_grid: &[f64]) -> Result<Vec<QuantumState>> {
    if t_grid.is_empty() || t_grid[0] != 0.0 {
        return Err(Error::InvalidInput("time grid must start at 0".into()));
    }
    let mut steppers = StepperCache::new(gen);
    let mut out = Vec::with_capacity(t_grid.len());
    let mut v = flatten(&rho0.0);
    out.push(rho0.clone());
    for k in 1..t_grid.len() {
        let dt = t_grid[k] - t_grid[k - 1];
        if dt <= 0.0 {
            return Err(Error::InvalidInput("time grid must be ascending".into()));
        }
        v = steppers.get(dt).dot(&v);
        let state = QuantumState(unflatten(&v, gen.dim));
        let tr = state.trace();
        if !(tr.re.is_finite() && tr.im.is_finite()) || (tr.re - 1.0).abs() > 1e-6 {
            return Err(Error::Propagation {
                t_ps: t_grid[k],
                message: format!("trace diverged to {tr}"),
            });
        }
        out.push(state);
    }
    Ok(out)
}

/// Two-time dipole correlator ⟨σ†(t′+τ) σ(t′)⟩ stored as a band over
/// (τ, t′). Values are kept in the frame rotating at ω_X; the physical
/// (lab-frame) correlator carries an extra factor e^{iω_X τ/ħ}, applied by
/// [`TwoTimeCorrelator::lab_value`].
#[derive(Debug, Clone)]
pub struct TwoTimeCorrelator {
    /// Grid of the second (earlier) time argument t′, ps.
    pub t_ps: Vec<f64>,
    /// Grid of the delay τ ≥ 0, ps; may be nonuniform.
    pub tau_ps: Vec<f64>,
    /// band[[j, i]] = ⟨σ†(t_i + τ_j) σ(t_i)⟩ in the rotating frame.
    pub band: Array2<C64>,
    /// ħω_X carried out of the stored values, μeV.
    pub carrier_uev: f64,
}

impl TwoTimeCorrelator {
    /// Lab-frame value C(t_i + τ_j, t_i).
    pub fn lab_value(&self, j: usize, i: usize) -> C64 {
        let phase = C64::from_polar(1.0, self.carrier_uev * self.tau_ps[j] / HBAR_UEV_PS);
        self.band[[j, i]] * phase
    }

    /// Equal-time diagonal C(t_i, t_i), the excited population.
    pub fn population(&self, i: usize) -> f64 {
        self.band[[0, i]].re
    }

    /// Writes the in-band correlator entries as CSV rows
    /// `t_ps,tprime_ps,re,im` (lab frame).
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t_ps,tprime_ps,re,im")?;
        for (i, &tp) in self.t_ps.iter().enumerate() {
            for (j, &tau) in self.tau_ps.iter().enumerate() {
                let v = self.lab_value(j, i);
                writeln!(w, "{:.10e},{:.10e},{:.10e},{:.10e}", tp + tau, tp, v.re, v.im)?;
            }
        }
        Ok(())
    }
}

/// Flat indices of the optical-coherence sector: density-matrix elements
/// |a⟩⟨b| with one excitation less in ⟨a| than in |b⟩. The generator has no
/// drive terms, so this sector is invariant under the Liouvillian, and σρ
/// together with the σ† trace live entirely inside it.
fn coherence_sector(n_max: usize) -> Vec<usize> {
    let nf = n_max + 1;
    let dim = 2 * nf;
    let excitation = |idx: usize| -> usize {
        let (s, n) = (idx / nf, idx % nf);
        s + n
    };
    let mut idx = Vec::new();
    for a in 0..dim {
        for b in 0..dim {
            if excitation(a) + 1 == excitation(b) {
                idx.push(vec_index(dim, a, b));
            }
        }
    }
    idx
}

/// Computes the regression correlator: for every t′ on `t_grid`, the vector
/// σρ(t′) is propagated over `tau_grid` and traced against σ†.
///
/// Hermitian symmetry C(t,t′) = C*(t′,t) extends the band to negative
/// delays; C(t,t) equals the excited population. The delay propagation is
/// restricted to the invariant coherence sector and applied to all t′
/// columns at once.
pub fn regression_correlator(
    gen: &Generator,
    rho0: &QuantumState,
    t_grid: &[f64],
    tau_grid: &[f64],
) -> Result<TwoTimeCorrelator> {
    if tau_grid.is_empty() || tau_grid[0] != 0.0 {
        return Err(Error::InvalidInput("tau grid must start at 0".into()));
    }
    let states = propagate(gen, rho0, t_grid)?;
    let n_max = gen.config.n_max;
    let nf = n_max + 1;
    let sigma = sigma_op(n_max);
    let sector = coherence_sector(n_max);
    let sector_pos: HashMap<usize, usize> = sector
        .iter()
        .enumerate()
        .map(|(p, &flat)| (flat, p))
        .collect();
    let sd = sector.len();

    // restriction of the superoperator to the sector
    let mut sub = Array2::zeros((sd, sd));
    for (p, &row) in sector.iter().enumerate() {
        for (q, &col) in sector.iter().enumerate() {
            sub[[p, q]] = gen.superop[[row, col]];
        }
    }
    // positions read by tr[σ†X] = Σ_n X[(g,n),(e,n)]
    let trace_pos: Vec<usize> = (0..nf)
        .map(|n| sector_pos[&vec_index(gen.dim, n, nf + n)])
        .collect();

    // sector components of σρ(t_i), one column per t′ node
    let mut v = Array2::zeros((sd, t_grid.len()));
    for (i, state) in states.iter().enumerate() {
        let m = sigma.dot(&state.0);
        for (p, &flat) in sector.iter().enumerate() {
            v[[p, i]] = m[[flat / gen.dim, flat % gen.dim]];
        }
    }

    let mut sub_steppers: HashMap<u64, Array2<C64>> = HashMap::new();
    let mut band = Array2::zeros((tau_grid.len(), t_grid.len()));
    for j in 0..tau_grid.len() {
        if j > 0 {
            let dtau = tau_grid[j] - tau_grid[j - 1];
            if dtau <= 0.0 {
                return Err(Error::InvalidInput("tau grid must be ascending".into()));
            }
            let stepper = sub_steppers
                .entry(dtau.to_bits())
                .or_insert_with(|| expm(&sub.mapv(|x| x * dtau)));
            v = stepper.dot(&v);
        }
        for i in 0..t_grid.len() {
            let mut acc = C64::new(0.0, 0.0);
            for &p in &trace_pos {
                acc += v[[p, i]];
            }
            band[[j, i]] = acc;
        }
    }
    Ok(TwoTimeCorrelator {
        t_ps: t_grid.to_vec(),
        tau_ps: tau_grid.to_vec(),
        band,
        carrier_uev: gen.config.omega_x,
    })
}

/// Correlator dressed by the phonon bath: the full correlator is
/// `C(t,t′)·B²·e^{φ(t−t′)}`, split into a zero-phonon part `B²·C` and a
/// sideband part `B²(e^{φ}−1)·C`.
#[derive(Debug, Clone)]
pub struct DressedCorrelator {
    pub base: TwoTimeCorrelator,
    /// Franck-Condon factor B.
    pub b_fc: f64,
    /// φ tabulated on the band's τ grid.
    pub phi: PhononCorrelation,
}

impl DressedCorrelator {
    /// ZPL kernel B² (delay-independent).
    pub fn zpl_kernel(&self) -> f64 {
        self.b_fc * self.b_fc
    }

    /// PSB kernel B²(e^{φ(τ)} − 1) at band delay index `j`.
    pub fn psb_kernel(&self, j: usize) -> Result<C64> {
        let phi = self.phi.value(self.base.tau_ps[j])?;
        Ok(self.zpl_kernel() * (phi.exp() - C64::new(1.0, 0.0)))
    }

    /// Full kernel B²e^{φ(τ)}; equals 1 at τ = 0 since e^{−φ(0)} = B².
    pub fn full_kernel(&self, j: usize) -> Result<C64> {
        let phi = self.phi.value(self.base.tau_ps[j])?;
        Ok(self.zpl_kernel() * phi.exp())
    }

    /// Lab-frame dressed correlator C_full(t_i + τ_j, t_i).
    pub fn full_value(&self, j: usize, i: usize) -> Result<C64> {
        Ok(self.base.lab_value(j, i) * self.full_kernel(j)?)
    }
}

/// Dresses a bare correlator with the phonon bath of `env`.
pub fn dress_with_phonons(
    corr: TwoTimeCorrelator,
    env: &PhononEnvironment,
) -> Result<DressedCorrelator> {
    let b_fc = crate::phonon::franck_condon(env)?;
    let phi = PhononCorrelation::tabulate(env, &corr.tau_ps)?;
    Ok(DressedCorrelator {
        base: corr,
        b_fc,
        phi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn config(g: f64, kappa: f64, gamma: f64, dephasing: f64) -> SystemConfig {
        SystemConfig {
            omega_x: 5.0,
            detuning: 0.0,
            g,
            kappa,
            gamma_b: gamma,
            gamma_r: 0.0,
            gamma_tot_pd: dephasing,
            b_fc: 1.0,
            n_max: 2,
        }
    }

    #[test]
    fn generator_annihilates_trace() {
        let gen = build_generator(&config(50.0, 200.0, 1.0, 0.5)).unwrap();
        assert!(gen.trace_defect() < 1e-12);
    }

    #[test]
    fn rejects_zero_truncation() {
        let mut c = config(50.0, 200.0, 1.0, 0.0);
        c.n_max = 0;
        assert!(build_generator(&c).is_err());
    }

    #[test]
    fn weisskopf_wigner_decay() {
        let gamma = 1.0;
        let gen = build_generator(&config(0.0, 0.0, gamma, 0.0)).unwrap();
        let rho0 = QuantumState::excited_vacuum(2);
        let t_grid: Vec<f64> = (0..200).map(|k| k as f64 * 10.0).collect();
        let states = propagate(&gen, &rho0, &t_grid).unwrap();
        for (k, s) in states.iter().enumerate() {
            let expected = (-gamma * t_grid[k] / HBAR_UEV_PS).exp();
            assert_relative_eq!(
                s.excited_population(2),
                expected,
                max_relative = 1e-6,
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn propagate_identity_at_zero() {
        let gen = build_generator(&config(30.0, 100.0, 1.0, 0.2)).unwrap();
        let rho0 = QuantumState::excited_vacuum(2);
        let states = propagate(&gen, &rho0, &[0.0]).unwrap();
        assert_eq!(states[0].0, rho0.0);
    }

    #[test]
    fn jaynes_cummings_rabi_oscillation() {
        // all rates zero: vacuum Rabi oscillation of P_e with period πħ/(gB)
        let g = 100.0;
        let b = 0.9;
        let mut c = config(g, 0.0, 0.0, 0.0);
        c.b_fc = b;
        let gen = build_generator(&c).unwrap();
        let rho0 = QuantumState::excited_vacuum(2);
        let period = std::f64::consts::PI * HBAR_UEV_PS / (g * b);
        let t_grid = vec![0.0, period / 2.0, period];
        let states = propagate(&gen, &rho0, &t_grid).unwrap();
        assert_relative_eq!(states[0].excited_population(2), 1.0, epsilon = 1e-10);
        assert!(states[1].excited_population(2) < 1e-9);
        assert_relative_eq!(states[2].excited_population(2), 1.0, epsilon = 1e-9);
        // excitation number conserved
        for s in &states {
            let photons: f64 = (0..3).map(|n| n as f64 * s.0[[n, n]].re).sum::<f64>()
                + (0..3).map(|n| n as f64 * s.0[[3 + n, 3 + n]].re).sum::<f64>();
            let total = photons + s.excited_population(2);
            assert_relative_eq!(total, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn trace_and_positivity_preserved() {
        let gen = build_generator(&config(80.0, 150.0, 2.0, 1.0)).unwrap();
        let rho0 = QuantumState::excited_vacuum(2);
        let t_grid: Vec<f64> = (0..300).map(|k| k as f64 * 0.5).collect();
        let states = propagate(&gen, &rho0, &t_grid).unwrap();
        for s in &states {
            s.validate().unwrap();
        }
    }

    #[test]
    fn truncation_convergence_single_excitation() {
        let mut c2 = config(120.0, 80.0, 1.5, 0.3);
        c2.n_max = 2;
        let mut c3 = c2;
        c3.n_max = 3;
        let g2 = build_generator(&c2).unwrap();
        let g3 = build_generator(&c3).unwrap();
        let t_grid: Vec<f64> = (0..100).map(|k| k as f64 * 0.7).collect();
        let s2 = propagate(&g2, &QuantumState::excited_vacuum(2), &t_grid).unwrap();
        let s3 = propagate(&g3, &QuantumState::excited_vacuum(3), &t_grid).unwrap();
        for (a, b) in s2.iter().zip(&s3) {
            let d = (a.excited_population(2) - b.excited_population(3)).abs();
            assert!(d < 1e-6, "truncation difference {d}");
        }
    }

    #[test]
    fn background_and_radiation_rates_enter_symmetrically() {
        let mut ca = config(40.0, 90.0, 0.0, 0.1);
        ca.gamma_b = 0.0;
        ca.gamma_r = 1.3;
        let mut cb = ca;
        cb.gamma_b = 1.3;
        cb.gamma_r = 0.0;
        let ga = build_generator(&ca).unwrap();
        let gb = build_generator(&cb).unwrap();
        let diff = (&ga.superop - &gb.superop)
            .iter()
            .map(|v| v.norm())
            .fold(0.0f64, f64::max);
        assert!(diff < 1e-15);
    }

    #[test]
    fn regression_matches_analytic_two_level_emission() {
        // g = 0, γ_pd = 0: C(t′+τ, t′) = e^{iω_X τ/ħ} e^{−Γ(τ/2 + t′)/ħ}
        let gamma = 2.0;
        let gen = build_generator(&config(0.0, 0.0, gamma, 0.0)).unwrap();
        let rho0 = QuantumState::excited_vacuum(2);
        let t_grid: Vec<f64> = (0..40).map(|k| k as f64 * 12.0).collect();
        let tau_grid: Vec<f64> = (0..50).map(|k| k as f64 * 7.0).collect();
        let corr = regression_correlator(&gen, &rho0, &t_grid, &tau_grid).unwrap();
        for (i, &t) in t_grid.iter().enumerate() {
            for (j, &tau) in tau_grid.iter().enumerate() {
                let expected = C64::from_polar(
                    (-gamma * (tau / 2.0 + t) / HBAR_UEV_PS).exp(),
                    5.0 * tau / HBAR_UEV_PS,
                );
                let got = corr.lab_value(j, i);
                assert!(
                    (got - expected).norm() <= 1e-6 * expected.norm().max(1e-9),
                    "mismatch at t={t}, tau={tau}: {got} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn regression_dephasing_factor() {
        let gamma = 1.0;
        let pd = 0.8;
        let gen = build_generator(&config(0.0, 0.0, gamma, pd)).unwrap();
        let rho0 = QuantumState::excited_vacuum(2);
        let t_grid = vec![0.0, 50.0, 100.0];
        let tau_grid: Vec<f64> = (0..30).map(|k| k as f64 * 11.0).collect();
        let corr = regression_correlator(&gen, &rho0, &t_grid, &tau_grid).unwrap();
        for (j, &tau) in tau_grid.iter().enumerate() {
            let expected = ((-gamma * (tau / 2.0 + 50.0) - pd * tau) / HBAR_UEV_PS).exp();
            assert_relative_eq!(
                corr.lab_value(j, 1).norm(),
                expected,
                max_relative = 1e-6,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn regression_diagonal_is_population() {
        let gen = build_generator(&config(60.0, 120.0, 1.0, 0.4)).unwrap();
        let rho0 = QuantumState::excited_vacuum(2);
        let t_grid: Vec<f64> = (0..30).map(|k| k as f64 * 2.0).collect();
        let corr = regression_correlator(&gen, &rho0, &t_grid, &[0.0, 1.0]).unwrap();
        let states = propagate(&gen, &rho0, &t_grid).unwrap();
        for (i, s) in states.iter().enumerate() {
            assert_relative_eq!(
                corr.population(i),
                s.excited_population(2),
                epsilon = 1e-8
            );
        }
    }

    #[test]
    fn dressing_preserves_populations() {
        let env = PhononEnvironment::new(0.03, 2.2, 4.2, 0.0).unwrap();
        let gen = build_generator(&config(0.0, 0.0, 1.0, 0.0)).unwrap();
        let rho0 = QuantumState::excited_vacuum(2);
        let t_grid = vec![0.0, 100.0, 200.0];
        let tau_grid: Vec<f64> = (0..60).map(|k| k as f64 * 0.25).collect();
        let corr = regression_correlator(&gen, &rho0, &t_grid, &tau_grid).unwrap();
        let dressed = dress_with_phonons(corr, &env).unwrap();
        // B² e^{φ(0)} = 1
        let k0 = dressed.full_kernel(0).unwrap();
        assert_relative_eq!(k0.re, 1.0, max_relative = 1e-6);
        assert!(k0.im.abs() < 1e-9);
        // τ → ∞: pure ZPL weight B²
        let kl = dressed.full_kernel(59).unwrap();
        assert_relative_eq!(kl.re, dressed.zpl_kernel(), max_relative = 1e-5);
        // ZPL + PSB = full
        let j = 10;
        let sum = dressed.psb_kernel(j).unwrap() + dressed.zpl_kernel();
        let full = dressed.full_kernel(j).unwrap();
        assert!((sum - full).norm() < 1e-12);
    }

    #[test]
    fn dressing_identity_without_phonons() {
        let env = PhononEnvironment::decoupled();
        let gen = build_generator(&config(0.0, 0.0, 1.0, 0.0)).unwrap();
        let rho0 = QuantumState::excited_vacuum(2);
        let corr = regression_correlator(&gen, &rho0, &[0.0, 10.0], &[0.0, 5.0, 10.0]).unwrap();
        let reference = corr.band.clone();
        let dressed = dress_with_phonons(corr, &env).unwrap();
        for j in 0..3 {
            let k = dressed.full_kernel(j).unwrap();
            assert_relative_eq!(k.re, 1.0, epsilon = 1e-14);
            assert!(dressed.psb_kernel(j).unwrap().norm() < 1e-14);
        }
        assert_eq!(dressed.base.band, reference);
    }
}
