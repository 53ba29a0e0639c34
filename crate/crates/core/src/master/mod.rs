//! Thermalizing master equation in the dressed eigenbasis.
//!
//! Every jump `|n⟩⟨m|` connects two eigenlevels, so in that basis the
//! generator splits exactly into a classical rate matrix acting on the
//! populations and independent, exponentially decaying coherences
//! `ρ_ij' = (−i ω_ij − (R_i + R_j)/2) ρ_ij`, where `R_i` is the total escape
//! rate of level `i`. Spectrum, steady state and propagation use this
//! structure; [`Liouvillian::matrix`] assembles the dense `M² × M²`
//! superoperator for cross-checks.

mod evolve;
mod fit;

pub use evolve::{evolve, pure_state_density, right_vacuum_state, Observable, Trajectory};
pub use fit::{fit_rabi_decay, RabiFit};

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_traits::Float;

use crate::eigen::{self, EigenSystem};
use crate::operators::{self, ModelParams, OperatorMatrix};
use crate::special::bose_occupation;
use crate::{CMatrix, Error, Result, C64};

/// Retained eigenlevels when none are requested.
pub const DEFAULT_LEVELS: usize = 24;

/// Largest level count accepted for a Liouvillian.
pub const DEFAULT_MAX_LEVELS: usize = 40;

/// Tolerance on `|λ₀|` for the stationary eigenvalue.
pub const ZERO_EIGENVALUE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    /// Couples through the quadrature `a − a†`.
    Cavity,
    /// Couples through `s_x` (or `S_x`).
    Dipole,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralLaw {
    /// `J(ω) = strength · ω / ref_freq`.
    Ohmic,
    /// `J(ω) = strength · (ω / ref_freq)^ν`.
    Radiative(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    pub channel: Channel,
    pub law: SpectralLaw,
    pub strength: f64,
    pub ref_freq: f64,
}

impl BathSpec {
    /// Ohmic cavity loss `γ|ω|/ω_c`.
    pub fn cavity_ohmic(gamma: f64, omega_c: f64) -> Self {
        BathSpec {
            channel: Channel::Cavity,
            law: SpectralLaw::Ohmic,
            strength: gamma,
            ref_freq: omega_c,
        }
    }

    /// Radiative dipole loss `κ|ω|³/ω_d³`.
    pub fn dipole_radiative(kappa: f64, omega_d: f64) -> Self {
        BathSpec {
            channel: Channel::Dipole,
            law: SpectralLaw::Radiative(3.0),
            strength: kappa,
            ref_freq: omega_d,
        }
    }

    /// Ohmic dipole loss `κ|ω|/ω_d`.
    pub fn dipole_ohmic(kappa: f64, omega_d: f64) -> Self {
        BathSpec {
            channel: Channel::Dipole,
            law: SpectralLaw::Ohmic,
            strength: kappa,
            ref_freq: omega_d,
        }
    }

    /// The cavity/dipole pair used throughout: `κ = 4γ` radiative dipole.
    pub fn standard_pair(gamma: f64, params: &ModelParams) -> [BathSpec; 2] {
        [
            BathSpec::cavity_ohmic(gamma, params.omega_c),
            BathSpec::dipole_radiative(4.0 * gamma, params.omega_d),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.strength >= 0.0) || !self.strength.is_finite() {
            return Err(Error::invalid("strength", "must be finite and ≥ 0"));
        }
        if !(self.ref_freq > 0.0) || !self.ref_freq.is_finite() {
            return Err(Error::invalid("ref_freq", "must be finite and > 0"));
        }
        if let SpectralLaw::Radiative(nu) = self.law {
            if !(nu >= 1.0) || !nu.is_finite() {
                return Err(Error::invalid("radiative exponent", "must be ≥ 1"));
            }
        }
        Ok(())
    }

    /// `J(|ω|)`; zero at `ω = 0` for both laws.
    pub fn spectral_density(&self, omega: f64) -> f64 {
        let r = omega.abs() / self.ref_freq;
        match self.law {
            SpectralLaw::Ohmic => self.strength * r,
            SpectralLaw::Radiative(nu) => self.strength * r.powf(nu),
        }
    }
}

/// Coupling operators of both channels in the full Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelOperators {
    pub cavity: OperatorMatrix,
    pub dipole: OperatorMatrix,
}

impl ChannelOperators {
    /// `a − a†` and `S_x` on `(spin_n + 1)·n_fock` states.
    pub fn spin_cavity(spin_n: usize, n_fock: usize) -> Result<Self> {
        Ok(ChannelOperators {
            cavity: operators::cavity_quadrature(spin_n + 1, n_fock)?,
            dipole: operators::dipole_sx(spin_n, n_fock)?,
        })
    }

    pub fn get(&self, channel: Channel) -> &OperatorMatrix {
        match channel {
            Channel::Cavity => &self.cavity,
            Channel::Dipole => &self.dipole,
        }
    }
}

/// Frame in which the Rabi Hamiltonian is diagonalized. Both coupling
/// operators commute with the polaron transformation, so the two frames
/// give the same rates up to truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    Lab,
    Polaron,
}

/// Diagonalized Rabi model with its coupling operators.
#[derive(Debug, Clone)]
pub struct DressedModel {
    pub params: ModelParams,
    pub frame: Frame,
    pub eig: EigenSystem,
    pub ops: ChannelOperators,
}

/// Eigenvector weight allowed in the top tenth of the photon ladder for a
/// level to count as converged.
pub const FOCK_TAIL_TOLERANCE: f64 = 1e-12;

impl DressedModel {
    pub fn rabi(params: &ModelParams, frame: Frame) -> Result<Self> {
        let h = match frame {
            Frame::Lab => operators::build_rabi(params)?,
            Frame::Polaron => operators::build_polaron_rabi(params)?,
        };
        let mut eig = eigen::diagonalize(&h)?;
        eig.certify_fock_tail(2, params.n_fock, (params.n_fock / 10).max(2), FOCK_TAIL_TOLERANCE);
        Ok(DressedModel {
            params: *params,
            frame,
            eig,
            ops: ChannelOperators::spin_cavity(1, params.n_fock)?,
        })
    }

    pub fn liouvillian(&self, baths: &[BathSpec], temperature: f64, m: usize) -> Result<Liouvillian> {
        build_liouvillian(&self.eig, &self.ops, baths, temperature, m)
    }

    /// Liouvillian gap with the standard baths `γ`, `κ = 4γ`.
    pub fn gap(&self, gamma: f64, temperature: f64, m: usize) -> Result<f64> {
        let baths = BathSpec::standard_pair(gamma, &self.params);
        liouvillian_gap(&self.liouvillian(&baths, temperature, m)?)
    }
}

fn check_levels(eig: &EigenSystem, m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::invalid("levels", "need at least 2 retained levels"));
    }
    if m > eig.converged_levels.min(eig.dim) {
        return Err(Error::TooManyLevels {
            requested: m,
            available: eig.converged_levels.min(eig.dim),
        });
    }
    Ok(())
}

/// `Γ_nm = J(ω_m − ω_n)|⟨n|X|m⟩|²` for `n < m` among the lowest `m` levels;
/// entries with `n ≥ m` are zero.
pub fn transition_rates(eig: &EigenSystem, op: &OperatorMatrix, bath: &BathSpec, m: usize) -> Result<DMatrix<f64>> {
    bath.validate()?;
    check_levels(eig, m)?;
    if op.dim != eig.dim {
        return Err(Error::invalid("operator", "dimension differs from the eigensystem"));
    }
    let x = eig.project(op, m);
    Ok(DMatrix::from_fn(m, m, |n, k| {
        if n < k {
            bath.spectral_density(eig.frequencies[k] - eig.frequencies[n]) * x[(n, k)].norm_sqr()
        } else {
            0.0
        }
    }))
}

/// Master-equation generator on the lowest `dim_levels` eigenlevels.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    pub dim_levels: usize,
    pub level_freqs: Vec<f64>,
    pub temperature: f64,
    pub baths: Vec<BathSpec>,
    /// Summed `Γ_nm` over baths, `n < m`.
    pub rates: DMatrix<f64>,
    /// `transfer[(k, j)]`: rate of the jump `j → k`.
    pub transfer: DMatrix<f64>,
    /// Total escape rate `R_j` of each level.
    pub escape: Vec<f64>,
}

/// Assembles the dissipator with downward weights `1 + N_T(ω_mn)` and
/// upward weights `N_T(ω_mn)`; `T = 0` sets `N_T ≡ 0`.
pub fn build_liouvillian(
    eig: &EigenSystem,
    ops: &ChannelOperators,
    baths: &[BathSpec],
    temperature: f64,
    m: usize,
) -> Result<Liouvillian> {
    build_liouvillian_capped(eig, ops, baths, temperature, m, DEFAULT_MAX_LEVELS)
}

pub fn build_liouvillian_capped(
    eig: &EigenSystem,
    ops: &ChannelOperators,
    baths: &[BathSpec],
    temperature: f64,
    m: usize,
    max_levels: usize,
) -> Result<Liouvillian> {
    if !(temperature >= 0.0) || !temperature.is_finite() {
        return Err(Error::invalid("temperature", "must be finite and ≥ 0"));
    }
    if m > max_levels {
        return Err(Error::DimensionCap {
            dim: m * m,
            cap: max_levels * max_levels,
        });
    }
    check_levels(eig, m)?;
    let mut rates = DMatrix::<f64>::zeros(m, m);
    for bath in baths {
        rates += transition_rates(eig, ops.get(bath.channel), bath, m)?;
    }
    let freqs: Vec<f64> = eig.frequencies[..m].to_vec();
    let mut transfer = DMatrix::<f64>::zeros(m, m);
    for hi in 0..m {
        for lo in 0..hi {
            let gamma = rates[(lo, hi)];
            if gamma == 0.0 {
                continue;
            }
            let n_t = bose_occupation(freqs[hi] - freqs[lo], temperature);
            transfer[(lo, hi)] = gamma * (1.0 + n_t);
            transfer[(hi, lo)] = gamma * n_t;
        }
    }
    let escape = (0..m).map(|j| transfer.column(j).sum()).collect();
    Ok(Liouvillian {
        dim_levels: m,
        level_freqs: freqs,
        temperature,
        baths: baths.to_vec(),
        rates,
        transfer,
        escape,
    })
}

/// Orders eigenvalues by descending real part, ties by ascending `|Im|`.
pub fn sort_spectrum(values: &mut [C64]) {
    values.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.abs().total_cmp(&b.im.abs())));
}

impl Liouvillian {
    /// Rate matrix `G` with `p' = G p`.
    pub fn population_generator(&self) -> DMatrix<f64> {
        let mut g = self.transfer.clone();
        for j in 0..self.dim_levels {
            g[(j, j)] = -self.escape[j];
        }
        g
    }

    /// Eigenvalue of the coherence `|i⟩⟨j|`.
    pub fn coherence_eigenvalue(&self, i: usize, j: usize) -> C64 {
        C64::new(
            -0.5 * (self.escape[i] + self.escape[j]),
            -(self.level_freqs[i] - self.level_freqs[j]),
        )
    }

    /// `dρ/dt` for a density matrix in the retained eigenbasis.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let m = self.dim_levels;
        let mut out = CMatrix::from_fn(m, m, |i, j| {
            if i == j {
                C64::new(0.0, 0.0)
            } else {
                self.coherence_eigenvalue(i, j) * rho[(i, j)]
            }
        });
        let g = self.population_generator();
        for k in 0..m {
            let mut s = 0.0;
            for j in 0..m {
                s += g[(k, j)] * rho[(j, j)].re;
            }
            out[(k, k)] = C64::new(s, 0.0);
        }
        out
    }

    /// Dense superoperator acting on `vec(ρ)` with index `i·M + j` for `ρ_ij`.
    pub fn matrix(&self) -> CMatrix {
        let m = self.dim_levels;
        let mut l = CMatrix::zeros(m * m, m * m);
        for i in 0..m {
            for j in 0..m {
                l[(i * m + j, i * m + j)] = self.coherence_eigenvalue(i, j);
            }
        }
        for k in 0..m {
            for j in 0..m {
                if k != j {
                    l[(k * m + k, j * m + j)] += C64::new(self.transfer[(k, j)], 0.0);
                }
            }
        }
        l
    }

    /// Eigenvalues of the population generator.
    fn population_spectrum(&self) -> Vec<C64> {
        let m = self.dim_levels;
        let g = self.population_generator();
        let triangular = (0..m).all(|j| (j + 1..m).all(|k| g[(k, j)] == 0.0));
        if triangular {
            return self.escape.iter().map(|r| C64::new(-r, 0.0)).collect();
        }
        if self.temperature > 0.0 {
            // detailed balance makes √π⁻¹ G √π symmetric
            let t = self.temperature;
            let f = &self.level_freqs;
            let s = DMatrix::from_fn(m, m, |k, j| g[(k, j)] * ((f[k] - f[j]) / (2.0 * t)).exp());
            let s = (&s + s.transpose()) * 0.5;
            if s.iter().all(|x| x.is_finite()) {
                return s.symmetric_eigenvalues().iter().map(|x| C64::new(*x, 0.0)).collect();
            }
        }
        g.complex_eigenvalues().iter().copied().collect()
    }

    /// Full spectrum, sorted by [`sort_spectrum`].
    pub fn spectrum(&self) -> Vec<C64> {
        let m = self.dim_levels;
        let mut values = self.population_spectrum();
        values.reserve(m * m - m);
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    values.push(self.coherence_eigenvalue(i, j));
                }
            }
        }
        sort_spectrum(&mut values);
        values
    }

    /// Spectrum of the dense superoperator by complex Schur decomposition.
    pub fn dense_spectrum(&self) -> Result<Vec<C64>> {
        let schur = nalgebra::Schur::try_new(self.matrix(), f64::EPSILON, 1_000_000).ok_or(Error::EigenFailure(
            "Schur iteration on the superoperator did not converge",
        ))?;
        let mut values: Vec<C64> = schur
            .eigenvalues()
            .ok_or(Error::EigenFailure("superoperator Schur form is not triangular"))?
            .iter()
            .copied()
            .collect();
        sort_spectrum(&mut values);
        Ok(values)
    }
}

fn gap_from_sorted(values: &[C64]) -> Result<f64> {
    let lead = values[0];
    if !(lead.norm() < ZERO_EIGENVALUE_TOLERANCE) {
        return Err(Error::NoSteadyState {
            closest: values.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min),
            tolerance: ZERO_EIGENVALUE_TOLERANCE,
        });
    }
    Ok(values.get(1).map_or(0.0, |z| z.re.min(0.0)))
}

/// `λ = Re λ₁` of the sorted spectrum (≤ 0).
pub fn liouvillian_gap(l: &Liouvillian) -> Result<f64> {
    gap_from_sorted(&l.spectrum())
}

/// Gap from the dense superoperator; slow, for cross-checks.
pub fn liouvillian_gap_dense(l: &Liouvillian) -> Result<f64> {
    gap_from_sorted(&l.dense_spectrum()?)
}

/// Number of singular values of `g` below `64 ε σ_max`.
fn kernel_dimension(g: &DMatrix<f64>) -> usize {
    let sv = g.clone().singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    sv.iter().filter(|s| **s <= 64.0 * f64::EPSILON * top).count()
}

/// Stationary state of the master equation, diagonal in the eigenbasis.
///
/// Populations come from the Grassmann–Taksar–Heyman elimination, which
/// never subtracts and stays accurate when rates span many decades.
pub fn steady_state(l: &Liouvillian) -> Result<CMatrix> {
    let m = l.dim_levels;
    // q[(j, k)]: rate j → k
    let mut q = l.transfer.transpose();
    let mut pivots = vec![0.0; m];
    for n in (1..m).rev() {
        let s: f64 = (0..n).map(|j| q[(n, j)]).sum();
        if !(s > 0.0) {
            return Err(Error::DegenerateKernel(
                kernel_dimension(&l.population_generator()).max(2),
            ));
        }
        pivots[n] = s;
        for i in 0..n {
            let qin = q[(i, n)];
            if qin == 0.0 {
                continue;
            }
            for j in 0..n {
                if i != j {
                    q[(i, j)] += qin * q[(n, j)] / s;
                }
            }
        }
    }
    let mut pi = vec![0.0; m];
    pi[0] = 1.0;
    for n in 1..m {
        pi[n] = (0..n).map(|i| pi[i] * q[(i, n)]).sum::<f64>() / pivots[n];
    }
    let total: f64 = pi.iter().sum();
    Ok(CMatrix::from_fn(m, m, |i, j| {
        if i == j {
            C64::new(pi[i] / total, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

/// `e^{−H/T}/Z` on the given levels; the ground projector at `T = 0`.
pub fn gibbs_state(level_freqs: &[f64], temperature: f64) -> CMatrix {
    let m = level_freqs.len();
    let w: Vec<f64> = if temperature > 0.0 {
        level_freqs
            .iter()
            .map(|f| (-(f - level_freqs[0]) / temperature).exp())
            .collect()
    } else {
        (0..m).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect()
    };
    let z: f64 = w.iter().sum();
    CMatrix::from_fn(m, m, |i, j| {
        if i == j {
            C64::new(w[i] / z, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `½‖a − b‖₁` for Hermitian matrices.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let d = a - b;
    let d = (&d + d.adjoint()) * C64::new(0.5, 0.0);
    0.5 * d.symmetric_eigenvalues().iter().map(|x| x.abs()).sum::<f64>()
}
