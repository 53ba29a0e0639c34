//! Cavity-assisted relaxation of the multi-well dipole once the lossy
//! cavity is adiabatically eliminated.
//!
//! The dipole is the Holstein–Primakoff boson `b` of the polaron extended
//! Dicke model. It is cooled by `D[b]` at rate `Γ_T(ε)` and heated by
//! `D[b†]` at rate `Γ_T(−ε)`, where
//!
//! ```text
//! Γ_T(ω) = (ω_d²N/γ) e^{−x²(1+2N_T)} Σ_{(q,r)≠(0,0)} P_q(x²(1+N_T)) P_r(x²N_T)
//!          · (γ²/4) / ((ω − ω_c(q−r))² + γ²/4)
//! ```
//!
//! with `P_k(λ) = λ^k/k!` and `N_T` the thermal photon number at `ω_c`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_traits::Float;

use crate::expm::expm;
use crate::master::Trajectory;
use crate::special::{bose_occupation, displacement_element, ln_factorial};
use crate::{Error, Result, Warning};

/// Relative size of the last retained series term for the default cutoff.
pub const TERM_TOLERANCE: f64 = 1e-10;

/// Largest neglected fraction of the Poisson weight.
pub const TAIL_TOLERANCE: f64 = 1e-8;

/// Population allowed in the highest retained boson state.
pub const LEAKAGE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdmParams {
    pub omega_c: f64,
    pub omega_d: f64,
    pub g: f64,
    pub epsilon: f64,
    /// Number of wells minus one; the dipole is a spin `N/2`.
    pub n: usize,
    /// Cavity linewidth.
    pub gamma: f64,
    pub temperature: f64,
    /// Largest `q` and `r`; `None` picks the Poisson-tail default.
    pub sum_cutoff: Option<usize>,
    /// Boson states `0..n_boson` in the effective dynamics.
    pub n_boson: usize,
}

impl EdmParams {
    /// `ω_c = ω_d = 1`, `T = 0`, default cutoff and 40 boson states.
    pub fn new(g: f64, epsilon: f64, n: usize, gamma: f64) -> Self {
        EdmParams {
            omega_c: 1.0,
            omega_d: 1.0,
            g,
            epsilon,
            n,
            gamma,
            temperature: 0.0,
            sum_cutoff: None,
            n_boson: 40,
        }
    }

    pub fn with_temperature(mut self, temperature: f64) -> Self {
        self.temperature = temperature;
        self
    }

    pub fn displacement(&self) -> f64 {
        self.g / self.omega_c
    }

    /// Thermal photon number of the cavity.
    pub fn thermal_photons(&self) -> f64 {
        bose_occupation(self.omega_c, self.temperature)
    }

    /// Rate unit `Γ_d = ω_d²N/γ`.
    pub fn rate_unit(&self) -> f64 {
        self.omega_d * self.omega_d * self.n as f64 / self.gamma
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_c > 0.0) || !self.omega_c.is_finite() {
            return Err(Error::invalid("omega_c", "must be finite and > 0"));
        }
        if !(self.omega_d > 0.0) || !self.omega_d.is_finite() {
            return Err(Error::invalid("omega_d", "must be finite and > 0"));
        }
        if !(self.g >= 0.0) || !self.g.is_finite() {
            return Err(Error::invalid("g", "must be finite and ≥ 0"));
        }
        if !self.epsilon.is_finite() {
            return Err(Error::invalid("epsilon", "must be finite"));
        }
        if self.n < 1 {
            return Err(Error::invalid("N", "must be ≥ 1"));
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::invalid("gamma", "must be finite and > 0"));
        }
        if !(self.temperature >= 0.0) || !self.temperature.is_finite() {
            return Err(Error::invalid("temperature", "must be finite and ≥ 0"));
        }
        if self.n_boson < 2 {
            return Err(Error::invalid("n_boson", "must be ≥ 2"));
        }
        Ok(())
    }
}

/// `ln(λ^k/k!)`, with `0^0 = 1`.
fn ln_poisson_term(lambda: f64, k: usize) -> f64 {
    if k == 0 {
        0.0
    } else if lambda == 0.0 {
        f64::NEG_INFINITY
    } else {
        k as f64 * lambda.ln() - ln_factorial(k)
    }
}

/// Smallest `K` past the mode of `λ^k/k!` whose term is below
/// [`TERM_TOLERANCE`] times the largest term.
fn default_cutoff(lambda: f64) -> usize {
    if lambda == 0.0 {
        return 0;
    }
    let mode = lambda.floor() as usize;
    let peak = ln_poisson_term(lambda, mode);
    let limit = TERM_TOLERANCE.ln();
    let mut k = mode;
    while ln_poisson_term(lambda, k) - peak >= limit {
        k += 1;
    }
    k
}

/// `Σ_{k > cutoff} λ^k/k!` relative to `e^λ`, bounded by a geometric series.
fn relative_tail(lambda: f64, cutoff: usize) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    let next = cutoff + 1;
    let ratio = lambda / (next as f64 + 1.0);
    if ratio >= 1.0 {
        return 1.0;
    }
    (ln_poisson_term(lambda, next) - lambda).exp() / (1.0 - ratio)
}

/// Poisson weights of the emission (`q`) and absorption (`r`) ladders, both
/// including the `e^{−λ}` normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSeries {
    pub emission: Vec<f64>,
    pub absorption: Vec<f64>,
    /// Bound on the neglected fraction of the total weight.
    pub tail: f64,
}

impl RateSeries {
    pub fn new(p: &EdmParams) -> Result<Self> {
        p.validate()?;
        let x2 = p.displacement().powi(2);
        let n_t = p.thermal_photons();
        let (lq, lr) = (x2 * (1.0 + n_t), x2 * n_t);
        let (cq, cr) = match p.sum_cutoff {
            Some(c) => (c, c),
            None => (default_cutoff(lq), default_cutoff(lr)),
        };
        let tail = relative_tail(lq, cq) + relative_tail(lr, cr);
        if tail > TAIL_TOLERANCE {
            return Err(Error::SeriesTail {
                cutoff: cq.max(cr),
                tail,
            });
        }
        let weights = |lambda: f64, c: usize| -> Vec<f64> {
            (0..=c).map(|k| (ln_poisson_term(lambda, k) - lambda).exp()).collect()
        };
        Ok(RateSeries {
            emission: weights(lq, cq),
            absorption: weights(lr, cr),
            tail,
        })
    }

    /// `Γ_T(ω)` in units of `ω_d²N/γ`.
    pub fn normalized_rate(&self, omega: f64, omega_c: f64, gamma: f64) -> f64 {
        let hw2 = gamma * gamma / 4.0;
        let mut s = 0.0;
        for (q, wq) in self.emission.iter().enumerate() {
            for (r, wr) in self.absorption.iter().enumerate() {
                if q == 0 && r == 0 {
                    continue;
                }
                let d = omega - omega_c * (q as f64 - r as f64);
                s += wq * wr * hw2 / (d * d + hw2);
            }
        }
        s
    }
}

/// Cooling (`ω > 0`) or heating (`ω < 0`) rate `Γ_T(ω)`.
///
/// The static `q = r = 0` term is excluded; every other pair contributes.
pub fn gamma_t(omega: f64, p: &EdmParams) -> Result<f64> {
    let s = RateSeries::new(p)?;
    Ok(p.rate_unit() * s.normalized_rate(omega, p.omega_c, p.gamma))
}

/// `Γ_T` on a frequency grid, sharing one series.
pub fn gamma_t_grid(omegas: &[f64], p: &EdmParams) -> Result<Vec<f64>> {
    let s = RateSeries::new(p)?;
    let unit = p.rate_unit();
    Ok(omegas
        .iter()
        .map(|w| unit * s.normalized_rate(*w, p.omega_c, p.gamma))
        .collect())
}

/// `Γ_T(ε)` and `Γ_T(−ε)`.
pub fn cooling_heating(p: &EdmParams) -> Result<(f64, f64)> {
    let s = RateSeries::new(p)?;
    let unit = p.rate_unit();
    Ok((
        unit * s.normalized_rate(p.epsilon, p.omega_c, p.gamma),
        unit * s.normalized_rate(-p.epsilon, p.omega_c, p.gamma),
    ))
}

/// `Γ_tot = Γ_T(ε) − Γ_T(−ε)`; negative when heating dominates.
pub fn total_rate(p: &EdmParams) -> Result<f64> {
    let (down, up) = cooling_heating(p)?;
    Ok(down - up)
}

/// Steady-state boson number `N_0 = Γ_T(−ε)/Γ_tot` and the reference
/// `N_T(k ω_c)` at the nearest resonance `k = round(ε/ω_c)`.
pub fn saturation_number(p: &EdmParams) -> Result<(f64, f64)> {
    let (down, up) = cooling_heating(p)?;
    let total = down - up;
    if !(total > 0.0) {
        return Err(Error::NoNetCooling(total));
    }
    let k = (p.epsilon / p.omega_c).round().abs().max(1.0);
    Ok((up / total, bose_occupation(k * p.omega_c, p.temperature)))
}

/// `Ω_(k,k) = ω_d |⟨0|D(x)|k⟩|`.
pub fn resonance_splitting(k: usize, p: &EdmParams) -> f64 {
    p.omega_d * displacement_element(0, k, p.displacement()).abs()
}

/// Regime checks for the adiabatic elimination.
pub fn edm_warnings(p: &EdmParams) -> Vec<Warning> {
    let mut out = Vec::new();
    let k = (p.epsilon / p.omega_c).round().abs() as usize;
    if k >= 1 && p.gamma < resonance_splitting(k, p) {
        out.push(Warning::AdiabaticRegime);
    }
    if p.displacement() < 1.0 {
        out.push(Warning::WeakCoupling);
    }
    out
}

/// Generator of the boson-number populations under `Γ↓ D[b] + Γ↑ D[b†]`;
/// heating out of the top state is dropped so the trace is kept.
pub fn population_generator(down: f64, up: f64, n_boson: usize) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(n_boson, n_boson);
    for n in 0..n_boson {
        let nf = n as f64;
        if n > 0 {
            g[(n - 1, n)] += down * nf;
            g[(n, n)] -= down * nf;
        }
        if n + 1 < n_boson {
            g[(n + 1, n)] += up * (nf + 1.0);
            g[(n, n)] -= up * (nf + 1.0);
        }
    }
    g
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdmEvolution {
    /// Boson-number populations, observable `n` (`⟨b†b⟩`) and trace checks.
    pub trajectory: Trajectory,
    pub cooling: f64,
    pub heating: f64,
    pub warnings: Vec<Warning>,
}

/// Evolves the Fock state `|m0⟩` of the dipole boson under the effective
/// master equation. The coherent part `ε b†b` leaves number states
/// invariant, so only populations move.
pub fn effective_dipole_evolve(p: &EdmParams, m0: usize, times: &[f64]) -> Result<EdmEvolution> {
    p.validate()?;
    if m0 >= p.n_boson {
        return Err(Error::invalid("m0", "must be below n_boson"));
    }
    if times.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("times", "must be finite, ≥ 0 and ascending"));
    }
    let (down, up) = cooling_heating(p)?;
    let gen = population_generator(down, up, p.n_boson);
    let number = DVector::from_fn(p.n_boson, |n, _| n as f64);
    let mut pops = DVector::zeros(p.n_boson);
    pops[m0] = 1.0;

    let mut traj = Trajectory {
        times: times.to_vec(),
        states: Vec::new(),
        observables: vec![(String::from("n"), Vec::with_capacity(times.len()))],
        populations: Vec::with_capacity(times.len()),
        min_eigenvalue: f64::INFINITY,
        max_trace_error: 0.0,
    };
    let mut t_prev = 0.0;
    let mut cache: Option<(u64, DMatrix<f64>)> = None;
    let mut top: f64 = 0.0;
    for &t in times {
        let dt = t - t_prev;
        if dt > 0.0 {
            let key = dt.to_bits();
            if !matches!(&cache, Some((k, _)) if *k == key) {
                let e = expm(&(&gen * dt)).ok_or(Error::Integration {
                    time: t,
                    reason: "population propagator is not finite",
                })?;
                cache = Some((key, e));
            }
            if let Some((_, e)) = &cache {
                pops = e * &pops;
            }
            t_prev = t;
        }
        if pops.iter().any(|v| !v.is_finite()) {
            return Err(Error::Integration {
                time: t,
                reason: "state became non-finite",
            });
        }
        traj.min_eigenvalue = traj.min_eigenvalue.min(pops.min());
        traj.max_trace_error = traj.max_trace_error.max((pops.sum() - 1.0).abs());
        top = top.max(pops[p.n_boson - 1]);
        traj.observables[0].1.push(number.dot(&pops));
        traj.populations.push(pops.iter().copied().collect());
    }
    let mut warnings = edm_warnings(p);
    if top > LEAKAGE_TOLERANCE {
        warnings.push(Warning::TruncationLeakage(top));
    }
    Ok(EdmEvolution {
        trajectory: traj,
        cooling: down,
        heating: up,
        warnings,
    })
}
