//! Thermal linear response: structure factors, impedances and the current
//! transmission of the loaded LC cavity.
//!
//! Impedance prefactors (`ħ`, `Z_LC`, `Z_dip`) are 1; only their ratio
//! enters the transmission, which takes an explicit `Z_LC` for rescaling.
//! Delta functions are broadened into normalized Lorentzians of half-width
//! `η`.

use alloc::vec::Vec;

use num_traits::Float;

use crate::eigen::EigenSystem;
use crate::operators::OperatorMatrix;
use crate::{Error, Result, C64};

/// Lines weaker than this (relative to the prefactor) are dropped.
pub const LINE_WEIGHT_FLOOR: f64 = 1e-14;

/// Largest Boltzmann weight allowed outside the retained levels.
pub const THERMAL_TAIL_LIMIT: f64 = 1e-6;

/// Linewidth used for dipole spectra, in units of `ω_c`.
pub const DIPOLE_LINEWIDTH: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    CavityStructure,
    DipoleStructure,
    Transmission,
    Impedance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid {
    pub omegas: Vec<f64>,
    pub values: Vec<C64>,
    /// Lorentzian half-width.
    pub broadening: f64,
    pub temperature: f64,
    pub kind: SpectrumKind,
}

impl SpectrumGrid {
    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }
}

/// One `n → m` term of a structure factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralLine {
    pub from: usize,
    pub to: usize,
    /// `ω_m − ω_n`; negative for emission.
    pub omega: f64,
    /// `p_n |⟨n|X|m⟩|²` times the structure-factor prefactor.
    pub weight: f64,
}

/// Boltzmann populations of the lowest `m` levels, normalized over all
/// levels of `eig`. Fails if the weight beyond level `m` exceeds
/// [`THERMAL_TAIL_LIMIT`].
pub fn thermal_populations(eig: &EigenSystem, temperature: f64, m: usize) -> Result<Vec<f64>> {
    if !(temperature >= 0.0) || !temperature.is_finite() {
        return Err(Error::invalid("temperature", "must be finite and ≥ 0"));
    }
    let avail = eig.converged_levels.min(eig.dim);
    if m == 0 || m > avail {
        return Err(Error::TooManyLevels {
            requested: m,
            available: avail,
        });
    }
    let f = &eig.frequencies;
    let w: Vec<f64> = if temperature > 0.0 {
        f.iter().map(|w| (-(w - f[0]) / temperature).exp()).collect()
    } else {
        f.iter()
            .enumerate()
            .map(|(i, _)| if i == 0 { 1.0 } else { 0.0 })
            .collect()
    };
    let z: f64 = w.iter().sum();
    let tail = w[m..].iter().sum::<f64>() / z;
    if tail > THERMAL_TAIL_LIMIT {
        return Err(Error::ThermalTail {
            tail,
            limit: THERMAL_TAIL_LIMIT,
        });
    }
    let kept: f64 = w[..m].iter().sum();
    Ok(w[..m].iter().map(|x| x / kept).collect())
}

/// All thermally weighted lines `p_n |⟨n|X|m⟩|²` at `ω_m − ω_n` among the
/// lowest `m` levels, scaled by `prefactor`. Lines below
/// [`LINE_WEIGHT_FLOOR`] are dropped.
pub fn spectral_lines(
    eig: &EigenSystem,
    op: &OperatorMatrix,
    temperature: f64,
    m: usize,
    prefactor: f64,
) -> Result<Vec<SpectralLine>> {
    if op.dim != eig.dim {
        return Err(Error::invalid("operator", "dimension differs from the eigensystem"));
    }
    let p = thermal_populations(eig, temperature, m)?;
    let x = eig.project(op, m);
    let mut lines = Vec::new();
    for n in 0..m {
        if p[n] == 0.0 {
            continue;
        }
        for k in 0..m {
            let weight = prefactor * p[n] * x[(n, k)].norm_sqr();
            if weight > LINE_WEIGHT_FLOOR * prefactor && k != n {
                lines.push(SpectralLine {
                    from: n,
                    to: k,
                    omega: eig.frequencies[k] - eig.frequencies[n],
                    weight,
                });
            }
        }
    }
    Ok(lines)
}

/// `Σ w (η/π) / ((ω − ω_line)² + η²)` on each grid point.
pub fn broaden(lines: &[SpectralLine], omegas: &[f64], eta: f64) -> Result<Vec<f64>> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::invalid("eta", "must be finite and > 0"));
    }
    if omegas.windows(2).any(|w| !(w[1] > w[0])) || omegas.iter().any(|w| !w.is_finite()) {
        return Err(Error::invalid("omegas", "grid must be finite and strictly ascending"));
    }
    let norm = eta / core::f64::consts::PI;
    Ok(omegas
        .iter()
        .map(|w| {
            lines
                .iter()
                .map(|l| l.weight * norm / ((w - l.omega).powi(2) + eta * eta))
                .sum()
        })
        .collect())
}

#[allow(clippy::too_many_arguments)]
fn structure_factor(
    eig: &EigenSystem,
    op: &OperatorMatrix,
    temperature: f64,
    m: usize,
    omegas: &[f64],
    eta: f64,
    prefactor: f64,
    kind: SpectrumKind,
) -> Result<SpectrumGrid> {
    let lines = spectral_lines(eig, op, temperature, m, prefactor)?;
    let values = broaden(&lines, omegas, eta)?;
    Ok(SpectrumGrid {
        omegas: omegas.to_vec(),
        values: values.into_iter().map(|v| C64::new(v, 0.0)).collect(),
        broadening: eta,
        temperature,
        kind,
    })
}

/// `S_c(ω) = Σ p_n |⟨n|a − a†|m⟩|² δ(ω − ω_mn)`; `cavity` is the quadrature.
pub fn cavity_structure_factor(
    eig: &EigenSystem,
    cavity: &OperatorMatrix,
    temperature: f64,
    m: usize,
    omegas: &[f64],
    eta: f64,
) -> Result<SpectrumGrid> {
    structure_factor(
        eig,
        cavity,
        temperature,
        m,
        omegas,
        eta,
        1.0,
        SpectrumKind::CavityStructure,
    )
}

/// `S_dip(ω) = 2 Σ p_n |⟨n|s_x|m⟩|² δ(ω − ω_mn)`.
pub fn dipole_structure_factor(
    eig: &EigenSystem,
    dipole: &OperatorMatrix,
    temperature: f64,
    m: usize,
    omegas: &[f64],
    eta: f64,
) -> Result<SpectrumGrid> {
    structure_factor(
        eig,
        dipole,
        temperature,
        m,
        omegas,
        eta,
        2.0,
        SpectrumKind::DipoleStructure,
    )
}

/// `Z(ω) = −iω S(ω)`, for either structure factor.
pub fn impedance(s: &SpectrumGrid) -> SpectrumGrid {
    SpectrumGrid {
        omegas: s.omegas.clone(),
        values: s
            .omegas
            .iter()
            .zip(&s.values)
            .map(|(w, v)| C64::new(0.0, -w) * v)
            .collect(),
        broadening: s.broadening,
        temperature: s.temperature,
        kind: SpectrumKind::Impedance,
    }
}

/// System impedance of the loaded cavity.
pub fn system_impedance(s_c: &SpectrumGrid) -> SpectrumGrid {
    impedance(s_c)
}

/// Radiation impedance of the dipole.
pub fn radiation_impedance(s_dip: &SpectrumGrid) -> SpectrumGrid {
    impedance(s_dip)
}

/// `T(ω) = Q⁻¹ / (Q⁻¹ + Z_LC / Z_sys(ω))`, with `T = 0` where `Z_sys = 0`.
pub fn transmission_scaled(z_sys: &SpectrumGrid, q: f64, z_lc: f64) -> Result<SpectrumGrid> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::invalid("Q", "must be finite and > 0"));
    }
    if !(z_lc > 0.0) || !z_lc.is_finite() {
        return Err(Error::invalid("Z_LC", "must be finite and > 0"));
    }
    let values = z_sys
        .values
        .iter()
        .map(|z| {
            if *z == C64::new(0.0, 0.0) {
                C64::new(0.0, 0.0)
            } else {
                // Z / (Z + Q Z_LC) avoids dividing by Z
                z / (z + C64::new(q * z_lc, 0.0))
            }
        })
        .collect();
    Ok(SpectrumGrid {
        omegas: z_sys.omegas.clone(),
        values,
        broadening: z_sys.broadening,
        temperature: z_sys.temperature,
        kind: SpectrumKind::Transmission,
    })
}

/// [`transmission_scaled`] with `Z_LC = 1`.
pub fn transmission(z_sys: &SpectrumGrid, q: f64) -> Result<SpectrumGrid> {
    transmission_scaled(z_sys, q, 1.0)
}

/// Uniform grid of `n ≥ 2` points on `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1).max(1) as f64)
        .collect()
}

/// Local maxima of `values` as `(index, value)`, strongest first.
pub fn peaks(values: &[f64]) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > values[i - 1] && values[i] >= values[i + 1])
        .map(|i| (i, values[i]))
        .collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1));
    out
}
