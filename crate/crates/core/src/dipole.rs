//! Tilted double-well dipole and its two-level reduction.
//!
//! The potential is `V(x) = −(μ₂²/2)x² + (μ₄⁴/4)x⁴ + qE·x` with `μ₂`, `μ₄`
//! taken literally as shape coefficients. The Schrödinger operator
//! `−(1/2m)d²/dx² + V` is discretized with second-order central differences
//! on `grid_points` interior nodes of `(−x_max, x_max)` with hard walls.

use alloc::vec::Vec;

use num_traits::Float;

use crate::tridiag;
use crate::{Error, Result, Warning};

/// Amplitude at the wall above which `x_max` is reported as too small.
pub const BOUNDARY_TOLERANCE: f64 = 1e-6;

/// Minimum `(E₂ − E₁)/(E₁ − E₀)` for a valid two-level reduction.
pub const GAP_RATIO_THRESHOLD: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellParams {
    pub mu2: f64,
    pub mu4: f64,
    pub qe: f64,
    pub mass: f64,
    pub grid_points: usize,
    pub x_max: f64,
}

impl Default for WellParams {
    fn default() -> Self {
        WellParams {
            mu2: 2.0,
            mu4: 1.0,
            qe: 0.0,
            mass: 1.0,
            grid_points: 40_000,
            x_max: 5.0,
        }
    }
}

impl WellParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("mu2", self.mu2),
            ("mu4", self.mu4),
            ("mass", self.mass),
            ("x_max", self.x_max),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(name, "must be finite and > 0"));
            }
        }
        if !self.qe.is_finite() {
            return Err(Error::invalid("qe", "must be finite"));
        }
        if self.grid_points < 200 {
            return Err(Error::invalid("grid_points", "must be ≥ 200"));
        }
        Ok(())
    }

    pub fn potential(&self, x: f64) -> f64 {
        -0.5 * self.mu2 * self.mu2 * x * x + 0.25 * self.mu4.powi(4) * x.powi(4) + self.qe * x
    }

    pub fn untilted(&self) -> Self {
        WellParams { qe: 0.0, ..*self }
    }

    /// Grid spacing `h = 2 x_max / (grid_points + 1)`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.x_max / (self.grid_points as f64 + 1.0)
    }

    /// Interior grid nodes.
    pub fn grid(&self) -> Vec<f64> {
        let h = self.spacing();
        (1..=self.grid_points).map(|i| -self.x_max + i as f64 * h).collect()
    }
}

/// Lowest eigenpairs of the discretized well.
#[derive(Debug, Clone, PartialEq)]
pub struct WellSpectrum {
    pub x: Vec<f64>,
    pub spacing: f64,
    pub energies: Vec<f64>,
    /// `Σ ψ² h = 1`; each state is positive in its rightmost lobe.
    pub states: Vec<Vec<f64>>,
    pub warnings: Vec<Warning>,
}

impl WellSpectrum {
    /// `⟨i| x |j⟩` on the grid.
    pub fn position_element(&self, i: usize, j: usize) -> f64 {
        self.states[i]
            .iter()
            .zip(&self.states[j])
            .zip(&self.x)
            .map(|((a, b), x)| a * b * x)
            .sum::<f64>()
            * self.spacing
    }
}

/// Lowest `n_levels` eigenpairs of `−(1/2m)d²/dx² + V(x)` with hard walls.
pub fn solve_double_well(p: &WellParams, n_levels: usize) -> Result<WellSpectrum> {
    p.validate()?;
    if n_levels == 0 || n_levels > p.grid_points {
        return Err(Error::invalid("n_levels", "must lie in 1..=grid_points"));
    }
    let x = p.grid();
    let h = p.spacing();
    let kinetic = 1.0 / (2.0 * p.mass * h * h);
    let diag: Vec<f64> = x.iter().map(|&xi| 2.0 * kinetic + p.potential(xi)).collect();
    let off = alloc::vec![-kinetic; p.grid_points - 1];
    let (energies, vectors) = tridiag::lowest_eigenpairs(&diag, &off, n_levels)?;
    let scale = 1.0 / h.sqrt();
    let mut warnings = Vec::new();
    let mut worst_edge: f64 = 0.0;
    let states = vectors
        .into_iter()
        .map(|v| {
            let mut psi: Vec<f64> = v.into_iter().map(|c| c * scale).collect();
            let peak = psi.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            // fix the sign on the rightmost significant amplitude
            if let Some(last) = psi.iter().rev().find(|c| c.abs() > 1e-3 * peak) {
                if *last < 0.0 {
                    psi.iter_mut().for_each(|c| *c = -*c);
                }
            }
            let edge = psi[0].abs().max(psi[psi.len() - 1].abs());
            worst_edge = worst_edge.max(edge);
            psi
        })
        .collect();
    if worst_edge > BOUNDARY_TOLERANCE {
        warnings.push(Warning::BoundaryAmplitude(worst_edge));
    }
    Ok(WellSpectrum {
        x,
        spacing: h,
        energies,
        states,
        warnings,
    })
}

/// Two-level parameters extracted from the untilted well.
#[derive(Debug, Clone, PartialEq)]
pub struct TlaReport {
    pub omega_d: f64,
    pub x_10: f64,
    pub epsilon: f64,
    pub gap_ratio: f64,
    /// Both lowest untilted levels lie below the central barrier `V(0)`.
    pub below_barrier: bool,
    pub valid: bool,
    pub energies: [f64; 3],
    pub warnings: Vec<Warning>,
}

impl TlaReport {
    /// Two-level splitting `√(ω_d² + ε²)`.
    pub fn omega_epsilon(&self) -> f64 {
        self.omega_d.hypot(self.epsilon)
    }
}

/// `ω_d = E₁ − E₀` and `x₁₀` from the untilted well, `ε = 2 qE x₁₀`.
pub fn tla_parameters(p: &WellParams) -> Result<TlaReport> {
    let flat = p.untilted();
    let spec = solve_double_well(&flat, 3)?;
    let e = &spec.energies;
    let omega_d = e[1] - e[0];
    if !(omega_d > 0.0) {
        return Err(Error::EigenFailure(
            "untilted ground doublet is degenerate to machine precision",
        ));
    }
    let x_10 = spec.position_element(1, 0);
    let gap_ratio = (e[2] - e[1]) / omega_d;
    let barrier = flat.potential(0.0);
    let below_barrier = e[0] < barrier && e[1] < barrier;
    Ok(TlaReport {
        omega_d,
        x_10,
        epsilon: 2.0 * p.qe * x_10,
        gap_ratio,
        below_barrier,
        valid: gap_ratio > GAP_RATIO_THRESHOLD && below_barrier,
        energies: [e[0], e[1], e[2]],
        warnings: spec.warnings,
    })
}

/// Bare dipole states `(|L_ε⟩, |R_ε⟩)` with `tan θ_ε = ε/ω_d`, as
/// amplitudes on `(|↑⟩, |↓⟩)`.
pub fn bare_lr_states(omega_d: f64, epsilon: f64) -> ([f64; 2], [f64; 2]) {
    let half = 0.5 * epsilon.atan2(omega_d);
    let (s, c) = (half.sin(), half.cos());
    ([s, c], [c, -s])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec;

    /// Numerov shooting on a fine grid with the same hard walls.
    fn shooting_level(p: &WellParams, nodes: usize, lo: f64, hi: f64, steps: usize) -> f64 {
        let h = 2.0 * p.x_max / steps as f64;
        let end = |e: f64| -> (f64, usize) {
            let k2 = |x: f64| 2.0 * p.mass * (e - p.potential(x));
            let mut x = -p.x_max;
            let (mut y0, mut y1) = (0.0f64, 1e-12f64);
            let mut count = 0;
            for _ in 1..steps {
                let (ka, kb, kc) = (k2(x), k2(x + h), k2(x + 2.0 * h));
                let y2 = (2.0 * y1 * (1.0 - 5.0 * h * h * kb / 12.0) - y0 * (1.0 + h * h * ka / 12.0))
                    / (1.0 + h * h * kc / 12.0);
                if y2 * y1 < 0.0 {
                    count += 1;
                }
                y0 = y1;
                y1 = y2;
                x += h;
                let m = y1.abs().max(y0.abs());
                if m > 1e100 {
                    y0 /= m;
                    y1 /= m;
                }
            }
            (y1, count)
        };
        // bisection on node count, then on the sign of the end value
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if end(mid).1 > nodes {
                b = mid;
            } else {
                a = mid;
            }
        }
        b
    }

    #[test]
    fn shooting_oracle_pure_quartic() {
        let p = WellParams {
            mu2: 1e-4,
            mu4: 1.0,
            qe: 0.0,
            mass: 1.0,
            grid_points: 40_000,
            x_max: 5.0,
        };
        let spec = solve_double_well(&p, 4).unwrap();
        for n in 0..4 {
            let oracle = shooting_level(&p, n, 0.0, 10.0, 20_000);
            let rel = (spec.energies[n] - oracle).abs() / oracle.abs();
            assert!(rel < 1e-6, "level {n}: fd {} vs shooting {oracle}", spec.energies[n]);
        }
    }

    #[test]
    fn symmetric_well_has_parity() {
        let p = WellParams {
            grid_points: 4000,
            ..WellParams::default()
        };
        let spec = solve_double_well(&p, 4).unwrap();
        for n in 0..4 {
            assert!(
                spec.position_element(n, n).abs() < 1e-8,
                "level {n}: {:e} {:?}",
                spec.position_element(n, n),
                spec.energies
            );
            let psi = &spec.states[n];
            let len = psi.len();
            let parity = if n % 2 == 0 { 1.0 } else { -1.0 };
            for i in (0..len / 2).step_by(97) {
                assert!((psi[i] - parity * psi[len - 1 - i]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn normalization_and_orthogonality() {
        let p = WellParams {
            grid_points: 3000,
            ..WellParams::default()
        };
        let spec = solve_double_well(&p, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = spec.states[i]
                    .iter()
                    .zip(&spec.states[j])
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    * spec.spacing;
                assert!((dot - if i == j { 1.0 } else { 0.0 }).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn grid_convergence_at_defaults() {
        let p = WellParams::default();
        let coarse = solve_double_well(&p, 2).unwrap();
        let fine = solve_double_well(
            &WellParams {
                grid_points: 2 * p.grid_points,
                ..p
            },
            2,
        )
        .unwrap();
        for n in 0..2 {
            let rel = (coarse.energies[n] - fine.energies[n]).abs() / fine.energies[n].abs();
            assert!(rel < 1e-7, "level {n}: {rel:e}");
        }
    }

    #[test]
    fn defaults_give_valid_tla() {
        let r = tla_parameters(&WellParams::default()).unwrap();
        assert!(r.omega_d > 0.0);
        assert!(r.valid, "{r:?}");
        assert!(r.x_10 > 0.0);
        assert_eq!(r.epsilon, 0.0);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn tilt_sets_epsilon() {
        let p = WellParams {
            qe: 0.05,
            grid_points: 4000,
            ..WellParams::default()
        };
        let r = tla_parameters(&p).unwrap();
        assert!((r.epsilon - 0.1 * r.x_10).abs() < 1e-15);
    }

    #[test]
    fn tla_splitting_tracks_tilted_solver() {
        let base = WellParams {
            grid_points: 8000,
            ..WellParams::default()
        };
        let flat = tla_parameters(&base).unwrap();
        assert!(flat.valid);
        for ratio in [0.5, 1.0, 2.0, 3.0] {
            let qe = ratio * flat.omega_d / (2.0 * flat.x_10);
            let p = WellParams { qe, ..base };
            let tla = tla_parameters(&p).unwrap();
            let full = solve_double_well(&p, 2).unwrap();
            let exact = full.energies[1] - full.energies[0];
            let rel = (tla.omega_epsilon() - exact).abs() / exact;
            assert!(
                rel < 0.05,
                "ε/ω_d = {ratio}: tla {} vs full {exact}",
                tla.omega_epsilon()
            );
        }
    }

    #[test]
    fn deeper_wells_tunnel_exponentially_slower() {
        // fixed μ₄, growing μ₂/μ₄; x_max grows with the well separation
        let mu4: f64 = 1.6;
        let mut splittings = vec![];
        for r in [2.0, 3.0, 4.0] {
            let mu2 = r * mu4;
            let x_min = mu2 / (mu4 * mu4);
            let p = WellParams {
                mu2,
                mu4,
                x_max: 2.0 * x_min + 1.0,
                grid_points: 8000,
                ..WellParams::default()
            };
            let spec = solve_double_well(&p, 3).unwrap();
            let e = &spec.energies;
            splittings.push(((e[1] - e[0]), e[2] - e[0]));
        }
        for w in splittings.windows(2) {
            assert!(w[1].0 < w[0].0);
            assert!(w[1].0 / w[1].1 < 0.2 * w[0].0 / w[0].1);
        }
        // exponential suppression accelerates with depth
        let l: std::vec::Vec<f64> = splittings.iter().map(|s| (s.0 / s.1).ln()).collect();
        assert!(l[2] - l[1] < l[1] - l[0]);
    }

    #[test]
    fn bare_states_localize_on_opposite_sides() {
        let p = WellParams {
            grid_points: 4000,
            ..WellParams::default()
        };
        let spec = solve_double_well(&p, 2).unwrap();
        let x_10 = spec.position_element(1, 0);
        for eps in [0.3, 1.0, -0.7] {
            let (l, r) = bare_lr_states(1.0, eps);
            // |↓⟩ is the untilted ground state, |↑⟩ the first excited
            let xl = 2.0 * l[0] * l[1] * x_10;
            let xr = 2.0 * r[0] * r[1] * x_10;
            assert!(xl * xr < 0.0);
            assert!((l[0] * l[0] + l[1] * l[1] - 1.0).abs() < 1e-15);
            assert!((l[0] * r[0] + l[1] * r[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(solve_double_well(
            &WellParams {
                grid_points: 100,
                ..WellParams::default()
            },
            2
        )
        .is_err());
        assert!(solve_double_well(
            &WellParams {
                mass: 0.0,
                ..WellParams::default()
            },
            2
        )
        .is_err());
    }

    #[test]
    fn small_box_warns() {
        let p = WellParams {
            x_max: 2.2,
            grid_points: 2000,
            ..WellParams::default()
        };
        let spec = solve_double_well(&p, 2).unwrap();
        assert!(matches!(spec.warnings.as_slice(), [Warning::BoundaryAmplitude(_)]));
    }
}
