//! Time evolution of the dressed master equation.

use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_traits::Float;

use super::{DressedModel, Liouvillian};
use crate::expm::expm;
use crate::operators::OperatorMatrix;
use crate::{CMatrix, Error, Result, C64};

/// Tolerance on trace, Hermiticity and negativity of a density matrix.
pub const STATE_TOLERANCE: f64 = 1e-8;

/// Largest admissible weight of an initial state outside the retained levels.
pub const PROJECTION_TOLERANCE: f64 = 1e-3;

/// Operator projected onto the retained eigenlevels.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    pub name: String,
    pub matrix: CMatrix,
}

impl Observable {
    pub fn project(name: impl Into<String>, model: &DressedModel, op: &OperatorMatrix, m: usize) -> Self {
        Observable {
            name: name.into(),
            matrix: model.eig.project(op, m),
        }
    }

    /// `Re tr(ρ O)`.
    pub fn expectation(&self, rho: &CMatrix) -> f64 {
        let m = rho.nrows();
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                s += (rho[(i, j)] * self.matrix[(j, i)]).re;
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Density matrices in the retained eigenbasis; empty unless requested.
    pub states: Vec<CMatrix>,
    /// One series per requested observable, in request order.
    pub observables: Vec<(String, Vec<f64>)>,
    /// `populations[t][n]`.
    pub populations: Vec<Vec<f64>>,
    /// Smallest eigenvalue of any `ρ(t)`.
    pub min_eigenvalue: f64,
    /// Largest `|tr ρ(t) − 1|`.
    pub max_trace_error: f64,
}

impl Trajectory {
    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.observables
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s.as_slice())
    }
}

fn hermitian_min_eigenvalue(rho: &CMatrix) -> f64 {
    let h = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

fn validate_state(rho: &CMatrix, m: usize) -> Result<()> {
    if rho.nrows() != m || rho.ncols() != m {
        return Err(Error::invalid("rho0", "shape differs from the retained level count"));
    }
    if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::invalid("rho0", "non-finite entry"));
    }
    let defect = (rho - rho.adjoint()).norm();
    if defect > STATE_TOLERANCE {
        return Err(Error::invalid("rho0", "not Hermitian"));
    }
    if (rho.trace().re - 1.0).abs() > STATE_TOLERANCE {
        return Err(Error::invalid("rho0", "trace differs from 1"));
    }
    if hermitian_min_eigenvalue(rho) < -STATE_TOLERANCE {
        return Err(Error::invalid("rho0", "negative eigenvalue"));
    }
    Ok(())
}

/// Propagates `rho0` to each of `times` (ascending, ≥ 0).
///
/// Populations follow `p(t + Δt) = exp(G Δt) p(t)`, with one matrix
/// exponential per distinct step; coherences are multiplied by their exact
/// exponential factors. Set `keep_states` to store every `ρ(t)`.
pub fn evolve(
    l: &Liouvillian,
    rho0: &CMatrix,
    times: &[f64],
    observables: &[Observable],
    keep_states: bool,
) -> Result<Trajectory> {
    let m = l.dim_levels;
    validate_state(rho0, m)?;
    for o in observables {
        if o.matrix.nrows() != m || o.matrix.ncols() != m {
            return Err(Error::invalid(
                "observable",
                "shape differs from the retained level count",
            ));
        }
    }
    if times.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("times", "must be finite, ≥ 0 and ascending"));
    }
    let g = l.population_generator();
    let mut p = DVector::from_fn(m, |i, _| rho0[(i, i)].re);
    let mut t_prev = 0.0;
    let mut cache: Option<(u64, DMatrix<f64>)> = None;

    let mut out = Trajectory {
        times: times.to_vec(),
        states: Vec::new(),
        observables: observables
            .iter()
            .map(|o| (o.name.clone(), Vec::with_capacity(times.len())))
            .collect(),
        populations: Vec::with_capacity(times.len()),
        min_eigenvalue: f64::INFINITY,
        max_trace_error: 0.0,
    };
    for &t in times {
        let dt = t - t_prev;
        if dt > 0.0 {
            let key = dt.to_bits();
            let hit = matches!(&cache, Some((k, _)) if *k == key);
            if !hit {
                let e = expm(&(&g * dt)).ok_or(Error::Integration {
                    time: t,
                    reason: "population propagator is not finite",
                })?;
                cache = Some((key, e));
            }
            if let Some((_, e)) = &cache {
                p = e * &p;
            }
            t_prev = t;
        }
        let rho = CMatrix::from_fn(m, m, |i, j| {
            if i == j {
                C64::new(p[i], 0.0)
            } else {
                rho0[(i, j)] * (l.coherence_eigenvalue(i, j) * t).exp()
            }
        });
        if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Integration {
                time: t,
                reason: "state became non-finite",
            });
        }
        out.min_eigenvalue = out.min_eigenvalue.min(hermitian_min_eigenvalue(&rho));
        out.max_trace_error = out.max_trace_error.max((p.sum() - 1.0).abs());
        for (o, (_, series)) in observables.iter().zip(out.observables.iter_mut()) {
            series.push(o.expectation(&rho));
        }
        out.populations.push(p.iter().copied().collect());
        if keep_states {
            out.states.push(rho);
        }
    }
    Ok(out)
}

/// `|ψ⟩⟨ψ|` for amplitudes on the retained levels.
pub fn pure_state_density(amplitudes: &DVector<C64>) -> CMatrix {
    amplitudes * amplitudes.adjoint()
}

/// Dipole in `(|↑⟩ + |↓⟩)/√2` (the `s_x = +½` state) with the cavity in
/// vacuum, as a density matrix on the lowest `m` levels of `model`.
///
/// In the polaron frame this is the displaced state `|→⟩ ⊗ D|0⟩` of the
/// laboratory. Fails with [`Error::ProjectionLoss`] if more than
/// [`PROJECTION_TOLERANCE`] of its weight lies above level `m`.
pub fn right_vacuum_state(model: &DressedModel, m: usize) -> Result<CMatrix> {
    let n_fock = model.params.n_fock;
    let mut psi = DVector::<C64>::zeros(model.eig.dim);
    let amp = C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    psi[0] = amp;
    psi[n_fock] = amp;
    if m > model.eig.dim {
        return Err(Error::TooManyLevels {
            requested: m,
            available: model.eig.dim,
        });
    }
    let c = model.eig.coefficients(&psi, m);
    let kept = c.norm_squared();
    let lost = 1.0 - kept;
    if lost > PROJECTION_TOLERANCE {
        return Err(Error::ProjectionLoss { lost });
    }
    Ok(pure_state_density(&(c / C64::new(kept.sqrt(), 0.0))))
}
