//! Hermitian diagonalization with a deterministic phase convention and
//! Fock-truncation auditing.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::operators::{self, ModelParams, OperatorMatrix};
use crate::{CMatrix, Error, Result, C64};

/// Relative Frobenius defect above which input is rejected as non-Hermitian.
pub const HERMITICITY_TOLERANCE: f64 = 1e-10;

/// Levels compared by [`convergence_check`].
pub const AUDITED_LEVELS: usize = 12;

/// Absolute drift below which a level counts as converged.
pub const DRIFT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    /// Ascending eigenfrequencies.
    pub frequencies: Vec<f64>,
    /// Column eigenvectors; the largest-magnitude entry of each column is
    /// real and positive.
    pub vectors: CMatrix,
    pub dim: usize,
    /// Leading levels certified against truncation.
    pub converged_levels: usize,
    /// `max_n ‖H v_n − ω_n v_n‖ / ‖H‖_F`.
    pub max_residual: f64,
}

impl EigenSystem {
    /// `V_M† O V_M` restricted to the lowest `m` levels.
    pub fn project(&self, op: &OperatorMatrix, m: usize) -> CMatrix {
        let v = self.vectors.columns(0, m);
        v.adjoint() * &op.entries * v
    }

    /// Amplitudes `⟨n|ψ⟩` of a state on the lowest `m` levels.
    pub fn coefficients(&self, psi: &nalgebra::DVector<C64>, m: usize) -> nalgebra::DVector<C64> {
        self.vectors.columns(0, m).adjoint() * psi
    }

    /// Restricts certification to levels whose eigenvectors keep weight below
    /// `tol` in the top `edge` photon states of every matter sector.
    pub fn certify_fock_tail(&mut self, matter_dim: usize, n_fock: usize, edge: usize, tol: f64) {
        let edge = edge.clamp(1, n_fock);
        let mut count = 0;
        for n in 0..self.dim {
            let col = self.vectors.column(n);
            let mut tail = 0.0;
            for s in 0..matter_dim {
                for p in n_fock - edge..n_fock {
                    tail += col[s * n_fock + p].norm_sqr();
                }
            }
            if tail > tol {
                break;
            }
            count += 1;
        }
        self.converged_levels = self.converged_levels.min(count);
    }
}

fn fix_phases(vectors: &mut CMatrix) {
    for mut col in vectors.column_iter_mut() {
        let peak = col.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if peak == 0.0 {
            continue;
        }
        // lowest index within rounding of the peak magnitude
        let pivot = col.iter().position(|z| z.norm() >= peak * (1.0 - 1e-12)).unwrap_or(0);
        let z = col[pivot];
        let phase = z.conj() / z.norm();
        for c in col.iter_mut() {
            *c *= phase;
        }
        col[pivot] = C64::new(col[pivot].norm(), 0.0);
    }
}

/// Full sorted eigensystem of a Hermitian operator.
pub fn diagonalize(h: &OperatorMatrix) -> Result<EigenSystem> {
    let defect = h.hermiticity_defect();
    if !(defect <= HERMITICITY_TOLERANCE) {
        return Err(Error::NotHermitian {
            defect,
            tolerance: HERMITICITY_TOLERANCE,
        });
    }
    let dim = h.dim;
    let is_real = h.entries.iter().all(|z| z.im == 0.0);
    let (values, mut vectors): (Vec<f64>, CMatrix) = if is_real {
        let re = DMatrix::<f64>::from_fn(dim, dim, |i, j| 0.5 * (h.entries[(i, j)].re + h.entries[(j, i)].re));
        let eig = re
            .try_symmetric_eigen(f64::EPSILON, 100_000)
            .ok_or(Error::EigenFailure("symmetric QR iteration did not converge"))?;
        (
            eig.eigenvalues.iter().copied().collect(),
            eig.eigenvectors.map(|x| C64::new(x, 0.0)),
        )
    } else {
        let herm = (&h.entries + h.entries.adjoint()).map(|z| z * 0.5);
        let eig = herm
            .try_symmetric_eigen(f64::EPSILON, 100_000)
            .ok_or(Error::EigenFailure("Hermitian QR iteration did not converge"))?;
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenFailure("non-finite eigenvalue"));
    }
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let frequencies: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    vectors = CMatrix::from_fn(dim, dim, |r, c| vectors[(r, order[c])]);
    fix_phases(&mut vectors);

    let norm = h.entries.norm().max(f64::MIN_POSITIVE);
    let hv = &h.entries * &vectors;
    let mut max_residual: f64 = 0.0;
    for (n, w) in frequencies.iter().enumerate() {
        let r = (hv.column(n) - vectors.column(n) * C64::new(*w, 0.0)).norm();
        max_residual = max_residual.max(r / norm);
    }
    if !(max_residual < 1e-9) {
        return Err(Error::EigenFailure("eigenpair residual exceeds 1e-9 ‖H‖"));
    }
    Ok(EigenSystem {
        frequencies,
        vectors,
        dim,
        converged_levels: dim,
        max_residual,
    })
}

/// Per-level drift of the lowest [`AUDITED_LEVELS`] eigenvalues across
/// successive Fock truncations.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub fock_sizes: Vec<usize>,
    /// Eigenvalues per truncation.
    pub levels: Vec<Vec<f64>>,
    /// `drifts[i][n] = |ω_n(fock_sizes[i+1]) − ω_n(fock_sizes[i])|`.
    pub drifts: Vec<Vec<f64>>,
    /// Largest prefix with drift below [`DRIFT_TOLERANCE`] between the two
    /// largest truncations.
    pub converged_levels: usize,
}

/// Lab-frame spectrum drift across `fock_sizes` for the Rabi model
/// (`spin_n = 1`) or the extended Dicke model.
pub fn convergence_check(params: &ModelParams, fock_sizes: &[usize]) -> Result<ConvergenceReport> {
    if fock_sizes.len() < 2 || fock_sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(
            "fock_sizes",
            "need at least two strictly ascending sizes",
        ));
    }
    let mut levels = Vec::with_capacity(fock_sizes.len());
    for &n in fock_sizes {
        let p = params.with_n_fock(n);
        let h = if p.spin_n == 1 {
            operators::build_rabi(&p)?
        } else {
            operators::build_edm(&p)?
        };
        let eig = diagonalize(&h)?;
        levels.push(
            eig.frequencies
                .iter()
                .take(AUDITED_LEVELS)
                .copied()
                .collect::<Vec<f64>>(),
        );
    }
    let drifts: Vec<Vec<f64>> = levels
        .windows(2)
        .map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| (a - b).abs()).collect())
        .collect();
    let last = drifts.last().expect("at least one pair");
    let converged_levels = last.iter().take_while(|d| **d < DRIFT_TOLERANCE).count();
    Ok(ConvergenceReport {
        fock_sizes: fock_sizes.to_vec(),
        levels,
        drifts,
        converged_levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{build_polaron_rabi, build_rabi};

    fn real(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn sorts_diagonal() {
        let h = OperatorMatrix::new(
            CMatrix::from_diagonal(&nalgebra::DVector::from_vec(std::vec![real(3.0), real(1.0), real(2.0)])),
            "d",
        );
        let e = diagonalize(&h).unwrap();
        assert_eq!(e.frequencies, std::vec![1.0, 2.0, 3.0]);
        assert_eq!(e.vectors[(1, 0)], real(1.0));
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::identity(3, 3);
        m[(0, 1)] = real(1.0);
        assert!(matches!(
            diagonalize(&OperatorMatrix::new(m, "x")),
            Err(Error::NotHermitian { .. })
        ));
    }

    fn random_hermitian(n: usize, seed: u64) -> CMatrix {
        let mut state = seed;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let a = CMatrix::from_fn(n, n, |_, _| C64::new(next(), next()));
        (&a + a.adjoint()).map(|z| z * 0.5)
    }

    #[test]
    fn reconstructs_random_hermitian() {
        let h = random_hermitian(50, 7);
        let e = diagonalize(&OperatorMatrix::new(h.clone(), "r")).unwrap();
        let lambda = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            50,
            e.frequencies.iter().map(|w| real(*w)),
        ));
        let rebuilt = &e.vectors * lambda * e.vectors.adjoint();
        assert!((rebuilt - &h).norm() < 1e-10 * h.norm());
        let gram = e.vectors.adjoint() * &e.vectors;
        assert!((gram - CMatrix::identity(50, 50)).norm() < 1e-10);
        assert!(e.frequencies.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn phase_convention_is_deterministic() {
        let h = OperatorMatrix::new(random_hermitian(30, 11), "r");
        let a = diagonalize(&h).unwrap();
        let b = diagonalize(&h).unwrap();
        assert_eq!(a.vectors, b.vectors);
        for col in a.vectors.column_iter() {
            let peak = col.iter().fold(0.0f64, |m, z| m.max(z.norm()));
            let pivot = col.iter().position(|z| z.norm() >= peak * (1.0 - 1e-12)).unwrap();
            assert!(col[pivot].im == 0.0 && col[pivot].re > 0.0);
        }
    }

    #[test]
    fn uncoupled_rabi_ladder() {
        let p = ModelParams::rabi(0.0, 0.0).with_n_fock(10);
        let e = diagonalize(&build_rabi(&p).unwrap()).unwrap();
        let mut expect: std::vec::Vec<f64> = (0..10).flat_map(|n| [n as f64 - 0.5, n as f64 + 0.5]).collect();
        expect.sort_by(f64::total_cmp);
        for (a, b) in e.frequencies.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn uncoupled_tilted_splitting() {
        let p = ModelParams {
            omega_c: 3.0,
            ..ModelParams::rabi(0.0, 0.75).with_n_fock(6)
        };
        let e = diagonalize(&build_rabi(&p).unwrap()).unwrap();
        assert!((e.frequencies[1] - e.frequencies[0] - 1.0f64.hypot(0.75)).abs() < 1e-12);
    }

    #[test]
    fn polaron_and_lab_spectra_agree() {
        for &(g, eps) in &[(3.0, 0.0), (3.5, 4.0), (2.0, 1.0), (1.0, -2.5)] {
            let p = ModelParams::rabi(g, eps).with_n_fock(90);
            let lab = diagonalize(&build_rabi(&p).unwrap()).unwrap();
            let pol = diagonalize(&build_polaron_rabi(&p).unwrap()).unwrap();
            for n in 0..10 {
                let shift = operators::polaron_energy_shift(&p);
                let d = (lab.frequencies[n] - (pol.frequencies[n] + shift)).abs();
                assert!(d < 1e-6, "g={g} ε={eps} level {n}: {d:e}");
            }
        }
    }

    #[test]
    fn convergence_uncoupled_and_usc() {
        let r = convergence_check(&ModelParams::rabi(0.0, 0.0), &[12, 16]).unwrap();
        assert_eq!(r.converged_levels, AUDITED_LEVELS);
        let r = convergence_check(&ModelParams::rabi(3.0, 0.0), &[80, 100]).unwrap();
        assert!(r.converged_levels >= 10, "{:?}", r.drifts);
        assert!(convergence_check(&ModelParams::rabi(1.0, 0.0), &[20]).is_err());
    }

    #[test]
    fn required_truncation_grows_with_coupling() {
        // smallest size in the scan that certifies ten levels against +20 states
        let needed = |g: f64| {
            (20..=120)
                .step_by(10)
                .find(|&n| {
                    convergence_check(&ModelParams::rabi(g, 0.0), &[n, n + 20])
                        .unwrap()
                        .converged_levels
                        >= 10
                })
                .unwrap()
        };
        let (a, b, c) = (needed(1.0), needed(2.5), needed(3.5));
        assert!(a <= b && b <= c && a < c, "{a} {b} {c}");
        assert!(c as f64 <= 4.0 * 3.5 * 3.5 + 40.0);
    }

    #[test]
    fn fock_tail_certification() {
        let p = ModelParams::rabi(3.0, 0.0).with_n_fock(40);
        let mut e = diagonalize(&build_rabi(&p).unwrap()).unwrap();
        e.certify_fock_tail(2, 40, 4, 1e-12);
        assert!(e.converged_levels < e.dim);
        assert!(e.converged_levels > 0);
    }
}
