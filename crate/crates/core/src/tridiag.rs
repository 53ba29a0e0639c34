//! Lowest eigenpairs of a real symmetric tridiagonal matrix by Sturm
//! bisection and inverse iteration.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::{Error, Result};

/// Number of eigenvalues strictly below `x`.
fn sturm_count(diag: &[f64], off2: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let prev = if q == 0.0 {
            f64::EPSILON * (off2[i - 1].sqrt() + 1.0)
        } else {
            q
        };
        q = diag[i] - x - off2[i - 1] / prev;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin bounds of the spectrum.
fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (lo, hi)
}

/// Lowest `k` eigenvalues in ascending order.
pub(crate) fn lowest_eigenvalues(diag: &[f64], off: &[f64], k: usize) -> Vec<f64> {
    let off2: Vec<f64> = off.iter().map(|e| e * e).collect();
    let (lo, hi) = gershgorin(diag, off);
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let mut out = Vec::with_capacity(k);
    let mut floor = lo;
    for j in 0..k {
        let (mut a, mut b) = (floor, hi);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if b - a <= 2.0 * f64::EPSILON * (a.abs().max(b.abs())) + f64::MIN_POSITIVE * scale {
                break;
            }
            if sturm_count(diag, &off2, mid) > j {
                b = mid;
            } else {
                a = mid;
            }
        }
        let value = 0.5 * (a + b);
        out.push(value);
        floor = a;
    }
    out
}

/// Solves `(T − λ) y = rhs` in place with partial pivoting.
fn shifted_solve(diag: &[f64], off: &[f64], lambda: f64, rhs: &mut [f64]) {
    let n = diag.len();
    let tiny = f64::EPSILON * gershgorin(diag, off).1.abs().max(1.0);
    // LU with row interchanges; U has up to two superdiagonals
    let mut u0: Vec<f64> = diag.iter().map(|d| d - lambda).collect();
    let mut u1: Vec<f64> = off.to_vec();
    u1.push(0.0);
    let mut u2 = vec![0.0; n];
    let mut lower = vec![0.0; n];
    let mut swapped = vec![false; n];
    let mut sub: Vec<f64> = off.to_vec();
    for i in 0..n.saturating_sub(1) {
        if u0[i].abs() >= sub[i].abs() {
            if u0[i] == 0.0 {
                u0[i] = tiny;
            }
            let l = sub[i] / u0[i];
            lower[i] = l;
            u0[i + 1] -= l * u1[i];
        } else {
            swapped[i] = true;
            let l = u0[i] / sub[i];
            lower[i] = l;
            u0[i] = sub[i];
            let t = u1[i];
            u1[i] = u0[i + 1];
            u0[i + 1] = t - l * u0[i + 1];
            if i + 1 < n - 1 {
                u2[i] = u1[i + 1];
                u1[i + 1] *= -l;
            }
        }
        sub[i] = 0.0;
    }
    if u0[n - 1].abs() < tiny {
        u0[n - 1] = tiny.copysign(u0[n - 1]);
    }
    for i in 0..n.saturating_sub(1) {
        if swapped[i] {
            rhs.swap(i, i + 1);
        }
        rhs[i + 1] -= lower[i] * rhs[i];
    }
    for i in (0..n).rev() {
        let mut s = rhs[i];
        if i + 1 < n {
            s -= u1[i] * rhs[i + 1];
        }
        if i + 2 < n {
            s -= u2[i] * rhs[i + 2];
        }
        let p = if u0[i] == 0.0 { tiny } else { u0[i] };
        rhs[i] = s / p;
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

fn residual(diag: &[f64], off: &[f64], lambda: f64, v: &[f64]) -> f64 {
    let n = diag.len();
    let mut r2 = 0.0;
    for i in 0..n {
        let mut s = (diag[i] - lambda) * v[i];
        if i > 0 {
            s += off[i - 1] * v[i - 1];
        }
        if i + 1 < n {
            s += off[i] * v[i + 1];
        }
        r2 += s * s;
    }
    r2.sqrt()
}

/// Lowest `k` eigenpairs; vectors are unit-norm in the Euclidean sense.
pub(crate) fn lowest_eigenpairs(diag: &[f64], off: &[f64], k: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = diag.len();
    if k == 0 || k > n || off.len() + 1 != n {
        return Err(Error::EigenFailure("tridiagonal problem has inconsistent sizes"));
    }
    let values = lowest_eigenvalues(diag, off, k);
    let (lo, hi) = gershgorin(diag, off);
    let norm = lo.abs().max(hi.abs());
    // eigenvalues closer than this share a cluster and are reorthogonalized
    let cluster = 1e-3 * norm;
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    for (j, &lambda) in values.iter().enumerate() {
        // deterministic, non-symmetric start vector
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + ((i * 7919 + j * 104_729) % 1013) as f64 / 1013.0)
            .collect();
        normalize(&mut v);
        let mut ok = false;
        for step in 0..10 {
            shifted_solve(diag, off, lambda, &mut v);
            for (i, prev) in vectors.iter().enumerate() {
                if (values[i] - lambda).abs() < cluster {
                    let dot: f64 = prev.iter().zip(&v).map(|(a, b)| a * b).sum();
                    v.iter_mut().zip(prev).for_each(|(x, p)| *x -= dot * p);
                }
            }
            if normalize(&mut v) == 0.0 {
                return Err(Error::EigenFailure("inverse iteration collapsed"));
            }
            // one solve from a generic start leaves O(ε‖T‖/gap) admixtures
            if step >= 2 && residual(diag, off, lambda, &v) < 1e-10 * norm.max(1.0) {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::EigenFailure("inverse iteration did not converge"));
        }
        vectors.push(v);
    }
    Ok((values, vectors))
}
