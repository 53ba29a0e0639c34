//! Generalized rotating-wave approximation of the polaron Rabi model.
//!
//! In the polaron frame the Hamiltonian is nearly block diagonal. At
//! `ε = 0` the blocks are spanned by `{|↓,n⟩, |↑,n−1⟩}`; near the
//! k-resonance `ε ≈ kω_c` they are spanned by `{|←,n⟩, |→,n−k⟩}` in the
//! `s_x` basis. All closed forms here use `x = g/ω_c`.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::master::{BathSpec, Channel};
use crate::operators::ModelParams;
use crate::special::{displacement_element, laguerre, ln_factorial};
use crate::{Error, Result, Warning};

/// Detuning below which a k-resonance block is treated as exactly resonant.
pub const RESONANCE_TOLERANCE: f64 = 1e-9;

fn renormalized_drive(params: &ModelParams) -> f64 {
    let x = params.displacement();
    0.5 * params.omega_d * (-0.5 * x * x).exp()
}

/// Entries of the `ε = 0` block `[[A, C], [C, B]]` in the basis
/// `(|↓,n⟩, |↑,n−1⟩)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockCoefficients {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Eigenpair of one symmetric block with its half-angle Hopfield
/// coefficients: `|+,n⟩ = cos|↓,n⟩ + sin|↑,n−1⟩`,
/// `|−,n⟩ = −sin|↓,n⟩ + cos|↑,n−1⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedPair {
    pub n: usize,
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub cos_half: f64,
    pub sin_half: f64,
}

fn require_symmetric(params: &ModelParams) -> Result<()> {
    params.validate()?;
    if params.epsilon != 0.0 {
        return Err(Error::invalid("epsilon", "symmetric gRWA needs ε = 0"));
    }
    Ok(())
}

/// `A_n`, `B_n`, `C_n` for block `n ≥ 1`.
pub fn symmetric_block(n: usize, params: &ModelParams) -> Result<BlockCoefficients> {
    require_symmetric(params)?;
    if n == 0 {
        return Err(Error::invalid("n", "blocks start at n = 1"));
    }
    let x = params.displacement();
    let w = renormalized_drive(params);
    let x2 = x * x;
    let ratio = (ln_factorial(n - 1) - ln_factorial(n)).exp().sqrt();
    Ok(BlockCoefficients {
        n,
        a: params.omega_c * n as f64 - w * laguerre(n, 0, x2),
        b: params.omega_c * (n - 1) as f64 + w * laguerre(n - 1, 0, x2),
        c: x * w * ratio * laguerre(n - 1, 1, x2),
    })
}

/// Eigenvalues of `[[A, C], [C, B]]` in the printed form, with half-angle
/// coefficients chosen non-negative for `C ≥ 0`.
pub fn block_eigen(a: f64, b: f64, c: f64) -> (f64, f64, f64, f64) {
    let mean = 0.5 * (a + b);
    let root = (0.25 * (a + b) * (a + b) + c * c - a * b).max(0.0).sqrt();
    let diff = a - b;
    let norm = (diff * diff + 4.0 * c * c).sqrt();
    let (cos, sin) = if norm == 0.0 {
        (core::f64::consts::FRAC_1_SQRT_2, core::f64::consts::FRAC_1_SQRT_2)
    } else {
        (
            (0.5 * (1.0 + diff / norm)).max(0.0).sqrt(),
            (0.5 * (1.0 - diff / norm))
                .max(0.0)
                .sqrt()
                .copysign(if c < 0.0 { -1.0 } else { 1.0 }),
        )
    };
    (mean + root, mean - root, cos, sin)
}

pub fn symmetric_pair(n: usize, params: &ModelParams) -> Result<DressedPair> {
    let blk = symmetric_block(n, params)?;
    let (plus, minus, cos, sin) = block_eigen(blk.a, blk.b, blk.c);
    Ok(DressedPair {
        n,
        omega_plus: plus,
        omega_minus: minus,
        cos_half: cos,
        sin_half: sin,
    })
}

/// `Warning::GrwaDetuning` when `ω_d` exceeds `ω_c`.
pub fn symmetric_warnings(params: &ModelParams) -> Vec<Warning> {
    if params.omega_d > params.omega_c {
        vec![Warning::GrwaDetuning]
    } else {
        Vec::new()
    }
}

/// Ground frequency `−√(ε² + ω_d² e^{−x²})/2`, including the tilt of the
/// dipole axis by the diagonal displacement element.
pub fn ground_energy(params: &ModelParams) -> f64 {
    let x = params.displacement();
    -0.5 * (params.epsilon * params.epsilon + params.omega_d * params.omega_d * (-x * x).exp()).sqrt()
}

/// Lowest `count` levels at `ε = 0`: the polaron vacuum and `ω_{±,n}`.
pub fn symmetric_levels(params: &ModelParams, count: usize) -> Result<Vec<f64>> {
    require_symmetric(params)?;
    let mut levels = vec![ground_energy(params)];
    // blocks above n = count + 2 lie above the lowest `count` levels
    for n in 1..=count + 2 {
        let p = symmetric_pair(n, params)?;
        levels.push(p.omega_plus);
        levels.push(p.omega_minus);
    }
    levels.sort_by(f64::total_cmp);
    levels.truncate(count);
    Ok(levels)
}

/// Signed multi-photon Rabi frequency
/// `Ω_(k,n) = ω_d x^k e^{−x²/2} L_{n−k}^{(k)}(x²) √((n−k)!/n!)`.
pub fn rabi_frequency(k: usize, n: usize, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    if k == 0 || n < k {
        return Err(Error::invalid("k, n", "need n ≥ k ≥ 1"));
    }
    Ok(params.omega_d * displacement_element(n - k, n, params.displacement()))
}

/// One `{|←,n⟩, |→,n−k⟩}` block near `ε = kω_c`, with
/// `|+⟩ = cos|←,n⟩ + sin|→,n−k⟩` and `|−⟩ = −sin|←,n⟩ + cos|→,n−k⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KResonanceBlock {
    pub k: usize,
    pub n: usize,
    /// `ω_c k − ε`.
    pub detuning: f64,
    /// `Ω_(k,n)`.
    pub coupling: f64,
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub cos_half: f64,
    pub sin_half: f64,
    /// Set when the polaron coupling is not perturbative.
    pub warning: Option<Warning>,
}

impl KResonanceBlock {
    pub fn splitting(&self) -> f64 {
        self.omega_plus - self.omega_minus
    }

    /// `⟨+|s_x|−⟩ = cos·sin`, the only off-diagonal dipole element.
    pub fn sx_element(&self) -> f64 {
        self.cos_half * self.sin_half
    }
}

/// Whether `ε, ω_c > ω_d e^{−x²/2}`.
pub fn k_resonance_valid(params: &ModelParams) -> bool {
    let scale = 2.0 * renormalized_drive(params);
    params.epsilon > scale && params.omega_c > scale
}

pub fn k_resonance_block(k: usize, n: usize, params: &ModelParams) -> Result<KResonanceBlock> {
    let coupling = rabi_frequency(k, n, params)?;
    let detuning = params.omega_c * k as f64 - params.epsilon;
    let centre = params.omega_c * (n as f64 - 0.5 * k as f64);
    let half = 0.5 * (detuning * detuning + coupling * coupling).sqrt();
    let (cos, sin) = if detuning.abs() < RESONANCE_TOLERANCE * params.omega_c {
        (core::f64::consts::FRAC_1_SQRT_2, core::f64::consts::FRAC_1_SQRT_2)
    } else {
        // |←,n⟩ sits at centre + δ/2
        let (_, _, c, s) = block_eigen(0.5 * detuning, -0.5 * detuning, 0.5 * coupling.abs());
        (c, s)
    };
    Ok(KResonanceBlock {
        k,
        n,
        detuning,
        coupling,
        omega_plus: centre + half,
        omega_minus: centre - half,
        cos_half: cos,
        sin_half: sin,
        warning: if k_resonance_valid(params) {
            None
        } else {
            Some(Warning::GrwaValidity)
        },
    })
}

/// Lowest `count` levels near the k-resonance: the tilted ground state,
/// the unpaired `|←,n⟩` with `n < k`, and the dressed pairs of every block.
pub fn k_resonance_levels(k: usize, params: &ModelParams, count: usize) -> Result<Vec<f64>> {
    params.validate()?;
    if k == 0 {
        return Err(Error::invalid("k", "must be ≥ 1"));
    }
    let mut levels = vec![ground_energy(params)];
    for n in 1..k {
        levels.push(params.omega_c * n as f64 - 0.5 * params.epsilon);
    }
    for n in k..k + count + 2 {
        let b = k_resonance_block(k, n, params)?;
        levels.push(b.omega_plus);
        levels.push(b.omega_minus);
    }
    levels.sort_by(f64::total_cmp);
    levels.truncate(count);
    Ok(levels)
}

/// Matrix elements between neighbouring symmetric blocks `n` and `n − 1`
/// (`n ≥ 2`) and from the ground state to block 1, in the phase convention
/// of [`DressedPair`].
///
/// Cavity elements are of `a† − a`; dipole elements of `s_x`. The ground
/// rows of `s_x` carry the spin-½ factor `½`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedElements {
    pub n: usize,
    /// `⟨+,n|·|−,n−1⟩`, `⟨−,n|·|+,n−1⟩`, `⟨+,n|·|+,n−1⟩`, `⟨−,n|·|−,n−1⟩`.
    pub cavity: [f64; 4],
    pub dipole: [f64; 4],
    /// `⟨↓,0|·|+,1⟩`, `⟨↓,0|·|−,1⟩`.
    pub ground_cavity: [f64; 2],
    pub ground_dipole: [f64; 2],
}

pub fn dressed_matrix_elements(n: usize, params: &ModelParams) -> Result<DressedElements> {
    if n < 2 {
        return Err(Error::invalid("n", "neighbouring blocks need n ≥ 2"));
    }
    let hi = symmetric_pair(n, params)?;
    let lo = symmetric_pair(n - 1, params)?;
    let one = symmetric_pair(1, params)?;
    let (cn, sn, cl, sl) = (hi.cos_half, hi.sin_half, lo.cos_half, lo.sin_half);
    let (rn, rl) = ((n as f64).sqrt(), ((n - 1) as f64).sqrt());
    Ok(DressedElements {
        n,
        cavity: [
            rl * cl * sn - rn * cn * sl,
            rl * sl * cn - rn * sn * cl,
            rl * sl * sn + rn * cn * cl,
            rl * cl * cn + rn * sn * sl,
        ],
        dipole: [-0.5 * sl * sn, 0.5 * cl * cn, 0.5 * cl * sn, -0.5 * sl * cn],
        ground_cavity: [one.cos_half, -one.sin_half],
        ground_dipole: [0.5 * one.sin_half, 0.5 * one.cos_half],
    })
}

/// Amplitudes of a symmetric dressed state on the polaron basis
/// `index = matter·n_fock + photon` (`↑` is matter index 0).
pub fn symmetric_state(n: usize, plus: bool, params: &ModelParams) -> Result<Vec<f64>> {
    let nf = params.n_fock;
    if n > nf.saturating_sub(1) {
        return Err(Error::invalid("n", "block exceeds the Fock truncation"));
    }
    let mut v = vec![0.0; 2 * nf];
    if n == 0 {
        v[nf] = 1.0;
        return Ok(v);
    }
    let p = symmetric_pair(n, params)?;
    let (down, up) = if plus {
        (p.cos_half, p.sin_half)
    } else {
        (-p.sin_half, p.cos_half)
    };
    v[nf + n] = down;
    v[n - 1] = up;
    Ok(v)
}

/// Branch of a dressed level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// A relaxation rate between symmetric dressed levels `(from, n) → (to, n−1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitRate {
    pub channel: Channel,
    pub from: (Branch, usize),
    pub to: (Branch, usize),
    /// Rate from the gRWA frequencies and matrix elements.
    pub grwa: f64,
    /// Value for `g/ω_c → ∞`.
    pub limit: f64,
}

/// Intra-branch cavity rates and the inter-branch dipole rate for blocks
/// `2..=n_max`, both from the gRWA and in the deep-coupling limit.
///
/// In that limit `|+,n⟩ → |↓,n⟩` and `|−,n⟩ → |↑,n−1⟩`, so the cavity
/// rates tend to `J(ω_c)·n` and `J(ω_c)·(n−1)` while the dipole
/// cross-branch rate vanishes with its transition frequency.
pub fn usc_rate_limits(params: &ModelParams, baths: &[BathSpec], n_max: usize) -> Result<Vec<LimitRate>> {
    let mut out = Vec::new();
    for n in 2..=n_max {
        let el = dressed_matrix_elements(n, params)?;
        let hi = symmetric_pair(n, params)?;
        let lo = symmetric_pair(n - 1, params)?;
        for bath in baths {
            bath.validate()?;
            match bath.channel {
                Channel::Cavity => {
                    let pp = bath.spectral_density(hi.omega_plus - lo.omega_plus);
                    let mm = bath.spectral_density(hi.omega_minus - lo.omega_minus);
                    let j = bath.spectral_density(params.omega_c);
                    out.push(LimitRate {
                        channel: Channel::Cavity,
                        from: (Branch::Plus, n),
                        to: (Branch::Plus, n - 1),
                        grwa: pp * el.cavity[2] * el.cavity[2],
                        limit: j * n as f64,
                    });
                    out.push(LimitRate {
                        channel: Channel::Cavity,
                        from: (Branch::Minus, n),
                        to: (Branch::Minus, n - 1),
                        grwa: mm * el.cavity[3] * el.cavity[3],
                        limit: j * (n - 1) as f64,
                    });
                }
                Channel::Dipole => {
                    let mp = bath.spectral_density(hi.omega_minus - lo.omega_plus);
                    out.push(LimitRate {
                        channel: Channel::Dipole,
                        from: (Branch::Minus, n),
                        to: (Branch::Plus, n - 1),
                        grwa: mp * el.dipole[1] * el.dipole[1],
                        limit: 0.0,
                    });
                }
            }
        }
    }
    Ok(out)
}
