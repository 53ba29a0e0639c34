//! Truncated Fock/spin operators and the model Hamiltonians.

use alloc::format;
use alloc::string::{String, ToString};

use num_traits::Float;

use crate::special;
use crate::{CMatrix, Error, Result, C64};

pub use crate::special::{displacement_element, laguerre};

/// Largest Hilbert-space dimension the builders accept by default.
pub const DEFAULT_MAX_DIM: usize = 2048;

/// Parameters of the cavity–dipole model, in units of a base frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub omega_c: f64,
    pub omega_d: f64,
    pub g: f64,
    pub epsilon: f64,
    /// Photon states `0..n_fock`.
    pub n_fock: usize,
    /// The dipole is a spin `N/2`; `N = 1` is the Rabi model.
    pub spin_n: usize,
}

impl ModelParams {
    /// Resonant Rabi model (`ω_c = ω_d = 1`) with the default truncation.
    pub fn rabi(g: f64, epsilon: f64) -> Self {
        ModelParams {
            omega_c: 1.0,
            omega_d: 1.0,
            g,
            epsilon,
            n_fock: default_n_fock(g, 1.0),
            spin_n: 1,
        }
    }

    pub fn with_n_fock(mut self, n_fock: usize) -> Self {
        self.n_fock = n_fock;
        self
    }

    /// `g/ω_c`, the displacement of the polaron frame.
    pub fn displacement(&self) -> f64 {
        self.g / self.omega_c
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_c > 0.0) {
            return Err(Error::invalid("omega_c", "must be > 0"));
        }
        if !(self.omega_d > 0.0) {
            return Err(Error::invalid("omega_d", "must be > 0"));
        }
        if !(self.g >= 0.0) || !self.g.is_finite() {
            return Err(Error::invalid("g", "must be finite and ≥ 0"));
        }
        if !self.epsilon.is_finite() {
            return Err(Error::invalid("epsilon", "must be finite"));
        }
        if self.n_fock < 2 {
            return Err(Error::invalid("n_fock", "must be ≥ 2"));
        }
        if self.spin_n < 1 {
            return Err(Error::invalid("spin_n", "must be ≥ 1"));
        }
        Ok(())
    }

    fn require_two_level(&self) -> Result<()> {
        if self.spin_n != 1 {
            return Err(Error::invalid(
                "spin_n",
                format!("the Rabi builders need spin_n = 1, got {}", self.spin_n),
            ));
        }
        Ok(())
    }
}

/// Default photon truncation `ceil(4 (g/ω_c)² + 40)`.
pub fn default_n_fock(g: f64, omega_c: f64) -> usize {
    let x = g / omega_c;
    (4.0 * x * x + 40.0).ceil() as usize
}

/// Dense complex square operator with a provenance label.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub dim: usize,
    pub entries: CMatrix,
    pub label: String,
}

impl OperatorMatrix {
    pub fn new(entries: CMatrix, label: impl Into<String>) -> Self {
        assert!(entries.is_square(), "operator matrices are square");
        OperatorMatrix {
            dim: entries.nrows(),
            entries,
            label: label.into(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        OperatorMatrix::new(CMatrix::identity(dim, dim), "1")
    }

    pub fn dagger(&self) -> Self {
        OperatorMatrix::new(self.entries.adjoint(), format!("({})†", self.label))
    }

    /// `self ⊗ other` with `self` as the slow index.
    pub fn kron(&self, other: &OperatorMatrix) -> Self {
        OperatorMatrix::new(
            self.entries.kronecker(&other.entries),
            format!("{}⊗{}", self.label, other.label),
        )
    }

    /// `‖H − H†‖_F / ‖H‖_F` (zero for the zero matrix).
    pub fn hermiticity_defect(&self) -> f64 {
        let norm = self.entries.norm();
        if norm == 0.0 {
            return 0.0;
        }
        (&self.entries - self.entries.adjoint()).norm() / norm
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn check_dim(dim: usize, cap: usize) -> Result<()> {
    if dim > cap {
        return Err(Error::DimensionCap { dim, cap });
    }
    Ok(())
}

/// Annihilation and creation operators on photon states `0..n_fock`.
pub fn fock_ladder(n_fock: usize) -> Result<(OperatorMatrix, OperatorMatrix)> {
    if n_fock < 2 {
        return Err(Error::invalid("n_fock", "must be ≥ 2"));
    }
    let mut a = CMatrix::zeros(n_fock, n_fock);
    for n in 1..n_fock {
        a[(n - 1, n)] = real((n as f64).sqrt());
    }
    let a = OperatorMatrix::new(a, "a");
    let a_dag = a.dagger().relabel("a†");
    Ok((a, a_dag))
}

/// Number operator `a†a` on photon states `0..n_fock`.
pub fn number_operator(n_fock: usize) -> OperatorMatrix {
    OperatorMatrix::new(
        CMatrix::from_fn(
            n_fock,
            n_fock,
            |i, j| if i == j { real(i as f64) } else { C64::new(0.0, 0.0) },
        ),
        "a†a",
    )
}

/// Spin-`N/2` operators `(S_x, S_y, S_z)` in the basis `m = N/2, N/2 − 1, …, −N/2`.
pub fn spin_operators(spin_n: usize) -> Result<(OperatorMatrix, OperatorMatrix, OperatorMatrix)> {
    if spin_n < 1 {
        return Err(Error::invalid("spin_n", "must be ≥ 1"));
    }
    let dim = spin_n + 1;
    let j = spin_n as f64 / 2.0;
    // S+ raises m: entry (i-1, i) with m = j - i
    let mut plus = CMatrix::zeros(dim, dim);
    for i in 1..dim {
        let m = j - i as f64;
        plus[(i - 1, i)] = real((j * (j + 1.0) - m * (m + 1.0)).sqrt());
    }
    let minus = plus.adjoint();
    let sx = (&plus + &minus).map(|z| z * 0.5);
    let sy = (&plus - &minus).map(|z| z * C64::new(0.0, -0.5));
    let sz = CMatrix::from_fn(
        dim,
        dim,
        |r, c| {
            if r == c {
                real(j - r as f64)
            } else {
                C64::new(0.0, 0.0)
            }
        },
    );
    Ok((
        OperatorMatrix::new(sx, "S_x"),
        OperatorMatrix::new(sy, "S_y"),
        OperatorMatrix::new(sz, "S_z"),
    ))
}

/// Truncated matrix of `D(x) = exp[x(a − a†)]` built from the Laguerre closed form.
pub fn displacement_matrix(n_fock: usize, x: f64) -> OperatorMatrix {
    OperatorMatrix::new(
        CMatrix::from_fn(n_fock, n_fock, |n, m| real(special::displacement_element(n, m, x))),
        format!("D({x})"),
    )
}

/// Cavity quadrature `a − a†` embedded in the `(matter ⊗ photon)` space.
pub fn cavity_quadrature(matter_dim: usize, n_fock: usize) -> Result<OperatorMatrix> {
    let (a, a_dag) = fock_ladder(n_fock)?;
    let q = OperatorMatrix::new(&a.entries - &a_dag.entries, "a−a†");
    Ok(OperatorMatrix::identity(matter_dim).kron(&q).relabel("a−a†"))
}

/// Photon number `a†a` embedded in the `(matter ⊗ photon)` space.
pub fn photon_number(matter_dim: usize, n_fock: usize) -> OperatorMatrix {
    OperatorMatrix::identity(matter_dim)
        .kron(&number_operator(n_fock))
        .relabel("a†a")
}

/// Dipole operator `S_x` embedded in the `(spin ⊗ photon)` space.
pub fn dipole_sx(spin_n: usize, n_fock: usize) -> Result<OperatorMatrix> {
    let (sx, _, _) = spin_operators(spin_n)?;
    Ok(sx.kron(&OperatorMatrix::identity(n_fock)).relabel("s_x"))
}

/// Quantum Rabi Hamiltonian `ω_c a†a + ω_d s_z + ε s_x + g(a + a†)s_x`.
pub fn build_rabi(params: &ModelParams) -> Result<OperatorMatrix> {
    params.validate()?;
    params.require_two_level()?;
    let h = spin_cavity_hamiltonian(params, false)?;
    Ok(h.relabel(format!(
        "H_Rabi(wc={}, wd={}, g={}, eps={}, n_fock={})",
        params.omega_c, params.omega_d, params.g, params.epsilon, params.n_fock
    )))
}

/// Extended Dicke Hamiltonian
/// `ω_c a†a + ω_d S_z + g(a + a†)S_x + (g²/ω_c) S_x² + ε S_x`
/// on `(spin_n + 1)·n_fock` states.
pub fn build_edm(params: &ModelParams) -> Result<OperatorMatrix> {
    build_edm_capped(params, DEFAULT_MAX_DIM)
}

pub fn build_edm_capped(params: &ModelParams, max_dim: usize) -> Result<OperatorMatrix> {
    params.validate()?;
    let dim = (params.spin_n + 1)
        .checked_mul(params.n_fock)
        .ok_or(Error::DimensionCap {
            dim: usize::MAX,
            cap: max_dim,
        })?;
    check_dim(dim, max_dim)?;
    let h = spin_cavity_hamiltonian(params, true)?;
    Ok(h.relabel(format!(
        "H_EDM(N={}, g={}, eps={})",
        params.spin_n, params.g, params.epsilon
    )))
}

fn spin_cavity_hamiltonian(params: &ModelParams, diamagnetic: bool) -> Result<OperatorMatrix> {
    let (sx, _, sz) = spin_operators(params.spin_n)?;
    let (a, a_dag) = fock_ladder(params.n_fock)?;
    let spin_id = CMatrix::identity(params.spin_n + 1, params.spin_n + 1);
    let fock_id = CMatrix::identity(params.n_fock, params.n_fock);
    let num = number_operator(params.n_fock).entries;
    let field = &a.entries + &a_dag.entries;

    let mut spin_part = &sz.entries * real(params.omega_d) + &sx.entries * real(params.epsilon);
    if diamagnetic {
        spin_part += (&sx.entries * &sx.entries) * real(params.g * params.g / params.omega_c);
    }
    let h = spin_id.kronecker(&num) * real(params.omega_c)
        + spin_part.kronecker(&fock_id)
        + sx.entries.kronecker(&field) * real(params.g);
    Ok(OperatorMatrix::new(h, String::new()))
}

/// Polaron-frame Rabi Hamiltonian
/// `ω_c a†a + ε s_x + (ω_d/2)[D(g/ω_c) s̃₊ + D†(g/ω_c) s̃₋]` with `s̃± = s_z ± i s_y`.
pub fn build_polaron_rabi(params: &ModelParams) -> Result<OperatorMatrix> {
    params.validate()?;
    params.require_two_level()?;
    let (sx, sy, sz) = spin_operators(1)?;
    let i = C64::new(0.0, 1.0);
    let s_plus = &sz.entries + &sy.entries * i;
    let s_minus = &sz.entries - &sy.entries * i;
    let d = displacement_matrix(params.n_fock, params.displacement()).entries;
    let d_dag = d.adjoint();
    let num = number_operator(params.n_fock).entries;
    let h = CMatrix::identity(2, 2).kronecker(&num) * real(params.omega_c)
        + sx.entries.kronecker(&CMatrix::identity(params.n_fock, params.n_fock)) * real(params.epsilon)
        + (s_plus.kronecker(&d) + s_minus.kronecker(&d_dag)) * real(params.omega_d / 2.0);
    Ok(OperatorMatrix::new(
        h,
        format!(
            "H_polaron(wc={}, wd={}, g={}, eps={}, n_fock={})",
            params.omega_c, params.omega_d, params.g, params.epsilon, params.n_fock
        ),
    ))
}

/// Constant `−g²/(4ω_c)` separating the lab-frame Rabi spectrum from the
/// polaron Hamiltonian: `E_lab = E_polaron + shift`.
pub fn polaron_energy_shift(params: &ModelParams) -> f64 {
    -params.g * params.g / (4.0 * params.omega_c)
}

/// Holstein–Primakoff polaron EDM
/// `ω_c a†a + ε b†b + (ω_d √N / 2)[D(g/ω_c) b† + D†(g/ω_c) b]`
/// on `n_boson·n_fock` states (`b` slow, photon fast).
///
/// Derived for `g ≫ ω_c`; at small `g` the coupling reduces to a linear
/// drive `ω_d√N/2 (b + b†)` and the model is not physical there.
pub fn build_edm_hp(params: &ModelParams, n_boson: usize) -> Result<OperatorMatrix> {
    build_edm_hp_capped(params, n_boson, DEFAULT_MAX_DIM)
}

pub fn build_edm_hp_capped(params: &ModelParams, n_boson: usize, max_dim: usize) -> Result<OperatorMatrix> {
    params.validate()?;
    if n_boson < 2 {
        return Err(Error::invalid("n_boson", "must be ≥ 2"));
    }
    let dim = n_boson.checked_mul(params.n_fock).ok_or(Error::DimensionCap {
        dim: usize::MAX,
        cap: max_dim,
    })?;
    check_dim(dim, max_dim)?;
    let (b, b_dag) = fock_ladder(n_boson)?;
    let d = displacement_matrix(params.n_fock, params.displacement()).entries;
    let d_dag = d.adjoint();
    let fock_id = CMatrix::identity(params.n_fock, params.n_fock);
    let coupling = params.omega_d * (params.spin_n as f64).sqrt() / 2.0;
    let h = CMatrix::identity(n_boson, n_boson).kronecker(&number_operator(params.n_fock).entries)
        * real(params.omega_c)
        + number_operator(n_boson).entries.kronecker(&fock_id) * real(params.epsilon)
        + (b_dag.entries.kronecker(&d) + b.entries.kronecker(&d_dag)) * real(coupling);
    Ok(OperatorMatrix::new(
        h,
        format!(
            "H_EDM_HP(N={}, g={}, eps={}, n_b={})",
            params.spin_n, params.g, params.epsilon, n_boson
        ),
    ))
}

impl core::fmt::Display for OperatorMatrix {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{} [{}×{}]", self.label, self.dim, self.dim)
    }
}

/// Short label for a model, used in provenance strings.
pub fn describe(params: &ModelParams) -> String {
    format!(
        "wc={} wd={} g={} eps={} n_fock={} N={}",
        params.omega_c, params.omega_d, params.g, params.epsilon, params.n_fock, params.spin_n
    )
    .to_string()
}
