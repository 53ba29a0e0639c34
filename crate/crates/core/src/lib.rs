//! Relaxation physics of an asymmetric dipole ultrastrongly coupled to a
//! single cavity mode.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only numerics:
//!
//! * [`operators`]: truncated Fock/spin operators, displacement-operator
//!   matrix elements and the Rabi, polaron-Rabi and extended Dicke
//!   Hamiltonians.
//! * [`dipole`]: finite-difference solution of the tilted double well and
//!   extraction of two-level parameters.
//! * [`eigen`]: Hermitian diagonalization with a deterministic phase
//!   convention and Fock-truncation auditing.
//! * [`master`]: the dressed thermalizing master equation, its Liouvillian
//!   gap, steady state and time evolution.
//! * [`grwa`]: closed-form generalized rotating-wave results.
//! * [`response`]: structure factors, impedances and transmission.
//! * [`edm`]: effective cascaded dynamics of the multi-well dipole.
//!
//! Tensor-product states are ordered with the matter index slow and the
//! photon (or second boson) index fast: `index = matter * n_fock + photon`.
//! Spin bases run from the highest `S_z` eigenvalue down, so for the
//! two-level dipole index 0 is `|↑⟩` and index 1 is `|↓⟩`.

#![no_std]
// `num_traits::Float` is shadowed by inherent methods whenever std is in the build graph
#![allow(unused_imports)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dipole;
pub mod edm;
pub mod eigen;
mod error;
pub mod expm;
pub mod grwa;
pub mod master;
pub mod operators;
pub mod response;
pub mod special;
mod tridiag;

pub use error::{Error, Result, Warning};
pub use nalgebra::{Complex, DMatrix, DVector};

/// Complex scalar used by every operator in the crate.
pub type C64 = Complex<f64>;

/// Dense complex matrix.
pub type CMatrix = DMatrix<C64>;
