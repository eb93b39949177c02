//! Eigensolvers for real symmetric tridiagonal matrices.
//!
//! The crate provides three complete solvers plus the building blocks they
//! share:
//!
//! * [`qr::qr_eigensolve`] — implicit-shift QR, the base-case solver and the
//!   independent reference for everything else;
//! * [`rank_one::cdc_solve`] — classical divide-and-conquer: split the matrix
//!   in two, merge the halves through a rank-one modification;
//! * [`rank_two::rtdc_solve`] — divide-and-conquer with a three-way split,
//!   merging through a *rank-two* modification `D + β₁v₁v₁ᵀ + β₂v₂v₂ᵀ`.
//!
//! The rank-two merge is the interesting part: its secular equation is no
//! longer monotone between poles, so root counting works through one-sided
//! limit signs at each pole plus a stationary-point test ([`rank_two`] module
//! docs describe the scheme). Eigenvectors come either from the direct
//! two-parameter formula ([`rank_two::rank_two_vectors`]) or from a
//! reformulation as two successive rank-one merges
//! ([`rank_two::rank_two_vectors_stable`]) that preserves orthogonality on
//! clustered spectra.
//!
//! Supporting modules: [`tridiag`] (matrix types, block splitting, Householder
//! reduction, the 2-D Laplacian test matrix), [`measures`] (residual and
//! orthogonality quality measures), [`flops`] (operation counting by solver
//! phase).
//!
//! The crate is `no_std` (with `alloc`); file formats, generators, and the
//! command-line driver live in the companion `trideig` crate.

#![cfg_attr(not(test), no_std)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod error;
pub mod flops;
mod fmath;
pub mod measures;
pub mod qr;
pub mod rank_one;
pub mod rank_two;
mod roots;
pub mod tridiag;

pub use error::{Error, Result};
pub use qr::SpectralDecomposition;
pub use tridiag::{DenseSym, SymTridiag};
