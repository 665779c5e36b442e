//! Quantum channels and time-local generators built from symmetric measurements.
//!
//! The crate is organised bottom-up:
//!
//! - [`matcore`]: dense complex matrices, a Jacobi eigensolver for Hermitian
//!   matrices, superoperators and Choi matrices.
//! - [`measure`]: orthonormal Hermitian bases and `(N, M)`-POVMs, together with
//!   the trace-constraint and conical 2-design checks.
//! - [`chan`]: the measure-and-prepare channels `Φ_α`, `Ψ_α`, their mixtures and
//!   complete-positivity / entanglement-breaking tests.
//! - [`dynamics`]: generators `L(t) = Σ γ_α(t)(Φ_α − id)`, the dynamical maps they
//!   produce and CP-, P- and D-divisibility classification.
//! - [`scenarios`]: closed-form regions and searches for the qutrit and ququart
//!   reference families.
//!
//! Everything here is `no_std` with `alloc`; file formats and the command-line
//! front end live in the `symdiv` crate.
//!
//! Conventions used everywhere:
//!
//! - operators are vectorized by stacking columns, `vec(X)[i + j·d] = X[i][j]`;
//! - the Choi matrix of `Φ` is `(id ⊗ Φ)[d·P₊] = Σ_{m,n} |m⟩⟨n| ⊗ Φ(|m⟩⟨n|)`;
//! - positivity checks accept `λ_min ≥ −tol·max(1, ‖A‖)` with `‖A‖` the spectral norm.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod chan;
pub mod dynamics;
mod error;
pub mod matcore;
pub mod measure;
pub mod scenarios;

pub use error::{Error, Result};
pub use matcore::{CMatrix, ChoiMatrix, Superoperator, C64};

/// Default relative tolerance for positive-semidefiniteness checks.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;

/// Default threshold on a finite-difference trace-norm derivative.
pub const DEFAULT_DERIVATIVE_TOL: f64 = 1e-7;
