//! Spectral toolkit for the Laplacian on a strip `ℝ × (0,d)` or layer
//! `ℝ² × (0,d)` with complex Robin boundary conditions `∂_u Ψ + iα Ψ = 0`
//! on both faces.
//!
//! The boundary coupling is `α(x) = α₀ + ε β(x)` with a decaying profile β.
//! For constant coupling the spectrum is the half-line `[μ₀², ∞)` with
//! `μ₀² = min{α₀², (π/d)²}`; a weak perturbation with `α₀⟨β⟩ < 0` detaches a
//! single real eigenvalue from the threshold.  The crate computes that
//! eigenvalue three independent ways and cross-checks them:
//!
//! * [`bs`] — a Birman–Schwinger reduction of the eigenvalue problem to a
//!   scalar fixed-point equation `k = G(k, ε)` for the spectral variable k,
//!   solved to machine precision,
//! * [`direct`] — a finite-difference discretization of the full operator
//!   with shift-invert eigensolves,
//! * [`bs::asymptotic_lambda`] — the closed-form weak-coupling expansion.
//!
//! Supporting machinery lives in [`transverse`] (the non-self-adjoint
//! transversal eigenbasis and its biorthonormal partner), [`kernels`]
//! (free-resolvent integral kernels and Macdonald functions) and
//! [`linalg`]/[`quad`] (dense/banded complex solvers and quadrature rules).

pub mod bs;
pub mod config;
pub mod direct;
pub mod error;
pub mod kernels;
pub mod linalg;
pub mod profile;
pub mod quad;
pub mod special;
pub mod transverse;

pub use config::WaveguideConfig;
pub use error::Error;
pub use profile::PerturbationProfile;

/// Shorthand used throughout the crate.
pub type C64 = num_complex::Complex64;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
