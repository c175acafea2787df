//! Independent finite-difference discretization of the full operator.
//!
//! The quadratic form of `-Δ` with the Robin boundary term is discretized on
//! a tensor grid (second-order stencils, trapezoid mass), then symmetrized
//! with the mass matrix: `S = B^{-1/2} A B^{-1/2}`.  This keeps the matrix
//! complex symmetric, makes `S(α)^H = S(-α)` and the discrete PT relation
//! `P conj(S) P = S` hold entrywise, and preserves O(h²) eigenvalue
//! convergence.  Everything downstream (mode-sum resolvent, shift-invert
//! windows, bound-state search) operates on S-coordinates, i.e. on fields
//! premultiplied by `B^{1/2}`.

mod assemble;
mod eigen;
mod facts;
mod grid;
mod modesum;

pub use assemble::{assemble_hamiltonian, DiscretizedHamiltonian};
pub use eigen::{
    discrete_eigenvalue_below_threshold, spectrum_window, DirectNumerics, EigPair,
};
pub use facts::{dump_coo, verify_operator_facts, OperatorFactsReport};
pub use grid::{EndBc, TensorGrid};
pub use modesum::{apply_resolvent_modesum, discrete_transverse_basis, TransverseBasis};
