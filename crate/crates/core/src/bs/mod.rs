//! The Birman–Schwinger apparatus.
//!
//! The gauge transform `U_ε = e^{-iεβ(x)u}` moves the perturbation out of
//! the boundary condition: `U_ε⁻¹ H_α U_ε = H_{α₀} + ε Z_ε` with the
//! first-order differential operator
//!
//! ```text
//! Z_ε = 2i u ∇'β·∇' + 2i β ∂_u + (εβ² + i(Δ'β)u + ε u²|∇'β|²).
//! ```
//!
//! Factorizing `Z_ε = Σ A_i* B_i` yields the Birman–Schwinger operator
//! `K_ε^λ = ε D (H_{α₀} - λ)⁻¹ C_ε*`, and λ is an eigenvalue of the
//! perturbed operator exactly when -1 is an eigenvalue of `K_ε^λ`.
//! Splitting the resolvent into its rank-one singular part and the regular
//! remainder M reduces the eigenvalue condition to the scalar fixed point
//! `k = G(k, ε)`; [`solve_weak_coupling`] chases that root from the
//! leading-order seed and [`asymptotic_lambda`] is the closed-form
//! prediction it converges to.

mod assemble;
mod factorize;
mod gauge;
mod root;

pub use assemble::{
    assemble_bs_operator, bs_eigenvalue_near_minus_one, scalar_bs_matrix, BsDiscretization,
    BsParts,
};
pub use factorize::{factorize_perturbation, AnalyticField, FactorOp, FactorizedPerturbation};
pub use gauge::gauge_transform_check;
pub use root::{asymptotic_lambda, g_function, k_seed, m_norm_estimate, solve_weak_coupling, winding_number};

use crate::C64;

/// How a spectral value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    BsRoot,
    Direct,
    Asymptotic,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::BsRoot => write!(f, "bs-root"),
            Method::Direct => write!(f, "direct"),
            Method::Asymptotic => write!(f, "asymptotic"),
        }
    }
}

/// A computed eigenvalue with its provenance.
///
/// For the layer the eigenvalue gap `μ₀² - λ = e^{2/k}` underflows next to
/// λ; `k` carries the full information there.
#[derive(Debug, Clone, Copy)]
pub struct SpectralResult {
    pub lambda: C64,
    pub k: C64,
    pub epsilon: f64,
    pub method: Method,
    pub residual: f64,
    pub iterations: usize,
}

/// Outcome of a bound-state search.
#[derive(Debug, Clone, Copy)]
pub enum BoundStateOutcome {
    Eigenvalue(SpectralResult),
    /// `α₀⟨β⟩ > 0`: the perturbation pushes no eigenvalue below the
    /// essential spectrum.
    NoEigenvalue,
}

impl BoundStateOutcome {
    pub fn eigenvalue(&self) -> Option<&SpectralResult> {
        match self {
            BoundStateOutcome::Eigenvalue(r) => Some(r),
            BoundStateOutcome::NoEigenvalue => None,
        }
    }
}
