//! Error taxonomy shared by all modules.

use thiserror::Error;

/// Everything that can go wrong in the toolkit.
///
/// Variants mirror the failure modes of the individual operations rather
/// than wrapping sub-errors; the messages carry the offending values so a
/// batch run can report them verbatim.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// `α₀ d / π` is a nonzero integer (or within 1e-9 of one): the
    /// transversal eigenvalue `α₀²` collides with a cosine mode and the
    /// normalisation constants blow up.
    #[error("simple-spectrum hypothesis violated: alpha0*d/pi = {value} is within {tol} of the nonzero integer {nearest}")]
    SimpleSpectrumViolation { value: f64, nearest: i64, tol: f64 },

    /// A sampled field does not match the grid it claims to live on.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Incompatible step sizes or node counts for a discretization.
    #[error("grid error: {0}")]
    GridError(String),

    /// Argument outside the mathematical domain of a special function.
    #[error("domain error: {0}")]
    DomainError(String),

    /// Resolvent kernel requested on the branch cut `[0, ∞)`.
    #[error("spectral parameter z = {re}+{im}i lies on the cut [0, inf)")]
    OnCutError { re: f64, im: f64 },

    /// Kernel evaluated at a coincidence point where it diverges.
    #[error("kernel singular at coincidence (r = 0) for n = {n}")]
    SingularPoint { n: u8 },

    /// The rank-one kernel diverges at the spectral threshold k = 0.
    #[error("threshold singularity: k = 0 requested for an operator containing the singular part")]
    ThresholdSingularity,

    /// The mode-sum tail cannot be certified below the requested tolerance.
    #[error("tail bound failure: tolerance {tol} unreachable at truncation {j_max}")]
    TailBoundFailure { tol: f64, j_max: usize },

    /// `(I + M)` is not safely invertible at the requested point.
    #[error("Neumann series divergence: spectral-radius estimate {norm_estimate} for M at k = {k_re}+{k_im}i exceeds {limit}")]
    NeumannSeriesDivergence {
        norm_estimate: f64,
        k_re: f64,
        k_im: f64,
        limit: f64,
    },

    /// Root iteration left the physical half-plane or failed to converge.
    #[error("no root: {0}")]
    NoRoot(String),

    /// `α₀⟨β⟩` is too close to zero for the weak-coupling theory to decide.
    #[error("borderline case: |alpha0*<beta>| = {value} below tolerance {tol}; existence is undecided in this regime")]
    BorderlineCase { value: f64, tol: f64 },

    /// The predicted spectral gap is below what the grid can resolve.
    #[error("resolution limit: predicted gap {predicted_gap:.3e} below grid floor {delta_grid:.3e}; refine the grid or increase epsilon")]
    ResolutionLimit { predicted_gap: f64, delta_grid: f64 },

    /// An iterative eigensolver did not converge.
    #[error("convergence failure: {0}")]
    ConvergenceFailure(String),

    /// Resolvent application requested at a point of the spectrum.
    #[error("lambda = {re}+{im}i is within {dist:.3e} of the essential spectrum")]
    OnSpectrum { re: f64, im: f64, dist: f64 },

    /// Linear-algebra failure (singular pivot and friends).
    #[error("linear algebra error: {0}")]
    Linalg(String),

    /// Invalid user-supplied parameter.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
