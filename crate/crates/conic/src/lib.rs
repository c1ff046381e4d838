//! Uniform interface to linear and semidefinite programming.
//!
//! Problems are stated in a variables-in-cones primal form
//!
//! ```text
//!     minimize    cᵀx
//!     subject to  A x = b,
//!                 x ∈ K = K₁ × K₂ × … × K_r,
//! ```
//!
//! where each factor is a free slice, a nonnegative-orthant slice, or the
//! scaled-triangle (svec) parametrization of a PSD matrix block. The module
//! is an adapter: the default backend is an interior-point conic solver and
//! a built-in first-order operator-splitting method is available behind the
//! same interface. The interface and tolerances are the contract, not the
//! algorithm.
//!
//! Complex Hermitian linear matrix inequalities are handled through the real
//! symmetric embedding `[[Re(H), −Im(H)], [Im(H), Re(H)]]`, which preserves
//! semidefiniteness and doubles every eigenvalue's multiplicity.

mod embed;
mod firstorder;
mod interior;
mod problem;
mod solution;

pub use embed::{hermitian_embed, smat, svec, svec_index, svec_len};
pub use problem::{ConeSlice, ConicProblem, PsdVar};
pub use solution::{ConicSolution, Residuals, SolveStatus};

use thiserror::Error;

/// Default feasibility/gap tolerance for problems without PSD blocks.
pub const DEFAULT_LP_TOL: f64 = 1e-8;
/// Default feasibility/gap tolerance for problems with PSD blocks.
pub const DEFAULT_SDP_TOL: f64 = 1e-7;

/// Environment variable that overrides the default solver backend
/// (`clarabel` or `builtin`).
pub const BACKEND_ENV_VAR: &str = "SPREG_CONIC_BACKEND";

/// Errors reported by problem construction, validation, and solving.
#[derive(Debug, Error)]
pub enum ConicError {
    /// The problem data is structurally invalid (bad index, non-finite
    /// coefficient, inconsistent dimensions).
    #[error("malformed conic problem: {0}")]
    BadProblem(String),
    /// The backend failed before producing a status (setup or numerical
    /// breakdown, not infeasibility — infeasibility is a status).
    #[error("solver backend failed: {0}")]
    Backend(String),
    /// A matrix expected to be Hermitian was not, within tolerance.
    #[error("matrix is not Hermitian: max asymmetry {max_asymmetry:.3e}")]
    NonHermitian {
        /// Largest entrywise deviation between `H` and `H*`.
        max_asymmetry: f64,
    },
    /// An unknown backend name was requested.
    #[error("unknown solver backend `{0}` (expected `clarabel` or `builtin`)")]
    UnknownBackend(String),
}

/// Selects the algorithm used by [`ConicProblem::solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Interior-point solver (default): certified residuals and genuine
    /// infeasibility certificates.
    Clarabel,
    /// Built-in ADMM operator-splitting solver; slower tail convergence but
    /// no external dependency and useful for cross-checking.
    Builtin,
}

impl Backend {
    /// Parses a backend name (case-insensitive).
    pub fn parse(name: &str) -> Result<Self, ConicError> {
        match name.to_ascii_lowercase().as_str() {
            "clarabel" => Ok(Backend::Clarabel),
            "builtin" | "admm" | "firstorder" => Ok(Backend::Builtin),
            other => Err(ConicError::UnknownBackend(other.to_string())),
        }
    }

    /// Reads [`BACKEND_ENV_VAR`], falling back to the interior-point
    /// backend when unset or unparseable.
    pub fn from_env() -> Self {
        std::env::var(BACKEND_ENV_VAR)
            .ok()
            .and_then(|v| Backend::parse(&v).ok())
            .unwrap_or(Backend::Clarabel)
    }
}

/// Options controlling [`ConicProblem::solve`].
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Backend selection.
    pub backend: Backend,
    /// Target for primal/dual feasibility residuals and relative gap.
    /// `None` selects [`DEFAULT_LP_TOL`] or [`DEFAULT_SDP_TOL`] from the
    /// problem's cone content.
    pub tol: Option<f64>,
    /// Iteration budget. `None` selects a per-backend default.
    pub max_iter: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            backend: Backend::from_env(),
            tol: None,
            max_iter: None,
        }
    }
}

impl SolveOptions {
    /// Options pinned to a specific backend, defaults otherwise.
    pub fn with_backend(backend: Backend) -> Self {
        Self {
            backend,
            ..Self::default()
        }
    }
}
