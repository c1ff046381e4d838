//! State-space and FIR transfer-matrix algebra for discrete-time LTI systems.
//!
//! Provides the two transfer-matrix representations used throughout the
//! workspace — [`StateSpace`] realizations `C(zI − A)^{-1}B + D` and finite
//! impulse responses [`FirTransferMatrix`] `Σ_t Q_t z^{-t}` — together with
//!
//! * frequency responses at `z = e^{jω}` on a [`FrequencyGrid`],
//! * impulse responses (Markov parameters `D, CB, CAB, …`),
//! * the squared H2 norm `(1/2π)∫ Trace(P*P) dω = Σ_t ‖h_t‖_F²`,
//! * the squared H∞ norm `sup_ω λ_max(P*P)` evaluated on a grid (a
//!   documented lower bound of the true supremum),
//! * the L1 norm `max_i Σ_j Σ_t |h_t(i,j)|`, and
//! * truncated FIR convolution.
//!
//! Infinite sums for state-space systems are truncated with a certified
//! geometric tail bound `‖h_t‖_F ≤ c·ρ̄^t`, where `ρ̄` is the spectral radius
//! of `A` plus a small margin and `c` is fitted on the computed prefix.
//! All values are immutable after construction; grid evaluations are pure.

mod fir;
mod grid;
mod ss;

pub use fir::{fir_convolve, FirTransferMatrix};
pub use grid::FrequencyGrid;
pub use ss::{spectral_radius, StateSpace};

use thiserror::Error;

/// Errors produced by transfer-matrix construction and evaluation.
#[derive(Debug, Error)]
pub enum SstfError {
    /// Matrix dimensions incompatible with the requested operation.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// An operation requiring stability was invoked on an unstable system.
    #[error("system is not Schur-stable (spectral radius {0:.6})")]
    Unstable(f64),
    /// Evaluating `(e^{jω}I − A)^{-1}` failed (eigenvalue on the unit circle).
    #[error("frequency response evaluation failed at omega = {0}: {1}")]
    Evaluation(f64, String),
    /// A frequency grid was empty or contained out-of-range points.
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),
    /// FIR coefficients conflicted with the attached sparsity mask.
    #[error("mask violation: coefficient {t} entry ({r},{c}) must be zero but is {value}")]
    MaskViolation {
        r: usize,
        c: usize,
        t: usize,
        value: f64,
    },
    /// A serialized document could not be parsed.
    #[error("invalid document: {0}")]
    InvalidDocument(String),
}
