//! Controller synthesis over masked FIR Youla parameters.
//!
//! Every problem in this crate optimizes the closed-loop response
//! `F(Q) = P11 + P12·Q·P21` over FIR parameters `Q` whose coefficients are
//! restricted by a delay/sparsity mask derived from a communication graph:
//!
//! * [`synth_oracle`] — minimizes a classical norm of `F(Q)` (squared H2,
//!   squared H-infinity on a frequency grid, or the L1/peak-gain norm) over
//!   the oracle graph's mask. These solutions serve as reference policies
//!   for the regret problems.
//! * [`synth_spreg2`] — minimizes the worst-case quadratic performance gap
//!   against a reference parameter: `min λ` subject to the per-frequency
//!   linear matrix inequality `[[I, F(Q)], [F(Q)*, λI + F̂*F̂]] ⪰ 0`,
//!   realized as a semidefinite program on a real embedding of each
//!   frequency sample.
//! * [`synth_spreg_inf`] — minimizes the peak-gain (L1) distance
//!   `‖F(Q) − F(Q̂)‖` through a linear program with per-coefficient
//!   absolute-value slacks and row-sum bounds.
//! * [`assemble_spreg2_sdp`] / [`assemble_spreg_inf_lp`] — deterministic,
//!   pure builders for the underlying conic problems, exposed so tests can
//!   audit variable layout, constraint structure, and solver-independent
//!   reproducibility.
//!
//! The semidefinite route never materializes one monolithic problem over
//! hundreds of frequencies: a cutting-plane loop solves small subsets of
//! frequency blocks and certifies the remaining grid by direct eigenvalue
//! evaluation of the achieved response (see [`SynthesisResult`] diagnostics).

mod assemble;
mod config;
mod cutting;
mod freq;
mod h2;
mod metrics;
mod oracle;
mod plant_form;
mod result;
mod spreg;

pub use assemble::{assemble_spreg2_sdp, assemble_spreg_inf_lp, LpAssembly, SdpAssembly};
pub use config::{Criterion, SynthesisConfig};
pub use metrics::AchievedMetrics;
pub use oracle::synth_oracle;
pub use plant_form::SynthesisPlant;
pub use result::{Provenance, SynthDiagnostics, SynthesisResult};
pub use spreg::{synth_spreg2, synth_spreg_inf};

use thiserror::Error;

/// Errors reported by the synthesis routines.
#[derive(Debug, Error)]
pub enum SynthError {
    /// Incompatible matrix/partition dimensions between plant, mask, and
    /// reference parameter.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// The reference parameter's sparsity pattern does not contain the
    /// learner's pattern, so the regret benchmark is not a relaxation.
    #[error("reference mask does not contain the learner mask: {0}")]
    NotSupergraph(String),
    /// The conic solver failed or returned a non-optimal status.
    #[error("solver failure: {0}")]
    Solver(String),
    /// The cutting-plane loop exhausted its round budget with residual
    /// constraint violation (result still returned via diagnostics path).
    #[error("frequency cutting-plane stalled after {rounds} rounds (violation {violation:.3e})")]
    Stalled { rounds: usize, violation: f64 },
    /// Underlying conic layer error.
    #[error(transparent)]
    Conic(#[from] conic::ConicError),
    /// Underlying transfer-function layer error.
    #[error(transparent)]
    Sstf(#[from] sstf::SstfError),
    /// Underlying regret-evaluation error.
    #[error(transparent)]
    Regret(#[from] regret::RegretError),
}
