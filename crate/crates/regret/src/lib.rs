//! Spatial-regret evaluation for network-structured feedback loops.
//!
//! Given two controller parameters `Q` and `Q̂` acting on the same plant,
//! this crate quantifies how much worse the first closed loop can perform
//! than the second under a shared, norm-bounded disturbance:
//!
//! * [`psi_at`] / [`psi_spectrum`] evaluate the Hermitian gap matrix
//!   `Ψ(e^{jω}) = F_ℓ*F_ℓ − F̂_ℓ*F̂_ℓ` between the two closed-loop frequency
//!   responses, together with its largest eigenvalue.
//! * [`spreg2`] takes the supremum of `λ_max(Ψ)` over a frequency grid —
//!   the energy-to-energy regret (a gap of squared ℓ₂ norms).
//! * [`worst_case_disturbance`] realizes a unit-energy time-domain signal
//!   (windowed, phase-matched cosines) that approaches that supremum.
//! * [`spreg_inf_upper_bound`] bounds the peak-to-peak regret by the L1 norm
//!   of the closed-loop difference; the exact peak-to-peak value is not
//!   computed (it is intractable), only bounds and empirical estimates.
//! * [`empirical_regret`] evaluates the performance gap on a supplied set of
//!   probing disturbances, yielding a lower estimate with the achieving
//!   signal attached.
//!
//! All evaluations run on a [`LoopBlocks`] triple — the disturbance-to-error,
//! control-to-error, and disturbance-to-measurement channels of a stable
//! plant (or of a pre-stabilized plant in its shifted coordinates), so that
//! the closed loop is affine in the parameter: `F_ℓ = P11 + P12·Q·P21`.

mod blocks;
mod disturbance;
mod empirical;
mod psi;
mod report;
mod spreg;

use thiserror::Error;

pub use blocks::LoopBlocks;
pub use disturbance::{worst_case_disturbance, WorstCaseDisturbance};
pub use empirical::{empirical_regret, SignalNorm};
pub use psi::{psi_at, psi_spectrum, PsiSample};
pub use report::{RegretMethod, RegretReport};
pub use spreg::{spreg2, spreg_inf_upper_bound};

/// Errors from regret evaluation.
#[derive(Debug, Error)]
pub enum RegretError {
    /// Operands have incompatible shapes.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Closed-loop evaluation requires a stable plant realization.
    #[error("plant realization is not stable (spectral radius {0}); stabilize it first")]
    UnstableInput(f64),

    /// The requested frequency is not one of the sampled grid points.
    #[error("frequency {0} is not a sampled grid point")]
    OmegaNotInGrid(f64),

    /// The symmetric eigensolver failed to converge.
    #[error("eigenvalue iteration failed to converge")]
    EigenFailure,

    /// A disturbance window must contain at least one sample.
    #[error("window length must be at least 1")]
    EmptyWindow,

    /// The constructed probing signal has no energy to normalize.
    #[error("constructed disturbance has vanishing energy")]
    ZeroEnergy,

    /// Error from plant-side processing.
    #[error(transparent)]
    Plant(#[from] plant::PlantError),

    /// Error from transfer-matrix arithmetic.
    #[error(transparent)]
    Sstf(#[from] sstf::SstfError),
}
