//! Networked plant construction, validation, and the Youla machinery for
//! synthesizing over it.
//!
//! A networked plant partitions the signals of a discrete-time LTI system
//!
//! ```text
//!     x⁺ = A x + B₁ w + B₂ u
//!     z  = C₁ x + D₁₁ w + D₁₂ u
//!     y  = C₂ x + D₂₁ w   (D₂₂ = 0 required)
//! ```
//!
//! across the nodes of a directed communication graph: blocks of A, B₁, C₁,
//! D₁₁, D₂₁, C₂, and D₁₂ may couple node `i` only to its in-neighbors, while
//! B₂ and D₂₂ are block-diagonal.
//!
//! For unstable plants, the module synthesizes sparse pre-stabilizing gains
//! `(F, L)`, realizes an explicit doubly coprime factorization around them,
//! and forms the transformed plant whose closed loop is affine in the Youla
//! parameter `Q`. Controllers are never realized as explicit state-space
//! systems: simulation runs the observer/innovation form `u = F x̂ + Q ∗ e`
//! directly, which sidesteps the inversion in `K = Q(I + P₂₂Q)⁻¹`.

mod closed_loop;
mod coprime;
mod network;
mod prestab;
mod simulate;
mod transform;

pub use closed_loop::closed_loop_fir;
pub use coprime::{doubly_coprime, trivial_factorization, CoprimeFactorization};
pub use network::{NetworkedPlant, SignalPartitions, StructureReport, StructureViolation};
pub use prestab::{prestabilize, PrestabilizedPlant};
pub use simulate::{recover_and_simulate, recover_and_simulate_with_gains, SimulationResult};
pub use transform::{transform_plant, TransformedPlant};

use thiserror::Error;

/// Errors reported while building or operating on networked plants.
#[derive(Debug, Error)]
pub enum PlantError {
    /// Matrix dimensions disagree with the declared partitions.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// The plant has direct feedthrough from control to measurement.
    #[error("D22 must be zero (largest entry {0:.3e}); well-posedness of the controller recovery is only guaranteed without control-to-measurement feedthrough")]
    NonzeroD22(f64),
    /// An operation requiring a Schur-stable plant received an unstable one.
    #[error("plant is not Schur-stable (spectral radius {0:.6}); pre-stabilize and use the transformed plant")]
    UnstablePlant(f64),
    /// The supplied gains do not stabilize the plant.
    #[error("gains are not stabilizing: ρ(A+B₂F) = {state_radius:.6}, ρ(A+LC₂) = {observer_radius:.6}")]
    NonStabilizing {
        /// Spectral radius of `A + B₂F`.
        state_radius: f64,
        /// Spectral radius of `A + LC₂`.
        observer_radius: f64,
    },
    /// Gain search exhausted its budget without stabilizing.
    #[error("pre-stabilization failed: best achieved radii ρ(A+B₂F) = {state_radius:.6}, ρ(A+LC₂) = {observer_radius:.6}")]
    PrestabilizationFailed {
        /// Best state-feedback radius reached.
        state_radius: f64,
        /// Best observer radius reached.
        observer_radius: f64,
    },
    /// Signal or parameter dimensions disagree with the plant.
    #[error("signal dimension mismatch: {0}")]
    SignalMismatch(String),
    /// Underlying graph/partition error.
    #[error(transparent)]
    Graph(#[from] netgraph::GraphError),
    /// Underlying transfer-function error.
    #[error(transparent)]
    Sstf(#[from] sstf::SstfError),
    /// Underlying conic solver error.
    #[error(transparent)]
    Conic(#[from] conic::ConicError),
    /// A plant document could not be parsed.
    #[error("invalid plant document: {0}")]
    InvalidDocument(String),
}
