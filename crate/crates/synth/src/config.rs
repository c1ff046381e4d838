use serde::{Deserialize, Serialize};
use sstf::FrequencyGrid;

/// Norm minimized by [`crate::synth_oracle`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    /// Squared H2 norm of the closed loop (infinite-horizon impulse energy).
    H2,
    /// Squared H-infinity norm sampled on the configured frequency grid.
    Hinf,
    /// L1 / peak-to-peak gain (maximum absolute row sum of the impulse
    /// response, truncated at the configured FIR horizon inside the program).
    L1,
}

/// Tunable knobs shared by all synthesis operations.
///
/// `fir_order` is the horizon `f` of the decision parameter: coefficients
/// `Q_t` exist for `t = 0..=f` wherever the sparsity mask frees them. The
/// `grid` carries the frequency samples used by the semidefinite problems
/// and by all frequency-domain achieved metrics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthesisConfig {
    /// FIR horizon `f` of the decision parameter.
    pub fir_order: usize,
    /// Frequency samples (typically uniform on `[0, π]`; conjugate symmetry
    /// makes the negative half redundant).
    pub grid: FrequencyGrid,
    /// Target accuracy handed to the conic solver.
    pub solver_tol: f64,
    /// Absolute slack allowed when certifying off-subset frequency samples
    /// in the cutting-plane loop.
    pub cut_tol_abs: f64,
    /// Relative (to `|λ|`) slack allowed by the same certification.
    pub cut_tol_rel: f64,
    /// Maximum number of cutting-plane rounds before reporting a stall.
    pub max_rounds: usize,
    /// Frequency samples added per cutting-plane round.
    pub cuts_per_round: usize,
    /// Relative tolerance for the tail-certified time-domain metrics
    /// (H2 and L1 evaluations of the achieved closed loop).
    pub metric_tail_tol: f64,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        SynthesisConfig {
            fir_order: 40,
            grid: FrequencyGrid::uniform_half(200),
            solver_tol: 1e-9,
            cut_tol_abs: 1e-7,
            cut_tol_rel: 1e-6,
            max_rounds: 60,
            cuts_per_round: 6,
            metric_tail_tol: 1e-9,
        }
    }
}

impl SynthesisConfig {
    /// Convenience constructor fixing the horizon and grid resolution,
    /// leaving tolerances at their defaults.
    pub fn with_horizon_and_grid(fir_order: usize, grid_points: usize) -> Self {
        SynthesisConfig {
            fir_order,
            grid: FrequencyGrid::uniform_half(grid_points),
            ..SynthesisConfig::default()
        }
    }
}
