use sstf::{FirTransferMatrix, FrequencyGrid};

use crate::{psi_spectrum, LoopBlocks, RegretError, RegretMethod, RegretReport};

/// Energy-gap regret of `q` against the benchmark `q̂`: the supremum over the
/// grid of the largest eigenvalue of the closed-loop gap matrix `Ψ`.
///
/// The value bounds, for every unit-energy disturbance, the gap of *squared*
/// error energies between the two closed loops; ties resolve to the lowest
/// achieving frequency.
///
/// # Errors
/// Rejects mis-shaped parameters.
pub fn spreg2(
    q: &FirTransferMatrix,
    q_hat: &FirTransferMatrix,
    blocks: &LoopBlocks,
    grid: &FrequencyGrid,
) -> Result<RegretReport, RegretError> {
    let samples = psi_spectrum(q, q_hat, blocks, grid)?;
    let mut best = samples.first().expect("grids are nonempty");
    for sample in &samples[1..] {
        if sample.lambda_max > best.lambda_max {
            best = sample;
        }
    }
    Ok(RegretReport {
        value: best.lambda_max,
        achieving_omega: Some(best.omega),
        achieving_disturbance: None,
        method: RegretMethod::GridSup,
    })
}

/// Upper bound on the peak-to-peak regret of `q` against `q̂`: the L1 norm of
/// the closed-loop difference `F_ℓ(Q) − F_ℓ(Q̂)`, truncated at `horizon`.
///
/// For any disturbance with `‖w‖_∞ ≤ 1`, the peak gap satisfies
/// `‖z‖_∞ − ‖ẑ‖_∞ ≤ ‖z − ẑ‖_∞ ≤ ‖F_ℓ(Q) − F_ℓ(Q̂)‖_{L1}`.
///
/// # Errors
/// Rejects mis-shaped parameters.
pub fn spreg_inf_upper_bound(
    q: &FirTransferMatrix,
    q_hat: &FirTransferMatrix,
    blocks: &LoopBlocks,
    horizon: usize,
) -> Result<f64, RegretError> {
    let f = blocks.closed_loop_fir(q, horizon)?;
    let f_hat = blocks.closed_loop_fir(q_hat, horizon)?;
    Ok(f.add_scaled(&f_hat, -1.0)?.l1_norm())
}
