use nalgebra::DMatrix;
use num_complex::Complex64;
use regret::{psi_at, LoopBlocks};
use serde::{Deserialize, Serialize};
use sstf::{FirTransferMatrix, FrequencyGrid, StateSpace};

use crate::SynthError;

/// Norms of the achieved closed loop `F(Q) = P11 + P12·Q·P21`, evaluated
/// independently of the optimization route that produced `Q`.
///
/// `h2_sq` and `l1` come from a stacked state-space realization of `F(Q)`
/// with certified tail bounds; `hinf_sq` is the worst squared gain over the
/// frequency grid; `spreg2` and `l1_mismatch` compare against the reference
/// parameter when one exists (quadratic-gap supremum over the grid, and the
/// tail-certified peak gain of `P12·(Q−Q̂)·P21`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AchievedMetrics {
    pub h2_sq: f64,
    pub hinf_sq: f64,
    pub l1: f64,
    pub spreg2: Option<f64>,
    pub l1_mismatch: Option<f64>,
}

/// Parallel sum of two realizations (same input/output dimensions).
fn parallel_add(a: &StateSpace, b: &StateSpace) -> Result<StateSpace, SynthError> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(SynthError::DimensionMismatch(format!(
            "parallel sum of {}×{} and {}×{} systems",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let (na, nb) = (a.state_dim(), b.state_dim());
    let n = na + nb;
    let mut am = DMatrix::zeros(n, n);
    am.view_mut((0, 0), (na, na)).copy_from(a.a());
    am.view_mut((na, na), (nb, nb)).copy_from(b.a());
    let mut bm = DMatrix::zeros(n, a.cols());
    bm.view_mut((0, 0), (na, a.cols())).copy_from(a.b());
    bm.view_mut((na, 0), (nb, a.cols())).copy_from(b.b());
    let mut cm = DMatrix::zeros(a.rows(), n);
    cm.view_mut((0, 0), (a.rows(), na)).copy_from(a.c());
    cm.view_mut((0, na), (a.rows(), nb)).copy_from(b.c());
    let dm = a.d() + b.d();
    Ok(StateSpace::new(am, bm, cm, dm)?)
}

/// Stacked realization of the closed loop `P11 + P12·Q·P21`.
pub(crate) fn closed_loop_realization(
    blocks: &LoopBlocks,
    q: &FirTransferMatrix,
) -> Result<StateSpace, SynthError> {
    let chain = blocks.p12().series(&q.to_state_space())?.series(blocks.p21())?;
    parallel_add(blocks.p11(), &chain)
}

/// Realization of the response difference `P12·(Q−Q̂)·P21`.
fn difference_realization(
    blocks: &LoopBlocks,
    q: &FirTransferMatrix,
    q_hat: &FirTransferMatrix,
) -> Result<StateSpace, SynthError> {
    let delta = q.add_scaled(q_hat, -1.0)?;
    Ok(blocks.p12().series(&delta.to_state_space())?.series(blocks.p21())?)
}

/// Worst squared gain of the realized closed loop over the grid, evaluated
/// through the frequency responses of the small loop blocks.
pub(crate) fn grid_peak_gain_sq(
    blocks: &LoopBlocks,
    q: &FirTransferMatrix,
    grid: &FrequencyGrid,
) -> Result<(f64, f64), SynthError> {
    let zero = DMatrix::from_element(
        blocks.error_dim(),
        blocks.disturbance_dim(),
        Complex64::new(0.0, 0.0),
    );
    let mut best = f64::NEG_INFINITY;
    let mut at = 0.0;
    for &omega in grid.omegas() {
        let response = blocks.closed_loop_response(q, omega)?;
        let sample = psi_at(omega, &response, &zero)?;
        if sample.lambda_max > best {
            best = sample.lambda_max;
            at = omega;
        }
    }
    Ok((best, at))
}

/// Evaluates every achieved metric for a synthesized parameter.
pub(crate) fn achieved_metrics(
    blocks: &LoopBlocks,
    q: &FirTransferMatrix,
    q_hat: Option<&FirTransferMatrix>,
    grid: &FrequencyGrid,
    tail_tol: f64,
) -> Result<AchievedMetrics, SynthError> {
    let closed = closed_loop_realization(blocks, q)?;
    let h2_sq = closed.h2_norm_sq(tail_tol)?;
    let l1 = closed.l1_norm(tail_tol)?;
    let (hinf_sq, _) = grid_peak_gain_sq(blocks, q, grid)?;
    let spreg2 = match q_hat {
        Some(reference) => Some(regret::spreg2(q, reference, blocks, grid)?.value),
        None => None,
    };
    let l1_mismatch = match q_hat {
        Some(reference) => Some(difference_realization(blocks, q, reference)?.l1_norm(tail_tol)?),
        None => None,
    };
    Ok(AchievedMetrics { h2_sq, hinf_sq, l1, spreg2, l1_mismatch })
}
