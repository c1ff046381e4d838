use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use sstf::FirTransferMatrix;

use crate::{LoopBlocks, RegretError, RegretMethod, RegretReport};

/// Which signal norm the performance gap is measured in.
#[derive(Clone, Copy, Debug, Eq, PartialEq, Serialize, Deserialize)]
pub enum SignalNorm {
    /// Energy norm; gaps compare *squared* ℓ₂ norms, matching the
    /// eigenvalue-based metric of [`crate::spreg2`].
    #[serde(rename = "l2")]
    L2,
    /// Peak norm; gaps compare plain sup-norms, matching the L1 bound of
    /// [`crate::spreg_inf_upper_bound`].
    #[serde(rename = "linf")]
    LInf,
}

/// Lower-estimates the regret of `q` against `q̂` by probing both closed
/// loops with the supplied disturbances and keeping the largest gap.
///
/// Callers are expected to normalize each disturbance to unit norm in the
/// chosen metric; the gap is reported as-is either way. Closed loops are
/// evaluated through their `fir_horizon`-tap truncations, and responses run
/// `fir_horizon` steps past the end of each disturbance to capture tail
/// energy. An empty disturbance set yields `−∞` (no estimate).
///
/// # Errors
/// Rejects mis-shaped parameters or disturbance samples.
pub fn empirical_regret(
    q: &FirTransferMatrix,
    q_hat: &FirTransferMatrix,
    blocks: &LoopBlocks,
    norm: SignalNorm,
    disturbances: &[Vec<DVector<f64>>],
    fir_horizon: usize,
) -> Result<RegretReport, RegretError> {
    let f = blocks.closed_loop_fir(q, fir_horizon)?;
    let f_hat = blocks.closed_loop_fir(q_hat, fir_horizon)?;
    let n_w = blocks.disturbance_dim();

    let mut best: Option<(f64, usize)> = None;
    for (k, w) in disturbances.iter().enumerate() {
        if let Some(bad) = w.iter().find(|sample| sample.len() != n_w) {
            return Err(RegretError::DimensionMismatch(format!(
                "disturbance {} has a sample of dimension {}, expected {}",
                k,
                bad.len(),
                n_w
            )));
        }
        let z = convolve_response(&f, w);
        let z_hat = convolve_response(&f_hat, w);
        let gap = match norm {
            SignalNorm::L2 => sq_l2(&z) - sq_l2(&z_hat),
            SignalNorm::LInf => sup_abs(&z) - sup_abs(&z_hat),
        };
        if best.is_none_or(|(value, _)| gap > value) {
            best = Some((gap, k));
        }
    }

    Ok(match best {
        Some((value, k)) => RegretReport {
            value,
            achieving_omega: None,
            achieving_disturbance: Some(
                disturbances[k]
                    .iter()
                    .map(|w| w.iter().copied().collect())
                    .collect(),
            ),
            method: RegretMethod::Empirical,
        },
        None => RegretReport {
            value: f64::NEG_INFINITY,
            achieving_omega: None,
            achieving_disturbance: None,
            method: RegretMethod::Empirical,
        },
    })
}

/// FIR response to a finite input, extended past the input by the filter
/// order so no tail is dropped.
fn convolve_response(f: &FirTransferMatrix, w: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let mut out = vec![DVector::zeros(f.rows()); w.len() + f.order()];
    for (tau, coeff) in f.coeffs().iter().enumerate() {
        if coeff.iter().all(|&v| v == 0.0) {
            continue;
        }
        for (t, w_t) in w.iter().enumerate() {
            out[t + tau].gemv(1.0, coeff, w_t, 1.0);
        }
    }
    out
}

fn sq_l2(z: &[DVector<f64>]) -> f64 {
    z.iter().map(DVector::norm_squared).sum()
}

fn sup_abs(z: &[DVector<f64>]) -> f64 {
    z.iter()
        .flat_map(|v| v.iter().map(|x| x.abs()))
        .fold(0.0, f64::max)
}
