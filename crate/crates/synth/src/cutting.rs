use conic::{SolveOptions, SolveStatus};
use netgraph::FirSparsityMask;
use sstf::FirTransferMatrix;

use crate::assemble::assemble_sdp_from_data;
use crate::config::SynthesisConfig;
use crate::freq::FreqLmiData;
use crate::SynthError;

/// Result of the frequency cutting-plane loop.
pub(crate) struct CutOutcome {
    pub q: FirTransferMatrix,
    /// Largest required `λ` over the FULL grid for the returned parameter —
    /// the certified objective value.
    pub lambda_grid: f64,
    /// Frequency achieving `lambda_grid`.
    pub achieving_omega: f64,
    /// Optimum of the last restricted program — a lower bound on the
    /// full-grid optimum.
    pub lambda_lower: f64,
    pub rounds: usize,
    pub active: Vec<usize>,
    pub final_violation: f64,
    pub stalled: bool,
    pub solver_iterations: usize,
    pub solver_status: SolveStatus,
}

/// Minimizes `λ` subject to the per-frequency blocks being positive
/// semidefinite over the whole grid, without ever assembling all frequencies
/// at once: solve on an active subset, evaluate the required `λ` of the
/// candidate on every grid point by an eigenvalue computation, and add the
/// worst violators until the full grid is certified within the configured
/// slack.
///
/// Soundness: the restricted optimum can only be below the full-grid
/// optimum, and the candidate's grid evaluation can only be above it, so
/// `lambda_grid − lambda_lower` brackets the optimality gap.
pub(crate) fn solve_freq_lmi(
    data: &FreqLmiData,
    mask: &FirSparsityMask,
    lambda_floor: f64,
    cfg: &SynthesisConfig,
) -> Result<CutOutcome, SynthError> {
    let n = data.len();
    if n == 0 {
        return Err(SynthError::DimensionMismatch(
            "frequency grid is empty".into(),
        ));
    }

    let mut active = initial_subset(data, mask, n)?;
    let options = SolveOptions { tol: Some(cfg.solver_tol), ..SolveOptions::default() };

    let mut best: Option<CutOutcome> = None;
    let mut total_iterations = 0usize;

    for round in 1..=cfg.max_rounds.max(1) {
        let assembly = assemble_sdp_from_data(data, &active, mask, lambda_floor)?;
        let solution = assembly
            .problem
            .solve(&options)
            .map_err(|e| SynthError::Solver(format!("frequency block program: {e}")))?;
        total_iterations += solution.iterations;
        match solution.status {
            SolveStatus::Optimal | SolveStatus::MaxIter => {}
            other => {
                return Err(SynthError::Solver(format!(
                    "frequency block program ended with status {other:?}"
                )))
            }
        }

        let q = assembly.extract_parameter(&solution.x, mask)?;
        let lambda_lower = solution.x[assembly.lambda_var];
        let profile = data.lambda_profile(&q)?;
        let (worst_idx, worst) = argmax_first(&profile);
        let violation = worst - lambda_lower;
        let gate = cfg.cut_tol_abs + cfg.cut_tol_rel * lambda_lower.abs().max(1.0);

        let outcome = CutOutcome {
            q,
            lambda_grid: worst,
            achieving_omega: data.omegas[worst_idx],
            lambda_lower,
            rounds: round,
            active: active.clone(),
            final_violation: violation,
            stalled: false,
            solver_iterations: total_iterations,
            solver_status: solution.status,
        };
        let improved = best
            .as_ref()
            .is_none_or(|b| outcome.lambda_grid < b.lambda_grid);
        if improved {
            best = Some(outcome);
        }

        if violation <= gate {
            let mut done = best.expect("a round always records an outcome");
            done.rounds = round;
            done.solver_iterations = total_iterations;
            return Ok(done);
        }

        // Add the worst violating frequencies not yet active.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| profile[b].partial_cmp(&profile[a]).expect("finite eigenvalues"));
        let mut added = 0usize;
        for idx in order {
            if added >= cfg.cuts_per_round.max(1) {
                break;
            }
            if profile[idx] <= lambda_lower + 0.5 * gate {
                break;
            }
            if !active.contains(&idx) {
                active.push(idx);
                added += 1;
            }
        }
        active.sort_unstable();
        if added == 0 {
            let mut out = best.expect("a round always records an outcome");
            out.stalled = true;
            out.solver_iterations = total_iterations;
            return Ok(out);
        }
    }

    let mut out = best.expect("the loop runs at least one round");
    out.stalled = true;
    out.solver_iterations = total_iterations;
    Ok(out)
}

/// Starting subset: a handful of evenly spaced grid points plus the
/// frequency with the largest constant-term requirement (the `Q = 0`
/// candidate), deduplicated and sorted.
fn initial_subset(
    data: &FreqLmiData,
    mask: &FirSparsityMask,
    n: usize,
) -> Result<Vec<usize>, SynthError> {
    let spread = 8.min(n);
    let mut active: Vec<usize> = if spread <= 1 {
        vec![0]
    } else {
        (0..spread).map(|k| k * (n - 1) / (spread - 1)).collect()
    };
    let zero = FirTransferMatrix::zeros(mask.rows(), mask.cols(), 0);
    let profile = data.lambda_profile(&zero)?;
    let (worst_idx, _) = argmax_first(&profile);
    active.push(worst_idx);
    active.sort_unstable();
    active.dedup();
    Ok(active)
}

fn argmax_first(values: &[f64]) -> (usize, f64) {
    let mut idx = 0usize;
    let mut best = values[0];
    for (k, &v) in values.iter().enumerate().skip(1) {
        if v > best {
            best = v;
            idx = k;
        }
    }
    (idx, best)
}
