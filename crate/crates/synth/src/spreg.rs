use conic::{SolveOptions, SolveStatus};
use netgraph::{DirectedGraph, FirSparsityMask};
use sstf::{fir_convolve, FirTransferMatrix};

use crate::assemble::{assemble_spreg_inf_lp, check_reference_dims};
use crate::config::SynthesisConfig;
use crate::cutting::solve_freq_lmi;
use crate::freq::FreqLmiData;
use crate::metrics::achieved_metrics;
use crate::oracle::short_horizon_blocks;
use crate::plant_form::SynthesisPlant;
use crate::result::{Provenance, SynthDiagnostics, SynthesisResult};
use crate::SynthError;

/// Lower bound placed on the quadratic-regret objective variable. The true
/// optimum is never negative, so the floor only guards the solver against
/// drifting into meaningless negative territory on near-degenerate
/// instances.
const SPREG2_LAMBDA_FLOOR: f64 = 1e-12;

/// Minimizes the worst-frequency quadratic-regret gap against the reference
/// parameter `q_hat` over FIR parameters masked by `graph`.
///
/// The objective is the smallest `λ` such that, at every grid frequency,
/// `F(ω)†F(ω) ⪯ λI + F̂(ω)†F̂(ω)` where `F = P11 + P12·Q·P21` and `F̂` is
/// the reference closed loop. The returned objective is the certified
/// worst-case eigenvalue gap of the synthesized parameter across the full
/// grid, which upper-bounds the restricted-subset solver value recorded in
/// the diagnostics.
///
/// The information structure of `graph` must contain the reference's: every
/// FIR coefficient the learner may use must also have been available to the
/// reference. Violations return [`SynthError::NotSupergraph`].
pub fn synth_spreg2(
    plant: &SynthesisPlant,
    q_hat: &FirTransferMatrix,
    graph: &DirectedGraph,
    cfg: &SynthesisConfig,
) -> Result<SynthesisResult, SynthError> {
    check_reference_dims(plant, q_hat)?;
    let mask = plant.mask_for(graph, cfg.fir_order)?;
    ensure_reference_contains(&mask, q_hat)?;
    let short_blocks = short_horizon_blocks(graph, cfg.fir_order);
    let blocks = plant.blocks();

    let data = FreqLmiData::new(blocks, Some(q_hat), cfg.grid.omegas())?;
    let outcome = solve_freq_lmi(&data, &mask, SPREG2_LAMBDA_FLOOR, cfg)?;
    let metrics = achieved_metrics(blocks, &outcome.q, Some(q_hat), &cfg.grid, cfg.metric_tail_tol)?;
    Ok(SynthesisResult {
        objective: outcome.lambda_grid,
        metrics,
        diagnostics: SynthDiagnostics {
            solver_status: status_label(outcome.solver_status),
            solver_iterations: outcome.solver_iterations,
            rounds: outcome.rounds,
            active_frequencies: outcome.active.iter().map(|&i| data.omegas[i]).collect(),
            peak_omega: Some(outcome.achieving_omega),
            lambda_lower_bound: Some(outcome.lambda_lower),
            final_violation: outcome.final_violation,
            stalled: outcome.stalled,
            short_horizon_blocks: short_blocks,
            fallback_used: false,
        },
        provenance: Provenance::new("spreg2", cfg, Some(q_hat)),
        q: outcome.q,
    })
}

/// Minimizes the truncated peak-gain mismatch against the reference
/// parameter `q_hat` over FIR parameters masked by `graph`.
///
/// The objective is the largest absolute row sum, over the first
/// `fir_order + 1` impulse coefficients, of
/// `P12·(Q − Q̂)·P21` — equivalently the peak gain of the mismatch loop
/// driven through the plant. The reported objective is the linear program's
/// optimum; `metrics.l1_mismatch` re-evaluates the synthesized parameter
/// with a tail-certified realization norm, which includes the coefficients
/// beyond the truncation horizon.
pub fn synth_spreg_inf(
    plant: &SynthesisPlant,
    q_hat: &FirTransferMatrix,
    graph: &DirectedGraph,
    cfg: &SynthesisConfig,
) -> Result<SynthesisResult, SynthError> {
    check_reference_dims(plant, q_hat)?;
    let mask = plant.mask_for(graph, cfg.fir_order)?;
    ensure_reference_contains(&mask, q_hat)?;
    let short_blocks = short_horizon_blocks(graph, cfg.fir_order);
    let blocks = plant.blocks();

    let f = cfg.fir_order;
    let p12 = blocks.p12().to_fir(f);
    let p21 = blocks.p21().to_fir(f);
    let reference_loop = fir_convolve(&[&p12, q_hat, &p21], f)?;
    let n_z = reference_loop.rows();
    let n_w = reference_loop.cols();
    let p_bar = FirTransferMatrix::zeros(n_z, n_w, f).add_scaled(&reference_loop, -1.0)?;
    run_lp(plant, &p_bar, &mask, Some(q_hat), cfg, "spreg-inf", short_blocks)
}

/// Verifies that every coefficient freed by the learner's mask was also
/// available to the reference parameter. References built without a mask
/// are treated as unstructured (fully free). Coefficients past the
/// reference's recorded horizon are accepted only when the reference's
/// block is free at its own horizon — otherwise availability cannot be
/// confirmed from the mask and the check conservatively rejects.
fn ensure_reference_contains(
    mask: &FirSparsityMask,
    q_hat: &FirTransferMatrix,
) -> Result<(), SynthError> {
    let Some(ref_mask) = q_hat.mask() else {
        return Ok(());
    };
    if ref_mask.rows() != mask.rows() || ref_mask.cols() != mask.cols() {
        return Err(SynthError::DimensionMismatch(format!(
            "reference mask is {}x{} but the learner mask is {}x{}",
            ref_mask.rows(),
            ref_mask.cols(),
            mask.rows(),
            mask.cols()
        )));
    }
    for entry in mask.free_blocks() {
        let available = if entry.t <= ref_mask.horizon() {
            ref_mask.is_free_block(entry.i, entry.j, entry.t)
        } else {
            ref_mask.is_free_block(entry.i, entry.j, ref_mask.horizon())
        };
        if !available {
            return Err(SynthError::NotSupergraph(format!(
                "learner frees block ({}, {}) at delay {}, which the reference mask forbids; \
                 the synthesis graph must contain the reference's information structure",
                entry.i, entry.j, entry.t
            )));
        }
    }
    Ok(())
}

/// Shared linear-program path: assemble the truncated peak-gain program
/// against `p_bar11`, solve it, and package the result.
pub(crate) fn run_lp(
    plant: &SynthesisPlant,
    p_bar11: &FirTransferMatrix,
    mask: &FirSparsityMask,
    q_hat: Option<&FirTransferMatrix>,
    cfg: &SynthesisConfig,
    problem_tag: &str,
    short_blocks: usize,
) -> Result<SynthesisResult, SynthError> {
    let assembly = assemble_spreg_inf_lp(plant, p_bar11, mask)?;
    let options = SolveOptions {
        tol: Some(cfg.solver_tol),
        ..SolveOptions::default()
    };
    let solution = assembly
        .problem
        .solve(&options)
        .map_err(|e| SynthError::Solver(format!("linear program failed: {e}")))?;
    match solution.status {
        SolveStatus::Optimal | SolveStatus::MaxIter => {}
        other => {
            return Err(SynthError::Solver(format!(
                "linear program ended with status {other:?}"
            )))
        }
    }
    let q = assembly.extract_parameter(&solution.x, mask)?;
    let objective = solution.x[assembly.lambda_var];
    let metrics = achieved_metrics(plant.blocks(), &q, q_hat, &cfg.grid, cfg.metric_tail_tol)?;
    Ok(SynthesisResult {
        q,
        objective,
        metrics,
        diagnostics: SynthDiagnostics {
            solver_status: status_label(solution.status),
            solver_iterations: solution.iterations,
            short_horizon_blocks: short_blocks,
            ..SynthDiagnostics::default()
        },
        provenance: Provenance::new(problem_tag, cfg, q_hat),
    })
}

/// Human-readable solver status for diagnostics.
pub(crate) fn status_label(status: SolveStatus) -> String {
    match status {
        SolveStatus::Optimal => "optimal".to_string(),
        SolveStatus::MaxIter => "max-iter".to_string(),
        other => format!("{other:?}").to_lowercase(),
    }
}
