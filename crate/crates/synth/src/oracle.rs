use netgraph::{shortest_path_lengths, DirectedGraph};

use crate::config::{Criterion, SynthesisConfig};
use crate::cutting::solve_freq_lmi;
use crate::freq::FreqLmiData;
use crate::h2::solve_h2;
use crate::metrics::achieved_metrics;
use crate::plant_form::SynthesisPlant;
use crate::result::{Provenance, SynthDiagnostics, SynthesisResult};
use crate::spreg::{run_lp, status_label};
use crate::SynthError;

/// Synthesizes the reference (oracle) parameter: minimizes the chosen norm
/// of `P11 + P12·Q·P21` over the FIR parameters masked by `oracle_graph`.
///
/// * [`Criterion::H2`] — exact infinite-horizon impulse energy, solved
///   through the normal equations of the quadratic program.
/// * [`Criterion::Hinf`] — worst squared gain over the configured grid,
///   solved as per-frequency semidefinite blocks
///   `[[λI, F], [F*, I]] ⪰ 0` (arranged with the bound on the
///   opposite corner, which is the same cone) through the cutting-plane
///   loop.
/// * [`Criterion::L1`] — peak gain truncated at the FIR horizon, solved as
///   a linear program with absolute-value slacks.
///
/// `Q = 0` is always feasible, so the problems are never infeasible; the
/// zero parameter also certifies an upper bound on every objective.
pub fn synth_oracle(
    plant: &SynthesisPlant,
    oracle_graph: &DirectedGraph,
    criterion: Criterion,
    cfg: &SynthesisConfig,
) -> Result<SynthesisResult, SynthError> {
    let mask = plant.mask_for(oracle_graph, cfg.fir_order)?;
    let short_blocks = short_horizon_blocks(oracle_graph, cfg.fir_order);
    let blocks = plant.blocks();
    match criterion {
        Criterion::H2 => {
            let sol = solve_h2(plant, &mask, cfg.solver_tol)?;
            let metrics = achieved_metrics(blocks, &sol.q, None, &cfg.grid, cfg.metric_tail_tol)?;
            Ok(SynthesisResult {
                q: sol.q,
                objective: sol.objective,
                metrics,
                diagnostics: SynthDiagnostics {
                    short_horizon_blocks: short_blocks,
                    fallback_used: sol.fallback_used,
                    ..SynthDiagnostics::default()
                },
                provenance: Provenance::new("oracle-h2", cfg, None),
            })
        }
        Criterion::Hinf => {
            let data = FreqLmiData::new(blocks, None, cfg.grid.omegas())?;
            let outcome = solve_freq_lmi(&data, &mask, 0.0, cfg)?;
            let metrics =
                achieved_metrics(blocks, &outcome.q, None, &cfg.grid, cfg.metric_tail_tol)?;
            Ok(SynthesisResult {
                objective: outcome.lambda_grid,
                metrics,
                diagnostics: SynthDiagnostics {
                    solver_status: status_label(outcome.solver_status),
                    solver_iterations: outcome.solver_iterations,
                    rounds: outcome.rounds,
                    active_frequencies: outcome
                        .active
                        .iter()
                        .map(|&i| data.omegas[i])
                        .collect(),
                    peak_omega: Some(outcome.achieving_omega),
                    lambda_lower_bound: Some(outcome.lambda_lower),
                    final_violation: outcome.final_violation,
                    stalled: outcome.stalled,
                    short_horizon_blocks: short_blocks,
                    fallback_used: false,
                },
                provenance: Provenance::new("oracle-hinf", cfg, None),
                q: outcome.q,
            })
        }
        Criterion::L1 => {
            let p_bar = blocks.p11().to_fir(cfg.fir_order);
            run_lp(plant, &p_bar, &mask, None, cfg, "oracle-l1", short_blocks)
        }
    }
}

/// Counts node blocks the graph connects but the FIR horizon zeroes out
/// (finite shortest-path length exceeding `f`).
pub(crate) fn short_horizon_blocks(graph: &DirectedGraph, f: usize) -> usize {
    let lengths = shortest_path_lengths(graph);
    let n = graph.node_count();
    let mut count = 0;
    for i in 0..n {
        for j in 0..n {
            if let Some(l) = lengths.get(j, i) {
                if l as usize > f {
                    count += 1;
                }
            }
        }
    }
    count
}
