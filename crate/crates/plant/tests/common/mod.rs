#![allow(dead_code)]

use nalgebra::DMatrix;
use netgraph::{fir_sparsity_mask, BlockPartition, DirectedGraph};
use plant::{NetworkedPlant, SignalPartitions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sstf::FirTransferMatrix;

/// Undirected path 0 — 1 — ⋯ — (n−1), self-loops included.
pub fn path_graph(n: usize) -> DirectedGraph {
    DirectedGraph::from_undirected(n, (0..n.saturating_sub(1)).map(|i| (i, i + 1))).unwrap()
}

/// Sizes shared by every signal of a uniform test plant.
pub struct UniformDims {
    pub nodes: usize,
    pub x: usize,
    pub u: usize,
    pub y: usize,
    pub w: usize,
    pub z: usize,
}

/// A random plant on `graph` whose matrices carry dense entries on every
/// allowed block and exact zeros elsewhere; `A` is rescaled to the given
/// spectral radius when one is requested.
pub fn random_plant(
    seed: u64,
    graph: &DirectedGraph,
    dims: &UniformDims,
    spectral_target: Option<f64>,
) -> NetworkedPlant {
    assert_eq!(graph.node_count(), dims.nodes);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let part = |size: usize| BlockPartition::uniform(dims.nodes, size).unwrap();
    let parts = SignalPartitions {
        x: part(dims.x),
        u: part(dims.u),
        y: part(dims.y),
        w: part(dims.w),
        z: part(dims.z),
    };

    let mut sparse = |rows: &BlockPartition, cols: &BlockPartition| -> DMatrix<f64> {
        let mut m = DMatrix::zeros(rows.total(), cols.total());
        for i in 0..dims.nodes {
            for j in 0..dims.nodes {
                if !graph.has_edge(j, i) {
                    continue;
                }
                for r in rows.range(i) {
                    for c in cols.range(j) {
                        m[(r, c)] = rng.gen::<f64>() * 2.0 - 1.0;
                    }
                }
            }
        }
        m
    };
    let mut a = sparse(&parts.x, &parts.x);
    let b1 = sparse(&parts.x, &parts.w);
    let c1 = sparse(&parts.z, &parts.x);
    let d11 = sparse(&parts.z, &parts.w);
    let d12 = sparse(&parts.z, &parts.u);
    let c2 = sparse(&parts.y, &parts.x);
    let d21 = sparse(&parts.y, &parts.w);

    let mut b2 = DMatrix::zeros(parts.x.total(), parts.u.total());
    for i in 0..dims.nodes {
        for r in parts.x.range(i) {
            for c in parts.u.range(i) {
                b2[(r, c)] = rng.gen::<f64>() * 2.0 - 1.0;
            }
        }
    }
    if let Some(target) = spectral_target {
        let radius = sstf::spectral_radius(&a);
        assert!(radius > 0.0, "degenerate random draw");
        a *= target / radius;
    }
    let d22 = DMatrix::zeros(parts.y.total(), parts.u.total());
    NetworkedPlant::new(graph.clone(), parts, a, b1, b2, c1, d11, d12, c2, d21, d22).unwrap()
}

/// A random FIR parameter respecting the delay mask of `graph`.
pub fn random_masked_q(
    seed: u64,
    graph: &DirectedGraph,
    u_part: BlockPartition,
    y_part: BlockPartition,
    f: usize,
) -> FirTransferMatrix {
    let mask = fir_sparsity_mask(graph, f, u_part, y_part);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..mask.free_entry_count())
        .map(|_| rng.gen::<f64>() * 2.0 - 1.0)
        .collect();
    FirTransferMatrix::from_free_values(&mask, &values).unwrap()
}

/// `k` frequencies `π(i + ½)/k`, offset from both 0 and π so marginal poles
/// at `z = ±1` never sit on a sample.
pub fn offset_grid(k: usize) -> Vec<f64> {
    (0..k)
        .map(|i| std::f64::consts::PI * (i as f64 + 0.5) / k as f64)
        .collect()
}

/// Largest entry magnitude of the difference of two complex matrices.
pub fn max_entry_diff(
    a: &DMatrix<num_complex::Complex64>,
    b: &DMatrix<num_complex::Complex64>,
) -> f64 {
    (a - b).iter().fold(0.0f64, |acc, v| acc.max(v.norm()))
}
