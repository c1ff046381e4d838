mod common;

use common::{path_graph, random_plant, UniformDims};
use nalgebra::DMatrix;
use netgraph::BlockPartition;
use plant::{doubly_coprime, prestabilize, NetworkedPlant, SignalPartitions};

fn dims(nodes: usize) -> UniformDims {
    UniformDims {
        nodes,
        x: 2,
        u: 1,
        y: 1,
        w: 1,
        z: 2,
    }
}

/// A single-node plant with scalar dynamics `x⁺ = αx + w + u`, full state
/// measurement, and `z = (x, u)`.
fn scalar_plant(alpha: f64) -> NetworkedPlant {
    let graph = path_graph(1);
    let one = || BlockPartition::uniform(1, 1).unwrap();
    let parts = SignalPartitions {
        x: one(),
        u: one(),
        y: one(),
        w: one(),
        z: BlockPartition::uniform(1, 2).unwrap(),
    };
    NetworkedPlant::new(
        graph,
        parts,
        DMatrix::from_element(1, 1, alpha),
        DMatrix::from_element(1, 1, 1.0),
        DMatrix::from_element(1, 1, 1.0),
        DMatrix::from_row_slice(2, 1, &[1.0, 0.0]),
        DMatrix::zeros(2, 1),
        DMatrix::from_row_slice(2, 1, &[0.0, 1.0]),
        DMatrix::from_element(1, 1, 1.0),
        DMatrix::from_element(1, 1, 0.1),
        DMatrix::zeros(1, 1),
    )
    .unwrap()
}

#[test]
fn stable_plants_keep_zero_gains() {
    let p = random_plant(61, &path_graph(3), &dims(3), Some(0.9));
    let gains = prestabilize(&p).unwrap();
    assert!(gains.f.iter().all(|&v| v == 0.0));
    assert!(gains.l.iter().all(|&v| v == 0.0));
    assert!((gains.state_radius - 0.9).abs() < 1e-9);
    assert!((gains.observer_radius - 0.9).abs() < 1e-9);
}

#[test]
fn stable_scalar_lag_keeps_zero_gains() {
    let p = scalar_plant(0.7);
    let gains = prestabilize(&p).unwrap();
    assert!(gains.f.iter().all(|&v| v == 0.0));
    assert!(gains.l.iter().all(|&v| v == 0.0));
}

#[test]
fn unstable_scalar_plant_is_stabilized() {
    let p = scalar_plant(1.5);
    let gains = prestabilize(&p).unwrap();
    assert!(gains.state_radius < 1.0 - 1e-9);
    assert!(gains.observer_radius < 1.0 - 1e-9);
    assert!((sstf::spectral_radius(&(p.a() + p.b2() * &gains.f)) - gains.state_radius).abs() < 1e-12);
    assert!(
        (sstf::spectral_radius(&(p.a() + &gains.l * p.c2())) - gains.observer_radius).abs() < 1e-12
    );
}

#[test]
fn marginal_pole_at_one_is_stabilized() {
    let p = scalar_plant(1.0);
    assert!(!p.is_stable());
    let gains = prestabilize(&p).unwrap();
    assert!(gains.state_radius < 1.0 - 1e-9);
    assert!(gains.observer_radius < 1.0 - 1e-9);
}

#[test]
fn unstable_network_is_stabilized_with_patterned_gains() {
    let graph = path_graph(3);
    let p = random_plant(62, &graph, &dims(3), Some(1.3));
    let gains = prestabilize(&p).unwrap();
    assert!(gains.state_radius < 1.0 - 1e-9, "ρ_F = {}", gains.state_radius);
    assert!(
        gains.observer_radius < 1.0 - 1e-9,
        "ρ_L = {}",
        gains.observer_radius
    );

    // F respects the adjacency block pattern: nodes 0 and 2 are not joined.
    let parts = p.partitions();
    for (i, j) in [(0usize, 2usize), (2, 0)] {
        for r in parts.u.range(i) {
            for c in parts.x.range(j) {
                assert_eq!(gains.f[(r, c)], 0.0);
            }
        }
    }
    // L is block-diagonal.
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            for r in parts.x.range(i) {
                for c in parts.y.range(j) {
                    assert_eq!(gains.l[(r, c)], 0.0);
                }
            }
        }
    }
}

#[test]
fn synthesized_gains_feed_the_factorization() {
    let p = random_plant(63, &path_graph(2), &dims(2), Some(1.15));
    let gains = prestabilize(&p).unwrap();
    let cf = doubly_coprime(&p, &gains.f, &gains.l).unwrap();
    let omegas: Vec<f64> = (0..16)
        .map(|i| std::f64::consts::PI * (i as f64 + 0.5) / 16.0)
        .collect();
    assert!(cf.identity_residual(&omegas).unwrap() < 1e-8);
}
