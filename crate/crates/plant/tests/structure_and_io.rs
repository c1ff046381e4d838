mod common;

use common::{path_graph, random_plant, UniformDims};
use nalgebra::DMatrix;
use netgraph::{BlockPartition, DirectedGraph};
use plant::{NetworkedPlant, PlantError, SignalPartitions};

fn dims2() -> UniformDims {
    UniformDims {
        nodes: 2,
        x: 2,
        u: 1,
        y: 1,
        w: 1,
        z: 2,
    }
}

fn uniform_parts(nodes: usize, dims: &UniformDims) -> SignalPartitions {
    SignalPartitions {
        x: BlockPartition::uniform(nodes, dims.x).unwrap(),
        u: BlockPartition::uniform(nodes, dims.u).unwrap(),
        y: BlockPartition::uniform(nodes, dims.y).unwrap(),
        w: BlockPartition::uniform(nodes, dims.w).unwrap(),
        z: BlockPartition::uniform(nodes, dims.z).unwrap(),
    }
}

#[test]
fn block_diagonal_plant_validates_on_any_graph() {
    let graph = DirectedGraph::new(3, [(0, 1)]).unwrap();
    let dims = UniformDims {
        nodes: 3,
        x: 2,
        u: 1,
        y: 1,
        w: 1,
        z: 1,
    };
    let parts = uniform_parts(3, &dims);
    let block_diag = |rows: &BlockPartition, cols: &BlockPartition| {
        let mut m = DMatrix::zeros(rows.total(), cols.total());
        for i in 0..3 {
            for r in rows.range(i) {
                for c in cols.range(i) {
                    m[(r, c)] = 1.0;
                }
            }
        }
        m
    };
    let p = NetworkedPlant::new(
        graph,
        parts.clone(),
        DMatrix::identity(6, 6) * 0.5,
        block_diag(&parts.x, &parts.w),
        block_diag(&parts.x, &parts.u),
        block_diag(&parts.z, &parts.x),
        block_diag(&parts.z, &parts.w),
        block_diag(&parts.z, &parts.u),
        block_diag(&parts.y, &parts.x),
        block_diag(&parts.y, &parts.w),
        DMatrix::zeros(3, 3),
    )
    .unwrap();
    let report = p.validate_network_structure();
    assert!(report.is_ok(), "{report}");
}

#[test]
fn graph_sparse_plant_validates() {
    let p = random_plant(11, &path_graph(3), &dims2_with_nodes(3), Some(0.8));
    assert!(p.validate_network_structure().is_ok());
}

fn dims2_with_nodes(nodes: usize) -> UniformDims {
    UniformDims { nodes, ..dims2() }
}

#[test]
fn off_edge_block_is_reported_with_magnitude() {
    let graph = path_graph(3);
    let p = random_plant(12, &graph, &dims2_with_nodes(3), Some(0.8));
    // Node 2 is two hops from node 0, so block (2, 0) of A must stay zero.
    let mut a = p.a().clone();
    a[(4, 0)] = 0.25;
    let broken = NetworkedPlant::new(
        graph,
        p.partitions().clone(),
        a,
        p.b1().clone(),
        p.b2().clone(),
        p.c1().clone(),
        p.d11().clone(),
        p.d12().clone(),
        p.c2().clone(),
        p.d21().clone(),
        DMatrix::zeros(3, 3),
    )
    .unwrap();
    let report = broken.validate_network_structure();
    assert_eq!(report.violations.len(), 1);
    let v = &report.violations[0];
    assert_eq!((v.matrix, v.i, v.j), ("A", 2, 0));
    assert_eq!(v.magnitude, 0.25);
    assert!(format!("{report}").contains("A[2, 0]"));
}

#[test]
fn off_diagonal_b2_block_is_reported() {
    let graph = path_graph(2);
    let p = random_plant(13, &graph, &dims2(), Some(0.8));
    let mut b2 = p.b2().clone();
    b2[(0, 1)] = 1.0; // node 0 actuated by node 1's input: not allowed
    let broken = NetworkedPlant::new(
        graph,
        p.partitions().clone(),
        p.a().clone(),
        p.b1().clone(),
        b2,
        p.c1().clone(),
        p.d11().clone(),
        p.d12().clone(),
        p.c2().clone(),
        p.d21().clone(),
        DMatrix::zeros(2, 2),
    )
    .unwrap();
    let report = broken.validate_network_structure();
    assert_eq!(report.violations.len(), 1);
    assert_eq!(report.violations[0].matrix, "B2");
}

#[test]
fn nonzero_d22_is_rejected() {
    let graph = path_graph(2);
    let p = random_plant(14, &graph, &dims2(), Some(0.8));
    let mut d22 = DMatrix::zeros(2, 2);
    d22[(1, 1)] = 3e-3;
    let err = NetworkedPlant::new(
        graph,
        p.partitions().clone(),
        p.a().clone(),
        p.b1().clone(),
        p.b2().clone(),
        p.c1().clone(),
        p.d11().clone(),
        p.d12().clone(),
        p.c2().clone(),
        p.d21().clone(),
        d22,
    )
    .unwrap_err();
    match err {
        PlantError::NonzeroD22(mag) => assert_eq!(mag, 3e-3),
        other => panic!("expected NonzeroD22, got {other}"),
    }
}

#[test]
fn mismatched_dimensions_are_rejected() {
    let graph = path_graph(2);
    let p = random_plant(15, &graph, &dims2(), Some(0.8));
    let err = NetworkedPlant::new(
        graph,
        p.partitions().clone(),
        DMatrix::zeros(3, 3), // partitions demand 4x4
        p.b1().clone(),
        p.b2().clone(),
        p.c1().clone(),
        p.d11().clone(),
        p.d12().clone(),
        p.c2().clone(),
        p.d21().clone(),
        DMatrix::zeros(2, 2),
    )
    .unwrap_err();
    assert!(matches!(err, PlantError::DimensionMismatch(_)), "{err}");
}

#[test]
fn partition_block_count_must_match_graph() {
    let graph = path_graph(2);
    let p = random_plant(16, &graph, &dims2(), Some(0.8));
    let mut parts = p.partitions().clone();
    parts.u = BlockPartition::uniform(3, 1).unwrap();
    let err = NetworkedPlant::new(
        graph,
        parts,
        p.a().clone(),
        p.b1().clone(),
        p.b2().clone(),
        p.c1().clone(),
        p.d11().clone(),
        p.d12().clone(),
        p.c2().clone(),
        p.d21().clone(),
        DMatrix::zeros(2, 2),
    )
    .unwrap_err();
    assert!(matches!(err, PlantError::DimensionMismatch(_)), "{err}");
}

#[test]
fn json_round_trip_preserves_everything() {
    let p = random_plant(17, &path_graph(3), &dims2_with_nodes(3), Some(0.9));
    let text = p.to_json_string();
    let back = NetworkedPlant::from_json_str(&text).unwrap();
    assert_eq!(back.graph(), p.graph());
    assert_eq!(back.partitions(), p.partitions());
    assert_eq!(back.a(), p.a());
    assert_eq!(back.b1(), p.b1());
    assert_eq!(back.b2(), p.b2());
    assert_eq!(back.c1(), p.c1());
    assert_eq!(back.d11(), p.d11());
    assert_eq!(back.d12(), p.d12());
    assert_eq!(back.c2(), p.c2());
    assert_eq!(back.d21(), p.d21());
}

#[test]
fn malformed_document_is_rejected() {
    assert!(matches!(
        NetworkedPlant::from_json_str("{\"graph\": 3}"),
        Err(PlantError::InvalidDocument(_))
    ));
}

#[test]
fn stability_flag_uses_strict_margin() {
    let stable = random_plant(18, &path_graph(2), &dims2(), Some(0.97));
    assert!(stable.is_stable());
    assert!((stable.spectral_radius() - 0.97).abs() < 1e-9);

    let marginal = random_plant(19, &path_graph(2), &dims2(), Some(1.0));
    assert!(!marginal.is_stable());
    let unstable = random_plant(20, &path_graph(2), &dims2(), Some(1.2));
    assert!(!unstable.is_stable());
}

#[test]
fn open_loop_blocks_have_plant_dimensions() {
    let p = random_plant(21, &path_graph(2), &dims2(), Some(0.8));
    assert_eq!((p.p11_realization().rows(), p.p11_realization().cols()), (4, 2));
    assert_eq!((p.p12_realization().rows(), p.p12_realization().cols()), (4, 2));
    assert_eq!((p.p21_realization().rows(), p.p21_realization().cols()), (2, 2));
    let p22 = p.p22_realization();
    assert_eq!((p22.rows(), p22.cols()), (2, 2));
    assert!(p22.d().iter().all(|&v| v == 0.0));
}
