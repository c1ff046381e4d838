use proptest::prelude::*;

use netgraph::{fir_sparsity_mask, shortest_path_lengths, BlockPartition, DirectedGraph};

fn arb_graph(max_nodes: usize) -> impl Strategy<Value = DirectedGraph> {
    (2..=max_nodes).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..3 * n)
            .prop_map(move |edges| DirectedGraph::new(n, edges).unwrap())
    })
}

proptest! {
    #[test]
    fn triangle_inequality_holds(g in arb_graph(8)) {
        let l = shortest_path_lengths(&g);
        let n = g.node_count();
        for j in 0..n {
            for k in 0..n {
                for i in 0..n {
                    if let (Some(jk), Some(ki), Some(ji)) =
                        (l.get(j, k), l.get(k, i), l.get(j, i))
                    {
                        prop_assert!(ji <= jk + ki);
                    }
                }
            }
        }
    }

    #[test]
    fn self_distance_zero_and_edges_distance_one(g in arb_graph(8)) {
        let l = shortest_path_lengths(&g);
        for i in 0..g.node_count() {
            prop_assert_eq!(l.get(i, i), Some(0));
        }
        for (i, j) in g.edges() {
            if i != j {
                prop_assert_eq!(l.get(i, j), Some(1));
            }
        }
    }

    #[test]
    fn mask_addition_of_edge_is_monotone(
        g in arb_graph(6),
        extra in (0usize..6, 0usize..6),
        f in 0usize..6,
    ) {
        let n = g.node_count();
        let (a, b) = (extra.0 % n, extra.1 % n);
        let richer = g.with_edges([(a, b)]).unwrap();
        let p = BlockPartition::uniform(n, 1).unwrap();
        let m0 = fir_sparsity_mask(&g, f, p.clone(), p.clone());
        let m1 = fir_sparsity_mask(&richer, f, p.clone(), p);
        for i in 0..n {
            for j in 0..n {
                for t in 0..=f {
                    if m0.is_free_block(i, j, t) {
                        prop_assert!(m1.is_free_block(i, j, t));
                    }
                }
            }
        }
    }

    #[test]
    fn adjacency_round_trip(g in arb_graph(8)) {
        let back = DirectedGraph::from_adjacency(&g.adjacency()).unwrap();
        prop_assert_eq!(g, back);
    }

    #[test]
    fn mask_free_exactly_from_path_length(g in arb_graph(6), f in 0usize..5) {
        let n = g.node_count();
        let l = shortest_path_lengths(&g);
        let p = BlockPartition::uniform(n, 1).unwrap();
        let mask = fir_sparsity_mask(&g, f, p.clone(), p);
        for i in 0..n {
            for j in 0..n {
                for t in 0..=f {
                    let expected = matches!(l.get(j, i), Some(d) if (d as usize) <= t);
                    prop_assert_eq!(mask.is_free_block(i, j, t), expected);
                }
            }
        }
    }
}
