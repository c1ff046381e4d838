use serde::{Deserialize, Serialize};

use crate::{shortest_path_lengths, BlockPartition, DirectedGraph};

/// Entry-level description of one FIR coefficient block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockEntry {
    /// Receiving (row) node.
    pub i: usize,
    /// Sending (column) node.
    pub j: usize,
    /// Coefficient index (delay).
    pub t: usize,
}

/// Delay-structure sparsity pattern of an FIR transfer matrix on a graph.
///
/// Block `(i, j)` of coefficient `t` is FREE exactly when a directed path of
/// length at most `t` leads from node `j` to node `i` (`t ≥ l(j, i)`); it is
/// ZERO otherwise, including for all `t` when `i` is unreachable from `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FirSparsityMask {
    node_count: usize,
    horizon: usize,
    /// `free[(i * node_count + j) * (horizon + 1) + t]`.
    free: Vec<bool>,
    row_part: BlockPartition,
    col_part: BlockPartition,
}

/// Builds the FIR sparsity mask induced by graph `g` for coefficients
/// `t = 0..=f`, with `row_part`/`col_part` giving the per-node sizes of the
/// coefficient matrices' rows and columns.
///
/// # Examples
/// ```
/// use netgraph::{fir_sparsity_mask, BlockPartition, DirectedGraph};
/// let chain = DirectedGraph::new(3, [(0, 1), (1, 2)]).unwrap();
/// let p = BlockPartition::uniform(3, 1).unwrap();
/// let mask = fir_sparsity_mask(&chain, 4, p.clone(), p);
/// assert!(mask.is_free_block(2, 0, 2)); // two hops 0→1→2
/// assert!(!mask.is_free_block(2, 0, 1));
/// assert!(!mask.is_free_block(0, 2, 4)); // unreachable: zero at all delays
/// assert!(mask.is_free_block(1, 1, 0)); // diagonal blocks free everywhere
/// ```
pub fn fir_sparsity_mask(
    g: &DirectedGraph,
    f: usize,
    row_part: BlockPartition,
    col_part: BlockPartition,
) -> FirSparsityMask {
    let n = g.node_count();
    assert_eq!(row_part.block_count(), n, "row partition must have one block per node");
    assert_eq!(col_part.block_count(), n, "column partition must have one block per node");
    let lengths = shortest_path_lengths(g);
    let mut free = vec![false; n * n * (f + 1)];
    for i in 0..n {
        for j in 0..n {
            if let Some(l) = lengths.get(j, i) {
                for t in l as usize..=f {
                    free[(i * n + j) * (f + 1) + t] = true;
                }
            }
        }
    }
    FirSparsityMask {
        node_count: n,
        horizon: f,
        free,
        row_part,
        col_part,
    }
}

impl FirSparsityMask {
    /// Number of nodes.
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// FIR horizon `f` (coefficients run `t = 0..=f`).
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Row block partition (per-node row counts of each coefficient).
    pub fn row_partition(&self) -> &BlockPartition {
        &self.row_part
    }

    /// Column block partition (per-node column counts of each coefficient).
    pub fn col_partition(&self) -> &BlockPartition {
        &self.col_part
    }

    /// Stacked coefficient-matrix row count.
    pub fn rows(&self) -> usize {
        self.row_part.total()
    }

    /// Stacked coefficient-matrix column count.
    pub fn cols(&self) -> usize {
        self.col_part.total()
    }

    /// Whether node block `(i, j)` of coefficient `t` may be nonzero.
    pub fn is_free_block(&self, i: usize, j: usize, t: usize) -> bool {
        assert!(t <= self.horizon, "delay {t} beyond horizon {}", self.horizon);
        self.free[(i * self.node_count + j) * (self.horizon + 1) + t]
    }

    /// Whether the scalar entry `(r, c)` of coefficient `t` may be nonzero,
    /// resolving `(r, c)` to its node blocks through the partitions.
    pub fn is_free_entry(&self, r: usize, c: usize, t: usize) -> bool {
        let i = self.row_part.block_of(r);
        let j = self.col_part.block_of(c);
        self.is_free_block(i, j, t)
    }

    /// All FREE blocks in `(i, j, t)` lexicographic order.
    pub fn free_blocks(&self) -> Vec<BlockEntry> {
        let mut out = Vec::new();
        for i in 0..self.node_count {
            for j in 0..self.node_count {
                for t in 0..=self.horizon {
                    if self.is_free_block(i, j, t) {
                        out.push(BlockEntry { i, j, t });
                    }
                }
            }
        }
        out
    }

    /// All FREE scalar entries as flat coefficient positions `(r, c, t)`,
    /// ordered by node block `(i, j, t)` lexicographically and row-major
    /// within each block — the canonical variable ordering of the synthesis
    /// problem builders.
    pub fn free_scalar_coords(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for entry in self.free_blocks() {
            for r in self.row_part.range(entry.i) {
                for c in self.col_part.range(entry.j) {
                    out.push((r, c, entry.t));
                }
            }
        }
        out
    }

    /// Number of FREE scalar entries.
    pub fn free_entry_count(&self) -> usize {
        let mut count = 0;
        for i in 0..self.node_count {
            for j in 0..self.node_count {
                let block = self.row_part.size(i) * self.col_part.size(j);
                for t in 0..=self.horizon {
                    if self.is_free_block(i, j, t) {
                        count += block;
                    }
                }
            }
        }
        count
    }
}
