use serde::{Deserialize, Serialize};

use crate::GraphError;

/// Per-node sizes of one dimension of a block-partitioned vector or matrix
/// (states, inputs, measurements, disturbances, or performance outputs).
///
/// Zero-sized blocks are rejected at construction to rule out empty-matrix
/// edge cases downstream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPartition {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
}

impl BlockPartition {
    /// Builds a partition from per-node block sizes.
    ///
    /// # Examples
    /// ```
    /// use netgraph::BlockPartition;
    /// let p = BlockPartition::new(vec![2, 1, 3]).unwrap();
    /// assert_eq!(p.total(), 6);
    /// assert_eq!(p.offset(2), 3);
    /// assert_eq!(p.block_of(4), 2);
    /// ```
    pub fn new(sizes: Vec<usize>) -> Result<Self, GraphError> {
        if sizes.is_empty() {
            return Err(GraphError::EmptyPartition);
        }
        if let Some(pos) = sizes.iter().position(|&s| s == 0) {
            return Err(GraphError::ZeroBlock(pos));
        }
        let mut offsets = Vec::with_capacity(sizes.len() + 1);
        let mut acc = 0;
        for &s in &sizes {
            offsets.push(acc);
            acc += s;
        }
        offsets.push(acc);
        Ok(Self { sizes, offsets })
    }

    /// Partition with the same block size at every node.
    pub fn uniform(node_count: usize, size: usize) -> Result<Self, GraphError> {
        Self::new(vec![size; node_count])
    }

    /// Number of blocks (nodes).
    pub fn block_count(&self) -> usize {
        self.sizes.len()
    }

    /// Size of block `i`.
    pub fn size(&self, i: usize) -> usize {
        self.sizes[i]
    }

    /// Starting index of block `i` in the stacked dimension.
    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    /// Half-open index range of block `i`.
    pub fn range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    /// Total stacked dimension (sum of block sizes).
    pub fn total(&self) -> usize {
        *self.offsets.last().expect("offsets never empty")
    }

    /// Index of the block containing stacked index `idx`.
    ///
    /// # Panics
    /// Panics when `idx ≥ total()`.
    pub fn block_of(&self, idx: usize) -> usize {
        assert!(idx < self.total(), "index {idx} out of range");
        match self.offsets.binary_search(&idx) {
            Ok(block) if block < self.sizes.len() => block,
            Ok(block) => block - 1,
            Err(next) => next - 1,
        }
    }

    /// The per-node sizes.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }
}
