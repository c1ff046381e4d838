//! Directed-graph models of communication/coupling topologies for
//! network-structured control.
//!
//! A [`DirectedGraph`] records which subsystems may exchange information: an
//! edge `(i, j)` means information flows from node `i` to node `j`, and every
//! node always carries a self-loop. From a graph this crate derives
//!
//! * shortest directed path lengths ([`shortest_path_lengths`]), which govern
//!   how many time steps a signal needs to travel between nodes,
//! * the induced delay/sparsity pattern of FIR transfer matrices
//!   ([`fir_sparsity_mask`]): block `(i, j)` of coefficient `t` may be nonzero
//!   only once `t` is at least the path length from `j` to `i`,
//! * a randomized diagnostic for decentralized fixed modes
//!   ([`decentralized_fixed_modes`]), the eigenvalues that no block-diagonal
//!   static output feedback can move, and
//! * supergraph checks ([`is_supergraph`]) used to validate oracle topologies.
//!
//! Block dimensions of the stacked system matrices are described by
//! [`BlockPartition`]. All values are immutable after construction and safe
//! to share across threads.

mod fixed_modes;
mod graph;
mod mask;
mod partition;

pub use fixed_modes::{decentralized_fixed_modes, FixedModeReport};
pub use graph::{is_supergraph, shortest_path_lengths, DirectedGraph, PathLengthTable};
pub use mask::{fir_sparsity_mask, BlockEntry, FirSparsityMask};
pub use partition::BlockPartition;

use thiserror::Error;

/// Errors produced while constructing or combining graph-structured values.
#[derive(Debug, Error)]
pub enum GraphError {
    /// A node index referenced an out-of-range node.
    #[error("node index {index} out of range for {node_count} nodes")]
    NodeOutOfRange { index: usize, node_count: usize },
    /// Two graphs that must share a node set differ in size.
    #[error("node-count mismatch: {left} vs {right}")]
    NodeCountMismatch { left: usize, right: usize },
    /// A graph must contain at least one node.
    #[error("graph must contain at least one node")]
    Empty,
    /// A block partition contained a zero-sized block.
    #[error("block partition contains a zero-sized block at position {0}")]
    ZeroBlock(usize),
    /// A block partition was empty.
    #[error("block partition must contain at least one block")]
    EmptyPartition,
    /// Matrix dimensions incompatible with the requested operation.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// A graph document could not be parsed.
    #[error("invalid graph document: {0}")]
    InvalidDocument(String),
}
