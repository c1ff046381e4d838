use netgraph::{fir_sparsity_mask, BlockPartition, DirectedGraph, FirSparsityMask};
use plant::{NetworkedPlant, TransformedPlant};
use regret::LoopBlocks;

use crate::SynthError;

/// The synthesis-facing view of a plant: the three stable closed-loop
/// blocks `P11, P12, P21` plus the per-node partitions of the parameter's
/// rows (control inputs) and columns (measurements), which turn a
/// communication graph into a coefficient mask.
#[derive(Debug, Clone)]
pub struct SynthesisPlant {
    blocks: LoopBlocks,
    u_part: BlockPartition,
    y_part: BlockPartition,
}

impl SynthesisPlant {
    /// Bundles explicit blocks and partitions. The partitions must tile the
    /// parameter dimensions implied by the blocks.
    pub fn new(
        blocks: LoopBlocks,
        u_part: BlockPartition,
        y_part: BlockPartition,
    ) -> Result<Self, SynthError> {
        if u_part.total() != blocks.control_dim() {
            return Err(SynthError::DimensionMismatch(format!(
                "control partition covers {} rows, blocks expect {}",
                u_part.total(),
                blocks.control_dim()
            )));
        }
        if y_part.total() != blocks.measurement_dim() {
            return Err(SynthError::DimensionMismatch(format!(
                "measurement partition covers {} cols, blocks expect {}",
                y_part.total(),
                blocks.measurement_dim()
            )));
        }
        Ok(SynthesisPlant { blocks, u_part, y_part })
    }

    /// View of an open-loop-stable plant: blocks are the raw `P11/P12/P21`
    /// realizations.
    pub fn from_plant(plant: &NetworkedPlant) -> Result<Self, SynthError> {
        let blocks = LoopBlocks::from_plant(plant)?;
        Self::new(blocks, plant.partitions().u.clone(), plant.partitions().y.clone())
    }

    /// View through a stabilizing pre-compensator: blocks come from the
    /// transformed (stable) loop, partitions from the original plant.
    pub fn from_transformed(
        plant: &NetworkedPlant,
        tp: &TransformedPlant,
    ) -> Result<Self, SynthError> {
        let blocks = LoopBlocks::from_transformed(tp);
        Self::new(blocks, plant.partitions().u.clone(), plant.partitions().y.clone())
    }

    /// Stable loop blocks.
    pub fn blocks(&self) -> &LoopBlocks {
        &self.blocks
    }

    /// Row (control-input) partition of the parameter.
    pub fn u_partition(&self) -> &BlockPartition {
        &self.u_part
    }

    /// Column (measurement) partition of the parameter.
    pub fn y_partition(&self) -> &BlockPartition {
        &self.y_part
    }

    /// Delay/sparsity mask induced by `graph` for horizon `f`.
    pub fn mask_for(&self, graph: &DirectedGraph, f: usize) -> Result<FirSparsityMask, SynthError> {
        if graph.node_count() != self.u_part.block_count() {
            return Err(SynthError::DimensionMismatch(format!(
                "graph has {} nodes, partitions have {}",
                graph.node_count(),
                self.u_part.block_count()
            )));
        }
        Ok(fir_sparsity_mask(graph, f, self.u_part.clone(), self.y_part.clone()))
    }
}
