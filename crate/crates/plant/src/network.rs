use std::fmt;

use nalgebra::DMatrix;
use netgraph::{BlockPartition, DirectedGraph};
use serde::{Deserialize, Serialize};
use sstf::{spectral_radius, StateSpace};

use crate::PlantError;

/// Tolerance below which an entry counts as structurally zero when checking
/// the sparsity pattern.
const STRUCTURE_TOL: f64 = 0.0;

/// Signal partitions of a networked plant: states, control inputs,
/// measurements, disturbances, and performance outputs, one block per node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalPartitions {
    /// State partition (rows/cols of `A`).
    pub x: BlockPartition,
    /// Control-input partition (cols of `B₂`).
    pub u: BlockPartition,
    /// Measurement partition (rows of `C₂`).
    pub y: BlockPartition,
    /// Disturbance partition (cols of `B₁`).
    pub w: BlockPartition,
    /// Performance-output partition (rows of `C₁`).
    pub z: BlockPartition,
}

/// A discrete-time LTI plant distributed over a directed graph.
///
/// Couplings of `A`, `B₁`, `C₁`, `D₁₁`, `D₂₁`, `C₂`, and `D₁₂` are allowed
/// from node `j` into node `i` only when `j` is an in-neighbor of `i`;
/// `B₂` and `D₂₂` are block-diagonal, and `D₂₂ = 0` is required.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkedPlant {
    graph: DirectedGraph,
    parts: SignalPartitions,
    a: DMatrix<f64>,
    b1: DMatrix<f64>,
    b2: DMatrix<f64>,
    c1: DMatrix<f64>,
    d11: DMatrix<f64>,
    d12: DMatrix<f64>,
    c2: DMatrix<f64>,
    d21: DMatrix<f64>,
    spectral_radius: f64,
}

/// One nonzero block found outside the allowed sparsity pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureViolation {
    /// Which matrix the block belongs to (`"A"`, `"B1"`, …).
    pub matrix: &'static str,
    /// Block row (destination node).
    pub i: usize,
    /// Block column (source node).
    pub j: usize,
    /// Largest entry magnitude inside the offending block.
    pub magnitude: f64,
}

/// Diagnostic result of [`NetworkedPlant::validate_network_structure`].
#[derive(Debug, Clone, Default)]
pub struct StructureReport {
    /// All blocks that should be zero but are not.
    pub violations: Vec<StructureViolation>,
}

impl StructureReport {
    /// True when the plant respects the pattern exactly.
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for StructureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "network structure: ok");
        }
        writeln!(f, "network structure: {} violation(s)", self.violations.len())?;
        for v in &self.violations {
            writeln!(
                f,
                "  {}[{}, {}] nonzero outside pattern (|entry| up to {:.3e})",
                v.matrix, v.i, v.j, v.magnitude
            )?;
        }
        Ok(())
    }
}

fn check_dims(
    name: &str,
    m: &DMatrix<f64>,
    rows: usize,
    cols: usize,
) -> Result<(), PlantError> {
    if m.nrows() != rows || m.ncols() != cols {
        return Err(PlantError::DimensionMismatch(format!(
            "{name} is {}x{}, expected {rows}x{cols}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

impl NetworkedPlant {
    /// Builds a plant, validating partition-consistent dimensions and
    /// rejecting nonzero `D₂₂`. Structure violations are *not* rejected
    /// here; use [`Self::validate_network_structure`] for the diagnostic.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        graph: DirectedGraph,
        parts: SignalPartitions,
        a: DMatrix<f64>,
        b1: DMatrix<f64>,
        b2: DMatrix<f64>,
        c1: DMatrix<f64>,
        d11: DMatrix<f64>,
        d12: DMatrix<f64>,
        c2: DMatrix<f64>,
        d21: DMatrix<f64>,
        d22: DMatrix<f64>,
    ) -> Result<Self, PlantError> {
        let nodes = graph.node_count();
        for (name, part) in [
            ("x", &parts.x),
            ("u", &parts.u),
            ("y", &parts.y),
            ("w", &parts.w),
            ("z", &parts.z),
        ] {
            if part.block_count() != nodes {
                return Err(PlantError::DimensionMismatch(format!(
                    "partition {name} has {} blocks for {nodes} nodes",
                    part.block_count()
                )));
            }
        }
        let (n, m, p) = (parts.x.total(), parts.u.total(), parts.y.total());
        let (nw, nz) = (parts.w.total(), parts.z.total());
        check_dims("A", &a, n, n)?;
        check_dims("B1", &b1, n, nw)?;
        check_dims("B2", &b2, n, m)?;
        check_dims("C1", &c1, nz, n)?;
        check_dims("D11", &d11, nz, nw)?;
        check_dims("D12", &d12, nz, m)?;
        check_dims("C2", &c2, p, n)?;
        check_dims("D21", &d21, p, nw)?;
        check_dims("D22", &d22, p, m)?;
        let d22_max = d22.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if d22_max > 0.0 {
            return Err(PlantError::NonzeroD22(d22_max));
        }
        let spectral_radius = spectral_radius(&a);
        Ok(Self {
            graph,
            parts,
            a,
            b1,
            b2,
            c1,
            d11,
            d12,
            c2,
            d21,
            spectral_radius,
        })
    }

    /// Communication graph.
    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    /// Signal partitions.
    pub fn partitions(&self) -> &SignalPartitions {
        &self.parts
    }

    /// State matrix `A`.
    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    /// Disturbance input matrix `B₁`.
    pub fn b1(&self) -> &DMatrix<f64> {
        &self.b1
    }

    /// Control input matrix `B₂`.
    pub fn b2(&self) -> &DMatrix<f64> {
        &self.b2
    }

    /// Performance output matrix `C₁`.
    pub fn c1(&self) -> &DMatrix<f64> {
        &self.c1
    }

    /// Disturbance feedthrough `D₁₁`.
    pub fn d11(&self) -> &DMatrix<f64> {
        &self.d11
    }

    /// Control-to-performance feedthrough `D₁₂`.
    pub fn d12(&self) -> &DMatrix<f64> {
        &self.d12
    }

    /// Measurement matrix `C₂`.
    pub fn c2(&self) -> &DMatrix<f64> {
        &self.c2
    }

    /// Disturbance-to-measurement feedthrough `D₂₁`.
    pub fn d21(&self) -> &DMatrix<f64> {
        &self.d21
    }

    /// State dimension.
    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    /// Spectral radius of `A`, recomputed at construction.
    pub fn spectral_radius(&self) -> f64 {
        self.spectral_radius
    }

    /// Schur stability with a safety margin: radii within `1e-9` of one are
    /// treated as unstable, matching the decay-certificate margin used for
    /// norm truncation.
    pub fn is_stable(&self) -> bool {
        self.spectral_radius < 1.0 - 1e-9
    }

    /// Open-loop block `P₁₁ = (A, B₁, C₁, D₁₁)` from disturbance to
    /// performance. Only evaluate on the unit circle when the plant is
    /// stable.
    pub fn p11_realization(&self) -> StateSpace {
        StateSpace::new(self.a.clone(), self.b1.clone(), self.c1.clone(), self.d11.clone())
            .expect("plant dimensions were validated at construction")
    }

    /// Open-loop block `P₁₂ = (A, B₂, C₁, D₁₂)` from control to performance.
    pub fn p12_realization(&self) -> StateSpace {
        StateSpace::new(self.a.clone(), self.b2.clone(), self.c1.clone(), self.d12.clone())
            .expect("plant dimensions were validated at construction")
    }

    /// Open-loop block `P₂₁ = (A, B₁, C₂, D₂₁)` from disturbance to
    /// measurement.
    pub fn p21_realization(&self) -> StateSpace {
        StateSpace::new(self.a.clone(), self.b1.clone(), self.c2.clone(), self.d21.clone())
            .expect("plant dimensions were validated at construction")
    }

    /// Open-loop block `P₂₂ = (A, B₂, C₂, 0)` from control to measurement.
    pub fn p22_realization(&self) -> StateSpace {
        let d22 = DMatrix::zeros(self.parts.y.total(), self.parts.u.total());
        StateSpace::new(self.a.clone(), self.b2.clone(), self.c2.clone(), d22)
            .expect("plant dimensions were validated at construction")
    }

    /// Checks every block of every matrix against the allowed pattern and
    /// reports offenders with their magnitudes. Diagnostic only: never
    /// fails.
    pub fn validate_network_structure(&self) -> StructureReport {
        let g = &self.graph;
        let mut report = StructureReport::default();
        let graph_sparse: [(&'static str, &DMatrix<f64>, &BlockPartition, &BlockPartition); 7] = [
            ("A", &self.a, &self.parts.x, &self.parts.x),
            ("B1", &self.b1, &self.parts.x, &self.parts.w),
            ("C1", &self.c1, &self.parts.z, &self.parts.x),
            ("D11", &self.d11, &self.parts.z, &self.parts.w),
            ("D12", &self.d12, &self.parts.z, &self.parts.u),
            ("C2", &self.c2, &self.parts.y, &self.parts.x),
            ("D21", &self.d21, &self.parts.y, &self.parts.w),
        ];
        for (name, mat, rp, cp) in graph_sparse {
            scan_blocks(name, mat, rp, cp, |i, j| g.has_edge(j, i), &mut report);
        }
        // B2 is block-diagonal; D22 is zero by construction.
        scan_blocks(
            "B2",
            &self.b2,
            &self.parts.x,
            &self.parts.u,
            |i, j| i == j,
            &mut report,
        );
        report
    }

    /// Parses a plant document (see [`Self::to_json_string`]).
    pub fn from_json_str(text: &str) -> Result<Self, PlantError> {
        let doc: PlantDocument = serde_json::from_str(text)
            .map_err(|e| PlantError::InvalidDocument(e.to_string()))?;
        let (graph, _) = DirectedGraph::from_json_str(&serde_json::to_string(&doc.graph).unwrap())
            .map_err(|e| PlantError::InvalidDocument(e.to_string()))?;
        let to_matrix = |name: &str, rows: &Vec<Vec<f64>>| -> Result<DMatrix<f64>, PlantError> {
            if rows.is_empty() {
                return Ok(DMatrix::zeros(0, 0));
            }
            let ncols = rows[0].len();
            if rows.iter().any(|r| r.len() != ncols) {
                return Err(PlantError::InvalidDocument(format!("ragged rows in {name}")));
            }
            Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
        };
        Self::new(
            graph,
            doc.partitions,
            to_matrix("a", &doc.a)?,
            to_matrix("b1", &doc.b1)?,
            to_matrix("b2", &doc.b2)?,
            to_matrix("c1", &doc.c1)?,
            to_matrix("d11", &doc.d11)?,
            to_matrix("d12", &doc.d12)?,
            to_matrix("c2", &doc.c2)?,
            to_matrix("d21", &doc.d21)?,
            to_matrix("d22", &doc.d22)?,
        )
    }

    /// Serializes the plant as `{graph, partitions, matrices}` with
    /// row-major nested arrays.
    pub fn to_json_string(&self) -> String {
        let rows = |m: &DMatrix<f64>| -> Vec<Vec<f64>> {
            (0..m.nrows())
                .map(|i| m.row(i).iter().copied().collect())
                .collect()
        };
        let doc = PlantDocument {
            graph: serde_json::from_str(&self.graph.to_json_string())
                .expect("graph serialization is valid JSON"),
            partitions: self.parts.clone(),
            a: rows(&self.a),
            b1: rows(&self.b1),
            b2: rows(&self.b2),
            c1: rows(&self.c1),
            d11: rows(&self.d11),
            d12: rows(&self.d12),
            c2: rows(&self.c2),
            d21: rows(&self.d21),
            d22: rows(&DMatrix::zeros(self.parts.y.total(), self.parts.u.total())),
        };
        serde_json::to_string_pretty(&doc).expect("document serialization cannot fail")
    }
}

fn scan_blocks(
    name: &'static str,
    mat: &DMatrix<f64>,
    row_part: &BlockPartition,
    col_part: &BlockPartition,
    allowed: impl Fn(usize, usize) -> bool,
    report: &mut StructureReport,
) {
    for i in 0..row_part.block_count() {
        for j in 0..col_part.block_count() {
            if allowed(i, j) {
                continue;
            }
            let view = mat.view(
                (row_part.offset(i), col_part.offset(j)),
                (row_part.size(i), col_part.size(j)),
            );
            let magnitude = view.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            if magnitude > STRUCTURE_TOL {
                report.violations.push(StructureViolation {
                    matrix: name,
                    i,
                    j,
                    magnitude,
                });
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PlantDocument {
    graph: serde_json::Value,
    partitions: SignalPartitions,
    a: Vec<Vec<f64>>,
    b1: Vec<Vec<f64>>,
    b2: Vec<Vec<f64>>,
    c1: Vec<Vec<f64>>,
    d11: Vec<Vec<f64>>,
    d12: Vec<Vec<f64>>,
    c2: Vec<Vec<f64>>,
    d21: Vec<Vec<f64>>,
    d22: Vec<Vec<f64>>,
}
