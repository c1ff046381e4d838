use std::collections::{BTreeSet, VecDeque};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::GraphError;

/// A directed graph over nodes `0..node_count` with mandatory self-loops.
///
/// An edge `(i, j)` means a directed link from node `i` to node `j`. The
/// in-neighborhood of node `i` — the set of nodes whose information `i` may
/// use — is `N_i = {j | (j, i) ∈ edges}`, and always contains `i` itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectedGraph {
    node_count: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl DirectedGraph {
    /// Builds a graph from a directed edge list, adding the mandatory
    /// self-loops `(i, i)` for every node.
    ///
    /// # Examples
    /// ```
    /// use netgraph::DirectedGraph;
    /// let g = DirectedGraph::new(3, [(0, 1), (1, 2)]).unwrap();
    /// assert!(g.has_edge(0, 1));
    /// assert!(g.has_edge(2, 2)); // self-loop added automatically
    /// assert!(!g.has_edge(1, 0));
    /// ```
    pub fn new(
        node_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        if node_count == 0 {
            return Err(GraphError::Empty);
        }
        let mut set = BTreeSet::new();
        for (i, j) in edges {
            let bad = if i >= node_count {
                Some(i)
            } else if j >= node_count {
                Some(j)
            } else {
                None
            };
            if let Some(index) = bad {
                return Err(GraphError::NodeOutOfRange { index, node_count });
            }
            set.insert((i, j));
        }
        for i in 0..node_count {
            set.insert((i, i));
        }
        Ok(Self {
            node_count,
            edges: set,
        })
    }

    /// Builds a graph from undirected lines: each pair `{i, j}` becomes the
    /// two directed edges `(i, j)` and `(j, i)`; self-loops are added.
    pub fn from_undirected(
        node_count: usize,
        lines: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut dir = Vec::new();
        for (i, j) in lines {
            dir.push((i, j));
            dir.push((j, i));
        }
        Self::new(node_count, dir)
    }

    /// Number of nodes.
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Whether the directed edge `(i, j)` (from `i` to `j`) is present.
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i, j))
    }

    /// Iterates over all directed edges in sorted order, self-loops included.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// Number of directed edges, self-loops included.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// In-neighbors `N_i = {j | (j, i) ∈ edges}` of node `i`, sorted.
    pub fn in_neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.node_count)
            .filter(|&j| self.has_edge(j, i))
            .collect()
    }

    /// The `N×N` 0/1 adjacency matrix with `adjacency[(j, i)] = 1` iff the
    /// edge `(i, j)` is present; equivalently `adjacency[(i, j)] = 1` iff
    /// `j ∈ N_i`. Block `(i, j)` of a conforming system matrix may be nonzero
    /// exactly where this matrix is 1.
    pub fn adjacency(&self) -> DMatrix<f64> {
        let n = self.node_count;
        let mut m = DMatrix::zeros(n, n);
        for &(i, j) in &self.edges {
            m[(j, i)] = 1.0;
        }
        m
    }

    /// Rebuilds a graph from an adjacency matrix produced by
    /// [`DirectedGraph::adjacency`]; entries above 0.5 count as edges.
    /// The round-trip `edges → adjacency → edges` is lossless.
    pub fn from_adjacency(adj: &DMatrix<f64>) -> Result<Self, GraphError> {
        if adj.nrows() != adj.ncols() {
            return Err(GraphError::DimensionMismatch(format!(
                "adjacency must be square, got {}x{}",
                adj.nrows(),
                adj.ncols()
            )));
        }
        let n = adj.nrows();
        let edges = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| adj[(j, i)] > 0.5);
        Self::new(n, edges)
    }

    /// Returns a copy with extra directed edges added (used to build oracle
    /// supergraphs).
    pub fn with_edges(
        &self,
        extra: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut all: Vec<(usize, usize)> = self.edges.iter().copied().collect();
        all.extend(extra);
        Self::new(self.node_count, all)
    }

    /// Parses a graph document of the form
    /// `{"nodes": N, "edges": [[i, j], ...]}` (0-based node indices).
    ///
    /// Self-loops are added automatically when missing; the second return
    /// value lists the nodes whose self-loops had to be added, so callers can
    /// surface a warning.
    pub fn from_json_str(text: &str) -> Result<(Self, Vec<usize>), GraphError> {
        let doc: GraphDocument = serde_json::from_str(text)
            .map_err(|e| GraphError::InvalidDocument(e.to_string()))?;
        let explicit: BTreeSet<(usize, usize)> = doc.edges.iter().copied().collect();
        let graph = Self::new(doc.nodes, doc.edges)?;
        let added = (0..doc.nodes)
            .filter(|&i| !explicit.contains(&(i, i)))
            .collect();
        Ok((graph, added))
    }

    /// Serializes the graph to the document format accepted by
    /// [`DirectedGraph::from_json_str`].
    pub fn to_json_string(&self) -> String {
        let doc = GraphDocument {
            nodes: self.node_count,
            edges: self.edges.iter().copied().collect(),
        };
        serde_json::to_string_pretty(&doc).expect("graph document serialization cannot fail")
    }
}

#[derive(Serialize, Deserialize)]
struct GraphDocument {
    nodes: usize,
    edges: Vec<(usize, usize)>,
}

/// Table of shortest directed path lengths `l(j, i)` from node `j` to node
/// `i`; `None` encodes an unreachable pair and `l(i, i) = 0` by convention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathLengthTable {
    node_count: usize,
    /// Row-major: `lengths[j * node_count + i] = l(j, i)`.
    lengths: Vec<Option<u32>>,
}

impl PathLengthTable {
    /// Shortest path length from node `j` to node `i`, or `None` when `i` is
    /// unreachable from `j`.
    pub fn get(&self, j: usize, i: usize) -> Option<u32> {
        self.lengths[j * self.node_count + i]
    }

    /// Number of nodes the table covers.
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Largest finite entry of the table (0 for a single node).
    pub fn max_finite(&self) -> u32 {
        self.lengths.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Whether every ordered pair is connected by a directed path.
    pub fn all_finite(&self) -> bool {
        self.lengths.iter().all(Option::is_some)
    }
}

/// Computes BFS-exact shortest directed path lengths for all ordered node
/// pairs of `g`.
///
/// # Examples
/// ```
/// use netgraph::{shortest_path_lengths, DirectedGraph};
/// let chain = DirectedGraph::new(3, [(0, 1), (1, 2)]).unwrap();
/// let l = shortest_path_lengths(&chain);
/// assert_eq!(l.get(0, 2), Some(2));
/// assert_eq!(l.get(2, 0), None); // no path back along the chain
/// assert_eq!(l.get(1, 1), Some(0));
/// ```
pub fn shortest_path_lengths(g: &DirectedGraph) -> PathLengthTable {
    let n = g.node_count();
    let mut successors = vec![Vec::new(); n];
    for (i, j) in g.edges() {
        if i != j {
            successors[i].push(j);
        }
    }
    let mut lengths = vec![None; n * n];
    for start in 0..n {
        lengths[start * n + start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let du = lengths[start * n + u].expect("visited nodes have a distance");
            for &v in &successors[u] {
                if lengths[start * n + v].is_none() {
                    lengths[start * n + v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
    }
    PathLengthTable {
        node_count: n,
        lengths,
    }
}

/// Returns true iff `g_hat` is a *proper* supergraph of `g`: same node set,
/// `edges(g) ⊂ edges(g_hat)` strictly. Used to validate oracle topologies.
///
/// # Errors
/// Fails when the two graphs disagree on the node count.
pub fn is_supergraph(g_hat: &DirectedGraph, g: &DirectedGraph) -> Result<bool, GraphError> {
    if g_hat.node_count() != g.node_count() {
        return Err(GraphError::NodeCountMismatch {
            left: g_hat.node_count(),
            right: g.node_count(),
        });
    }
    let contains_all = g.edges().all(|(i, j)| g_hat.has_edge(i, j));
    Ok(contains_all && g_hat.edge_count() > g.edge_count())
}
