//! Finite packing graphs.
//!
//! A [`Graph`] stands in for a (discretised) topological packing graph: a
//! finite vertex set, a symmetric irreflexive adjacency relation and
//! nonnegative vertex weights. Values are immutable once built.

mod alpha;
mod format;
pub mod generators;

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use fixedbitset::FixedBitSet;
use thiserror::Error;

pub use alpha::{alpha_exact, alpha_exact_with_limit, AlphaResult, DEFAULT_ALPHA_LIMIT};
pub use format::parse_graph;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} has invalid weight {weight} (weights must be finite and >= 0)")]
    InvalidWeight { vertex: usize, weight: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{what} has size {size}, above the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },
}

/// Finite graph with bitset adjacency and nonnegative vertex weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    adjacency: Vec<FixedBitSet>,
    weights: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl Graph {
    /// Edgeless graph on `n` vertices with unit weights.
    pub fn edgeless(n: usize) -> Self {
        Self {
            adjacency: (0..n).map(|_| FixedBitSet::with_capacity(n)).collect(),
            weights: vec![1.0; n],
            labels: None,
        }
    }

    /// Builds a graph from an undirected edge list. Duplicate edges are
    /// merged; self-loops and out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::edgeless(n);
        for &(u, v) in edges {
            g.insert_edge(u, v)?;
        }
        Ok(g)
    }

    pub(crate) fn insert_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        let n = self.n();
        for x in [u, v] {
            if x >= n {
                return Err(GraphError::VertexOutOfRange { vertex: x, n });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        self.adjacency[u].insert(v);
        self.adjacency[v].insert(u);
        Ok(())
    }

    /// Replaces the vertex weights.
    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self, GraphError> {
        if weights.len() != self.n() {
            return Err(GraphError::InvalidParameter(format!(
                "expected {} weights, got {}",
                self.n(),
                weights.len()
            )));
        }
        if let Some((vertex, &weight)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(GraphError::InvalidWeight { vertex, weight });
        }
        self.weights = weights;
        Ok(self)
    }

    /// Attaches per-vertex labels.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, GraphError> {
        if labels.len() != self.n() {
            return Err(GraphError::InvalidParameter(format!(
                "expected {} labels, got {}",
                self.n(),
                labels.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].contains(v)
    }

    /// Open neighbourhood of `v` as a bitset over all vertices.
    pub fn neighbors(&self, v: usize) -> &FixedBitSet {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].count_ones(..)
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(|a| a.count_ones(..)).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, adj)| adj.ones().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    pub fn weight(&self, v: usize) -> f64 {
        self.weights[v]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// True when every weight equals 1.
    pub fn is_unweighted(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }

    pub fn label(&self, v: usize) -> Option<&str> {
        self.labels.as_ref().map(|l| l[v].as_str())
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// True when no two of `vertices` are adjacent. Repeated vertices are
    /// ignored.
    pub fn is_independent(&self, vertices: &[usize]) -> bool {
        vertices.iter().enumerate().all(|(i, &u)| {
            vertices[i + 1..]
                .iter()
                .all(|&v| u == v || !self.is_adjacent(u, v))
        })
    }

    pub fn set_weight(&self, vertices: &[usize]) -> f64 {
        vertices.iter().map(|&v| self.weights[v]).sum()
    }

    /// Hash of the vertex count, adjacency and weights. Used to detect bases
    /// built from different graphs.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.n().hash(&mut h);
        for (u, v) in self.edges() {
            (u, v).hash(&mut h);
        }
        for w in &self.weights {
            w.to_bits().hash(&mut h);
        }
        h.finish()
    }

    /// Induced subgraph on `vertices` (kept in the given order). Weights and
    /// labels are carried over.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Result<Graph, GraphError> {
        let n = self.n();
        if let Some(&vertex) = vertices.iter().find(|&&v| v >= n) {
            return Err(GraphError::VertexOutOfRange { vertex, n });
        }
        let mut sub = Graph::edgeless(vertices.len());
        for (i, &u) in vertices.iter().enumerate() {
            for (j, &v) in vertices.iter().enumerate().skip(i + 1) {
                if self.is_adjacent(u, v) {
                    sub.insert_edge(i, j)?;
                }
            }
        }
        sub.weights = vertices.iter().map(|&v| self.weights[v]).collect();
        sub.labels = self
            .labels
            .as_ref()
            .map(|l| vertices.iter().map(|&v| l[v].clone()).collect());
        Ok(sub)
    }

    /// The subgraph `Gᵉ` induced on the vertices that are neither `e` nor
    /// adjacent to `e`. The second component maps each vertex of `Gᵉ` back to
    /// its vertex in `self`.
    pub fn local_subgraph(&self, e: usize) -> Result<(Graph, Vec<usize>), GraphError> {
        let n = self.n();
        if e >= n {
            return Err(GraphError::VertexOutOfRange { vertex: e, n });
        }
        let keep: Vec<usize> = (0..n)
            .filter(|&x| x != e && !self.is_adjacent(e, x))
            .collect();
        let sub = self.induced_subgraph(&keep)?;
        Ok((sub, keep))
    }

    /// Serialises to the line-oriented edge-list format read by
    /// [`parse_graph`].
    pub fn to_edge_list(&self) -> String {
        format::write_graph(self)
    }
}
