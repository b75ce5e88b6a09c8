//! Weighted communication graphs and their Laplacians.
//!
//! Edges are stored directed. An undirected edge `{i, j}` is inserted as the
//! two arcs `i -> j` and `j -> i` with equal weight, so the same code path
//! serves undirected topologies and weight-balanced digraphs.
//!
//! Adjacency convention: `adjacency[i][j] = weight` of the arc `i -> j`. The
//! out-degree of `i` is the row sum, the in-degree the column sum, and the
//! Laplacian is `L = D_out - A`, so every row of `L` sums to zero.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// A directed arc with a strictly positive weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
}

/// Weighted communication graph over `n` agents (indices `0..n`).
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<f64>>,
    undirected: bool,
}

impl Graph {
    /// Builds a directed graph from arcs `(from, to, weight)`.
    ///
    /// Repeated arcs accumulate their weights.
    pub fn directed(n: usize, arcs: &[(usize, usize, f64)]) -> Result<Self> {
        let mut graph = Self::empty(n, false);
        for &(from, to, weight) in arcs {
            graph.insert(from, to, weight)?;
        }
        Ok(graph)
    }

    /// Builds an undirected graph; every edge inserts both arcs.
    pub fn undirected(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut graph = Self::empty(n, true);
        for &(a, b, weight) in edges {
            graph.insert(a, b, weight)?;
            graph.insert(b, a, weight)?;
        }
        Ok(graph)
    }

    fn empty(n: usize, undirected: bool) -> Self {
        Self {
            n,
            edges: Vec::new(),
            adjacency: vec![vec![0.0; n]; n],
            undirected,
        }
    }

    fn insert(&mut self, from: usize, to: usize, weight: f64) -> Result<()> {
        if from >= self.n || to >= self.n {
            return Err(Error::InvalidGraph(format!(
                "edge ({from}, {to}) references an agent outside 0..{}",
                self.n
            )));
        }
        if from == to {
            return Err(Error::InvalidGraph(format!("self-loop at agent {from}")));
        }
        if !(weight.is_finite() && weight > 0.0) {
            return Err(Error::InvalidGraph(format!(
                "edge ({from}, {to}) has non-positive weight {weight}"
            )));
        }
        self.adjacency[from][to] += weight;
        match self.edges.iter_mut().find(|e| e.from == from && e.to == to) {
            Some(edge) => edge.weight += weight,
            None => self.edges.push(Edge { from, to, weight }),
        }
        Ok(())
    }

    /// The undirected 8-agent topology used in the consensus experiments.
    ///
    /// Labels 1..8 in the drawing map to indices 0..7.
    pub fn paper_topology() -> Self {
        const EDGES: [(usize, usize); 10] = [
            (1, 2),
            (1, 8),
            (2, 3),
            (2, 7),
            (3, 4),
            (3, 6),
            (4, 5),
            (5, 6),
            (5, 8),
            (7, 8),
        ];
        let edges: Vec<_> = EDGES.iter().map(|&(a, b)| (a - 1, b - 1, 1.0)).collect();
        Self::undirected(8, &edges).expect("fixed topology is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_undirected(&self) -> bool {
        self.undirected
    }

    /// Stored arcs. Undirected graphs list each edge once per direction.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn adjacency(&self) -> &[Vec<f64>] {
        &self.adjacency
    }

    pub fn weight(&self, from: usize, to: usize) -> f64 {
        self.adjacency[from][to]
    }

    pub fn out_degree(&self, i: usize) -> f64 {
        self.adjacency[i].iter().sum()
    }

    pub fn in_degree(&self, i: usize) -> f64 {
        self.adjacency.iter().map(|row| row[i]).sum()
    }

    /// Number of agents whose state agent `i` uses, `card` of its neighbor set.
    pub fn neighbor_count(&self, i: usize) -> usize {
        self.adjacency[i].iter().filter(|&&w| w > 0.0).count()
    }

    /// Agents `j` with an arc `i -> j`.
    pub fn out_neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.adjacency[i][j] > 0.0)
    }

    /// Agents `j` with an arc `j -> i`.
    pub fn in_neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.adjacency[j][i] > 0.0)
    }

    /// `L = D_out - A`.
    pub fn laplacian(&self) -> Vec<Vec<f64>> {
        let mut l: Vec<Vec<f64>> = self
            .adjacency
            .iter()
            .map(|row| row.iter().map(|w| -w).collect())
            .collect();
        for (i, row) in l.iter_mut().enumerate() {
            row[i] = self.out_degree(i);
        }
        l
    }

    /// True iff in-degree equals out-degree at every agent.
    ///
    /// Compared exactly on the stored weights; undirected graphs are always
    /// balanced.
    pub fn is_weight_balanced(&self) -> bool {
        if self.undirected {
            return true;
        }
        (0..self.n).all(|i| self.out_degree(i) == self.in_degree(i))
    }

    /// Weak connectivity, used only to warn about disconnected inputs.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for j in 0..self.n {
                let linked = self.adjacency[i][j] > 0.0 || self.adjacency[j][i] > 0.0;
                if linked && !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// `out = -L v` computed directly from the adjacency rows.
pub(crate) fn neg_laplacian_apply(adjacency: &[Vec<f64>], v: &[f64], out: &mut [f64]) {
    for (i, row) in adjacency.iter().enumerate() {
        let mut acc = 0.0;
        for (j, &w) in row.iter().enumerate() {
            if w != 0.0 {
                acc += w * (v[j] - v[i]);
            }
        }
        out[i] = acc;
    }
}
