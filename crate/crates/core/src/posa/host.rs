use std::collections::HashSet;

use crate::graph::{Edge, Graph};

/// A graph that grows as reservoir edges are consumed.
#[derive(Clone, Debug)]
pub struct HostGraph {
    adj: Vec<Vec<usize>>,
    edges: HashSet<Edge>,
}

impl HostGraph {
    pub fn new(g: &Graph) -> Self {
        HostGraph {
            adj: (0..g.n()).map(|v| g.neighbors(v).to_vec()).collect(),
            edges: g.edges().iter().copied().collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.edges.contains(&Edge::new(u, v))
    }

    /// Adds `e`; returns `false` if it was already present.
    pub fn add_edge(&mut self, e: Edge) -> bool {
        if e.0 == e.1 || !self.edges.insert(e) {
            return false;
        }
        self.adj[e.0].push(e.1);
        self.adj[e.1].push(e.0);
        true
    }
}
