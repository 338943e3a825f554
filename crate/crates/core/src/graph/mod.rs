//! Simple undirected graphs on `0..n` and configuration-model multigraphs.

mod io;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::GraphFile;

/// An unordered vertex pair, stored with the smaller endpoint first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge(pub usize, pub usize);

impl Edge {
    pub fn new(a: usize, b: usize) -> Self {
        if a <= b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }

    pub fn other(self, x: usize) -> usize {
        if x == self.0 {
            self.1
        } else {
            debug_assert_eq!(x, self.1);
            self.0
        }
    }

    pub fn contains(self, x: usize) -> bool {
        self.0 == x || self.1 == x
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.0, self.1)
    }
}

impl From<(usize, usize)> for Edge {
    fn from((a, b): (usize, usize)) -> Self {
        Edge::new(a, b)
    }
}

/// Simple undirected graph. Immutable once built.
///
/// Adjacency lists are sorted; `has_edge` is a binary search.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edges: Vec<Edge>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            edges: Vec::new(),
        }
    }

    /// Builds a graph, rejecting loops, parallel edges and out-of-range endpoints.
    pub fn from_edges<I, E>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: Into<Edge>,
    {
        let mut list: Vec<Edge> = Vec::new();
        for e in edges {
            let e = e.into();
            if e.1 >= n {
                return Err(Error::VertexOutOfRange { vertex: e.1, n });
            }
            if e.0 == e.1 {
                return Err(Error::SelfLoop(e.0));
            }
            list.push(e);
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }
        Ok(Self::from_sorted_unique(n, list))
    }

    /// Like [`Graph::from_edges`] but silently drops duplicates. Loops are still rejected.
    pub fn from_edges_dedup<I, E>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: Into<Edge>,
    {
        let mut list: Vec<Edge> = edges.into_iter().map(Into::into).collect();
        list.sort_unstable();
        list.dedup();
        Self::from_edges(n, list)
    }

    fn from_sorted_unique(n: usize, edges: Vec<Edge>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for e in &edges {
            adj[e.0].push(e.1);
            adj[e.1].push(e.0);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { adj, edges }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| Edge(u, v)));
        Self::from_sorted_unique(n, edges.collect())
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least three vertices");
        Self::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle is simple")
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("path is simple")
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub(crate) fn adjacency(&self) -> &[Vec<usize>] {
        &self.adj
    }

    /// All edges in lexicographic order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if u >= self.n() || v >= self.n() || u == v {
            return false;
        }
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adj[a].binary_search(&b).is_ok()
    }

    pub fn contains_edge(&self, e: Edge) -> bool {
        self.has_edge(e.0, e.1)
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Subgraph induced on `vertices`, relabelled `0..vertices.len()` in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut label = vec![usize::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            label[v] = i;
        }
        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .filter(|e| label[e.0] != usize::MAX && label[e.1] != usize::MAX)
            .map(|e| Edge::new(label[e.0], label[e.1]))
            .collect();
        edges.sort_unstable();
        Self::from_sorted_unique(vertices.len(), edges)
    }

    /// Number of edges with both endpoints in the set marked by `inside`.
    pub fn edges_within(&self, inside: &[bool]) -> usize {
        self.edges
            .iter()
            .filter(|e| inside[e.0] && inside[e.1])
            .count()
    }

    /// Same vertex set, with the listed edges removed. Edges not present are ignored.
    pub fn without_edges(&self, remove: &HashSet<Edge>) -> Graph {
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|e| !remove.contains(e))
            .collect();
        Self::from_sorted_unique(self.n(), edges)
    }

    /// Same vertex set, with extra edges added. Edges already present are kept once.
    pub fn with_edges(&self, extra: impl IntoIterator<Item = Edge>) -> Result<Graph> {
        Self::from_edges_dedup(self.n(), self.edges.iter().copied().chain(extra))
    }

    /// Sizes of connected components, as a per-vertex component id plus count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let n = self.n();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for &w in &self.adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    pub fn is_connected(&self) -> bool {
        self.n() == 0 || self.components().1 == 1
    }

    /// Asserts the representation invariants. Used by tests.
    pub fn check_invariants(&self) -> bool {
        let n = self.n();
        let mut incident = vec![0usize; n];
        for e in &self.edges {
            if e.0 >= e.1 || e.1 >= n {
                return false;
            }
            incident[e.0] += 1;
            incident[e.1] += 1;
        }
        if self.edges.windows(2).any(|w| w[0] >= w[1]) {
            return false;
        }
        (0..n).all(|v| {
            self.adj[v].len() == incident[v]
                && self.adj[v].windows(2).all(|w| w[0] < w[1])
                && self.adj[v].iter().all(|&w| self.adj[w].binary_search(&v).is_ok())
        })
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n())
            .field("m", &self.m())
            .field("edges", &self.edges)
            .finish()
    }
}

/// Multigraph produced by pairing configuration points. Loops are allowed and
/// count twice towards the degree of their vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl MultiGraph {
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(a, b) in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    pub fn loop_count(&self) -> usize {
        self.edges.iter().filter(|(a, b)| a == b).count()
    }

    pub fn is_simple(&self) -> bool {
        let mut seen = HashSet::with_capacity(self.edges.len());
        self.edges
            .iter()
            .all(|&(a, b)| a != b && seen.insert(Edge::new(a, b)))
    }

    /// The underlying simple graph, if there are no loops or parallel edges.
    pub fn to_simple(&self) -> Option<Graph> {
        Graph::from_edges(self.n, self.edges.iter().copied()).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_loops_and_duplicates() {
        assert!(matches!(
            Graph::from_edges(3, [(1, 1)]),
            Err(Error::SelfLoop(1))
        ));
        assert!(matches!(
            Graph::from_edges(3, [(0, 1), (1, 0)]),
            Err(Error::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            Graph::from_edges(3, [(0, 3)]),
            Err(Error::VertexOutOfRange { vertex: 3, n: 3 })
        ));
    }

    #[test]
    fn adjacency_matches_edges() {
        let g = Graph::from_edges(5, [(0, 1), (3, 1), (2, 4), (0, 4)]).unwrap();
        assert!(g.check_invariants());
        assert_eq!(g.neighbors(1), &[0, 3]);
        assert!(g.has_edge(4, 0));
        assert!(!g.has_edge(1, 2));
        assert_eq!(g.degree(0), 2);
    }

    #[test]
    fn induced_relabels() {
        let g = Graph::complete(5);
        let h = g.induced(&[4, 1, 2]);
        assert_eq!(h.n(), 3);
        assert_eq!(h.m(), 3);
        let p = Graph::path(4).induced(&[0, 2, 3]);
        assert_eq!(p.edges(), &[Edge(1, 2)]);
    }

    #[test]
    fn multigraph_simplicity() {
        let mg = MultiGraph {
            n: 2,
            edges: vec![(0, 1), (1, 0)],
        };
        assert!(!mg.is_simple());
        assert_eq!(mg.degrees(), vec![2, 2]);
        let looped = MultiGraph {
            n: 2,
            edges: vec![(0, 0)],
        };
        assert_eq!(looped.degrees(), vec![2, 0]);
        assert_eq!(looped.loop_count(), 1);
        assert!(looped.to_simple().is_none());
    }
}
