//! k-core extraction by bucket-queue peeling.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::graph::{Edge, Graph};

#[derive(Clone, Debug, Serialize)]
pub struct CoreResult {
    pub k: usize,
    /// Original ids of the core vertices, ascending. Vertex `i` of
    /// `core_graph` is `core_vertices[i]`.
    pub core_vertices: Vec<usize>,
    #[serde(skip)]
    pub core_graph: Graph,
    /// Removed vertices, in removal order.
    pub peel_order: Vec<usize>,
}

impl CoreResult {
    pub fn is_empty(&self) -> bool {
        self.core_vertices.is_empty()
    }

    pub fn len(&self) -> usize {
        self.core_vertices.len()
    }

    /// Core edges in original labels.
    pub fn original_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.core_graph
            .edges()
            .iter()
            .map(|e| Edge::new(self.core_vertices[e.0], self.core_vertices[e.1]))
    }
}

/// The maximal subgraph of minimum degree at least `k`.
///
/// Vertices of degree below `k` are peeled from a bucket queue; the lowest
/// bucket is served first and ties go to the smallest vertex id, so
/// `peel_order` is reproducible.
pub fn k_core(g: &Graph, k: usize) -> CoreResult {
    assert!(k >= 1, "k-core needs k >= 1");
    let n = g.n();
    let mut deg = g.degrees();
    let mut removed = vec![false; n];
    let mut buckets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k];
    for v in 0..n {
        if deg[v] < k {
            buckets[deg[v]].insert(v);
        }
    }
    let mut peel_order = Vec::new();
    while let Some(b) = buckets.iter().position(|s| !s.is_empty()) {
        let v = buckets[b].pop_first().expect("bucket is non-empty");
        removed[v] = true;
        peel_order.push(v);
        for &w in g.neighbors(v) {
            if removed[w] {
                continue;
            }
            let d = deg[w];
            deg[w] -= 1;
            if d < k {
                buckets[d].remove(&w);
            }
            if d - 1 < k {
                buckets[d - 1].insert(w);
            }
        }
    }
    let core_vertices: Vec<usize> = (0..n).filter(|&v| !removed[v]).collect();
    let core_graph = g.induced(&core_vertices);
    CoreResult {
        k,
        core_vertices,
        core_graph,
        peel_order,
    }
}

/// Whether the k-core of the graph on `0..n` spanned by `edges` is non-empty.
/// Array-only peeling; used for threshold searches over process prefixes.
pub(crate) fn core_is_nonempty(n: usize, edges: &[Edge], k: usize) -> bool {
    let mut deg = vec![0usize; n];
    for e in edges {
        deg[e.0] += 1;
        deg[e.1] += 1;
    }
    if deg.iter().filter(|&&d| d >= k).count() <= k {
        return false;
    }
    let mut start = vec![0usize; n + 1];
    for v in 0..n {
        start[v + 1] = start[v] + deg[v];
    }
    let mut fill = start.clone();
    let mut nbr = vec![0usize; start[n]];
    for e in edges {
        nbr[fill[e.0]] = e.1;
        fill[e.0] += 1;
        nbr[fill[e.1]] = e.0;
        fill[e.1] += 1;
    }
    let mut alive = n;
    let mut removed = vec![false; n];
    let mut stack: Vec<usize> = (0..n).filter(|&v| deg[v] < k).collect();
    for &v in &stack {
        removed[v] = true;
    }
    while let Some(v) = stack.pop() {
        alive -= 1;
        for &w in &nbr[start[v]..start[v + 1]] {
            if removed[w] {
                continue;
            }
            deg[w] -= 1;
            if deg[w] < k {
                removed[w] = true;
                stack.push(w);
            }
        }
    }
    alive > 0
}
