//! Exact maximum b-matchings through the vertex-copy / edge-gadget reduction
//! to ordinary matching.
//!
//! Vertex `v` becomes `b(v)` copies; edge `j = {u, v}` becomes two nodes
//! `u_j`, `v_j` joined to each other, `u_j` to every copy of `u` and `v_j` to
//! every copy of `v`. A b-matching `B` corresponds to the gadget matching that
//! pairs `u_j, v_j` with copies when `j ∈ B` and with each other otherwise;
//! that matching has `m + |B|` edges, and every maximum gadget matching
//! arises this way up to ties.

use super::blossom::{Blossom, NONE};
use crate::graph::{Edge, Graph};

struct Gadget<'g> {
    g: &'g Graph,
    copy_start: Vec<usize>,
    copies: usize,
    adj: Vec<Vec<usize>>,
}

impl<'g> Gadget<'g> {
    fn new(g: &'g Graph, caps: &[usize]) -> Self {
        let n = g.n();
        let mut copy_start = vec![0; n + 1];
        for v in 0..n {
            copy_start[v + 1] = copy_start[v] + caps[v];
        }
        let copies = copy_start[n];
        let total = copies + 2 * g.m();
        let mut adj = vec![Vec::new(); total];
        for (j, e) in g.edges().iter().enumerate() {
            let (eu, ev) = (copies + 2 * j, copies + 2 * j + 1);
            adj[eu].push(ev);
            adj[ev].push(eu);
            for (node, v) in [(eu, e.0), (ev, e.1)] {
                for c in copy_start[v]..copy_start[v + 1] {
                    adj[node].push(c);
                    adj[c].push(node);
                }
            }
        }
        Gadget {
            g,
            copy_start,
            copies,
            adj,
        }
    }

    fn mates_for(&self, chosen: &[bool]) -> Vec<usize> {
        let mut mate = vec![NONE; self.adj.len()];
        let mut next: Vec<usize> = self.copy_start[..self.g.n()].to_vec();
        for (j, e) in self.g.edges().iter().enumerate() {
            let (eu, ev) = (self.copies + 2 * j, self.copies + 2 * j + 1);
            if chosen[j] {
                for (node, v) in [(eu, e.0), (ev, e.1)] {
                    let c = next[v];
                    debug_assert!(c < self.copy_start[v + 1], "capacity exceeded");
                    next[v] += 1;
                    mate[node] = c;
                    mate[c] = node;
                }
            } else {
                mate[eu] = ev;
                mate[ev] = eu;
            }
        }
        mate
    }

    fn extract(&self, mate: &[usize]) -> Vec<Edge> {
        self.g
            .edges()
            .iter()
            .enumerate()
            .filter(|(j, _)| {
                let (eu, ev) = (self.copies + 2 * j, self.copies + 2 * j + 1);
                mate[eu] != NONE && mate[eu] < self.copies && mate[ev] != NONE && mate[ev] < self.copies
            })
            .map(|(_, &e)| e)
            .collect()
    }

    fn chosen_mask(&self, edges: &[Edge]) -> Vec<bool> {
        let mut mask = vec![false; self.g.m()];
        for e in edges {
            let j = self
                .g
                .edges()
                .binary_search(e)
                .expect("b-matching edge belongs to the graph");
            mask[j] = true;
        }
        mask
    }
}

/// Greedy start: edges in order of increasing endpoint degree sum.
fn greedy(g: &Graph, caps: &[usize]) -> Vec<Edge> {
    let mut order: Vec<Edge> = g.edges().to_vec();
    order.sort_by_key(|e| (g.degree(e.0) + g.degree(e.1), *e));
    let mut left = caps.to_vec();
    let mut out = Vec::new();
    for e in order {
        if left[e.0] > 0 && left[e.1] > 0 {
            left[e.0] -= 1;
            left[e.1] -= 1;
            out.push(e);
        }
    }
    out
}

/// Largest edge set in which each vertex `v` has degree at most `caps[v]`,
/// grown from the feasible set `start`.
pub(crate) fn max_b_matching_from(g: &Graph, caps: &[usize], start: &[Edge]) -> Vec<Edge> {
    let gadget = Gadget::new(g, caps);
    let mates = gadget.mates_for(&gadget.chosen_mask(start));
    let mut edges = gadget.extract(&Blossom::new(&gadget.adj, mates).run());
    edges.sort_unstable();
    edges
}

/// One augmentation of the feasible set `current` that raises the degree of
/// `root`, if any exists.
pub(crate) fn augment_b_matching_at(
    g: &Graph,
    caps: &[usize],
    current: &[Edge],
    root: usize,
) -> Option<Vec<Edge>> {
    let gadget = Gadget::new(g, caps);
    let mates = gadget.mates_for(&gadget.chosen_mask(current));
    let mut blossom = Blossom::new(&gadget.adj, mates);
    for c in gadget.copy_start[root]..gadget.copy_start[root + 1] {
        if blossom.mate[c] == NONE {
            // all free copies of root are interchangeable
            if blossom.search(c) {
                let mut edges = gadget.extract(&blossom.mate);
                edges.sort_unstable();
                return Some(edges);
            }
            return None;
        }
    }
    None
}

/// A maximum subgraph of `g` with maximum degree at most `b`.
pub fn max_b_matching(g: &Graph, b: usize) -> Graph {
    let caps = vec![b; g.n()];
    let start = greedy(g, &caps);
    Graph::from_edges(g.n(), max_b_matching_from(g, &caps, &start)).expect("subgraph of a simple graph")
}
