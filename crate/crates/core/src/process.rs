//! The random graph process `G_0 ⊂ G_1 ⊂ ...` and the k-core threshold `τ_k`.

use std::collections::HashSet;

use rand::Rng as _;

use crate::graph::{Edge, Graph};
use crate::kcore::{core_is_nonempty, k_core, CoreResult};
use crate::seed::{self, Rng};

/// One step of the process: `edge` is the edge added to obtain `G_t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProcessStep {
    pub t: usize,
    pub edge: Edge,
}

/// Snapshot of the process at step `t`.
#[derive(Clone, Debug)]
pub struct ProcessState {
    pub t: usize,
    pub graph: Graph,
    pub seed: u64,
}

/// Lazily generated random graph process on `n` vertices.
///
/// Each new edge is uniform over the current non-edges. While fewer than half
/// of all pairs are present this is done by rejection against the edge set;
/// past that point the remaining pairs are listed once and drawn without
/// replacement. Edges are generated on demand and remembered, so prefixes can
/// be revisited (`graph_at`) after looking ahead.
pub struct ProcessStream {
    n: usize,
    seed: u64,
    rng: Rng,
    history: Vec<Edge>,
    present: HashSet<Edge>,
    complement: Option<Vec<Edge>>,
    cursor: usize,
}

impl ProcessStream {
    pub fn new(n: usize, seed: u64) -> Self {
        assert!(n >= 2, "the process needs at least two vertices");
        ProcessStream {
            n,
            seed,
            rng: seed::rng(seed),
            history: Vec::new(),
            present: HashSet::new(),
            complement: None,
            cursor: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn total_pairs(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    /// The first `t` edges, generating them if needed. Panics past `n(n-1)/2`.
    pub fn prefix(&mut self, t: usize) -> &[Edge] {
        assert!(t <= self.total_pairs(), "process has only n(n-1)/2 steps");
        while self.history.len() < t {
            let e = self.draw();
            self.history.push(e);
        }
        &self.history[..t]
    }

    pub fn graph_at(&mut self, t: usize) -> Graph {
        let n = self.n;
        Graph::from_edges(n, self.prefix(t).iter().copied()).expect("process edges are distinct")
    }

    pub fn state_at(&mut self, t: usize) -> ProcessState {
        ProcessState {
            t,
            graph: self.graph_at(t),
            seed: self.seed,
        }
    }

    fn draw(&mut self) -> Edge {
        let total = self.total_pairs();
        if self.complement.is_none() && 2 * self.present.len() >= total {
            let rest = (0..self.n)
                .flat_map(|u| (u + 1..self.n).map(move |v| Edge(u, v)))
                .filter(|e| !self.present.contains(e))
                .collect();
            self.complement = Some(rest);
        }
        let e = match &mut self.complement {
            Some(rest) => {
                let i = self.rng.random_range(0..rest.len());
                rest.swap_remove(i)
            }
            None => loop {
                let u = self.rng.random_range(0..self.n);
                let v = self.rng.random_range(0..self.n);
                if u == v {
                    continue;
                }
                let e = Edge::new(u, v);
                if !self.present.contains(&e) {
                    break e;
                }
            },
        };
        self.present.insert(e);
        e
    }

    /// Smallest `t` whose graph has a non-empty k-core, with that core.
    ///
    /// Vertex degrees are tracked while the prefix grows; a core is only
    /// searched for once at least `k + 1` vertices have degree `k`. The
    /// threshold is then bracketed by geometric steps and pinned by
    /// bisection, so only O(log t) full peelings are run.
    pub fn tau_k(&mut self, k: usize) -> (usize, CoreResult) {
        assert!(k >= 1);
        let n = self.n;
        let total = self.total_pairs();
        let mut deg = vec![0usize; n];
        let mut rich = 0usize;
        let mut t = 0usize;
        while rich <= k {
            if t == total {
                break;
            }
            let e = self.prefix(t + 1)[t];
            t += 1;
            for v in [e.0, e.1] {
                deg[v] += 1;
                if deg[v] == k {
                    rich += 1;
                }
            }
        }
        // t is a lower bound: the core cannot exist earlier
        let mut lo = t.saturating_sub(1);
        let mut hi = t;
        while !core_is_nonempty(n, self.prefix(hi), k) {
            lo = hi;
            hi = (hi + hi / 4 + 1).min(total);
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if core_is_nonempty(n, self.prefix(mid), k) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let core = k_core(&self.graph_at(hi), k);
        debug_assert!(!core.is_empty());
        (hi, core)
    }
}

impl Iterator for ProcessStream {
    type Item = ProcessStep;

    fn next(&mut self) -> Option<ProcessStep> {
        if self.cursor >= self.total_pairs() {
            return None;
        }
        let c = self.cursor;
        let edge = self.prefix(c + 1)[c];
        self.cursor += 1;
        Some(ProcessStep {
            t: self.cursor,
            edge,
        })
    }
}

pub fn process_stream(n: usize, seed: u64) -> ProcessStream {
    ProcessStream::new(n, seed)
}

pub fn tau_k(n: usize, k: usize, seed: u64) -> (usize, CoreResult) {
    ProcessStream::new(n, seed).tau_k(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_processes_exhaust() {
        let steps: Vec<ProcessStep> = process_stream(3, 1).collect();
        assert_eq!(steps.len(), 3);
        assert_eq!(process_stream(3, 1).graph_at(3), Graph::complete(3));
        let two: Vec<ProcessStep> = process_stream(2, 9).collect();
        assert_eq!(two, vec![ProcessStep { t: 1, edge: Edge(0, 1) }]);
    }

    #[test]
    fn deterministic_given_seed() {
        let a: Vec<Edge> = process_stream(100, 42).take(500).map(|s| s.edge).collect();
        let b: Vec<Edge> = process_stream(100, 42).take(500).map(|s| s.edge).collect();
        let c: Vec<Edge> = process_stream(100, 43).take(500).map(|s| s.edge).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn full_run_visits_every_pair_once() {
        let mut s = process_stream(30, 5);
        let all = s.prefix(435).to_vec();
        let set: HashSet<Edge> = all.iter().copied().collect();
        assert_eq!(set.len(), 435);
        assert_eq!(s.next().map(|x| x.t), Some(1));
    }

    #[test]
    fn tau_on_k_plus_one_vertices_is_complete_graph() {
        for k in 3..6 {
            let (t, core) = tau_k(k + 1, k, 11);
            assert_eq!(t, (k + 1) * k / 2);
            assert_eq!(core.len(), k + 1);
        }
    }

    #[test]
    fn tau_matches_linear_scan() {
        for seed in 0..10 {
            let n = 60;
            let mut s = process_stream(n, seed);
            let (t, core) = s.tau_k(3);
            let first = (1..=s.total_pairs())
                .find(|&t| !k_core(&s.graph_at(t), 3).is_empty())
                .unwrap();
            assert_eq!(t, first);
            let batch = k_core(&s.graph_at(t), 3);
            assert_eq!(batch.core_vertices, core.core_vertices);
        }
    }

    #[test]
    fn cores_grow_along_the_process() {
        let mut s = process_stream(200, 3);
        let mut prev: Vec<usize> = Vec::new();
        for t in (0..1200).step_by(40) {
            let core = k_core(&s.graph_at(t), 3);
            assert!(prev.iter().all(|v| core.core_vertices.binary_search(v).is_ok()));
            prev = core.core_vertices;
        }
    }
}
