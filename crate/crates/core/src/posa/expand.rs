use std::collections::HashSet;

use serde::Serialize;

use super::host::HostGraph;
use crate::graph::Edge;

const NONE: usize = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug)]
pub struct ExpandConfig<'a> {
    pub depth_limit: usize,
    /// Deduplicate by whole path instead of by endpoint: explores every path
    /// reachable within the depth limit. Exponential; for small hosts only.
    pub exhaustive: bool,
    /// Return as soon as a rotation deletes a fake edge or an endpoint is
    /// adjacent to the fixed end.
    pub stop_on_event: bool,
    pub max_nodes: usize,
    /// Edges that may be neither inserted by a rotation nor used to close.
    pub avoid: Option<&'a HashSet<Edge>>,
}

impl ExpandConfig<'_> {
    pub fn new(depth_limit: usize) -> Self {
        ExpandConfig {
            depth_limit,
            exhaustive: false,
            stop_on_event: true,
            max_nodes: usize::MAX,
            avoid: None,
        }
    }
}

/// A starting Hamilton path, its fake edges, and the number of rotations
/// already spent to reach it.
#[derive(Clone, Debug)]
pub struct Root {
    pub path: Vec<usize>,
    pub fake: HashSet<Edge>,
    pub offset: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RotationNode {
    pub parent: Option<usize>,
    pub root: usize,
    /// `NONE` for roots.
    pub pivot: usize,
    pub endpoint: usize,
    pub depth: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RotationEvent {
    /// The rotation producing `node` deleted the fake edge `deleted`.
    FakeDeleted { node: usize, deleted: Edge },
    /// The far end of `node` is adjacent to the fixed end.
    ClosingChord { node: usize },
}

/// Bookkeeping of one completed expansion level `ℓ -> ℓ + 1`.
#[derive(Clone, Debug, Serialize)]
pub struct LevelStats {
    pub level: usize,
    pub end_before: usize,
    pub end_after: usize,
    pub union_size: usize,
    pub union_edges: usize,
    pub holds: bool,
}

impl LevelStats {
    /// `ℓ <= 4`, or endpoint growth by 1.1, or `End ∪ Pivot` spanning at least
    /// `1.1 |End ∪ Pivot|` edges.
    pub fn disjunction(level: usize, before: usize, after: usize, size: usize, edges: usize) -> bool {
        level <= 4 || after as f64 >= 1.1 * before as f64 || edges as f64 >= 1.1 * size as f64
    }
}

/// Breadth-first rotation search with a fixed end.
#[derive(Clone, Debug)]
pub struct RotationState {
    pub fixed_end: usize,
    pub side: Side,
    pub roots: Vec<Root>,
    pub nodes: Vec<RotationNode>,
    /// First witness node of each endpoint, in discovery order.
    pub witnesses: Vec<(usize, usize)>,
    pub pivots: Vec<usize>,
    pub levels: Vec<LevelStats>,
    pub depth_reached: usize,
    pub event: Option<RotationEvent>,
    pub truncated: bool,
}

impl RotationState {
    /// Every root must start at `fixed_end` and span the same vertices.
    pub fn new(fixed_end: usize, side: Side, roots: Vec<Root>) -> Self {
        debug_assert!(roots.iter().all(|r| r.path[0] == fixed_end));
        RotationState {
            fixed_end,
            side,
            roots,
            nodes: Vec::new(),
            witnesses: Vec::new(),
            pivots: Vec::new(),
            levels: Vec::new(),
            depth_reached: 0,
            event: None,
            truncated: false,
        }
    }

    /// The endpoint set, ascending.
    pub fn endpoints(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.witnesses.iter().map(|w| w.0).collect();
        out.sort_unstable();
        out
    }

    pub fn witness(&self, endpoint: usize) -> Option<usize> {
        self.witnesses.iter().find(|w| w.0 == endpoint).map(|w| w.1)
    }

    /// Rotations from the original glued path to `node`.
    pub fn total_depth(&self, node: usize) -> usize {
        let nd = &self.nodes[node];
        nd.depth + self.roots[nd.root].offset
    }

    pub fn claim_violations(&self) -> usize {
        self.levels.iter().filter(|l| !l.holds).count()
    }

    /// Replays the rotations leading to `node`.
    pub fn path_of(&self, node: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut cur = node;
        while let Some(p) = self.nodes[cur].parent {
            pivots.push(self.nodes[cur].pivot);
            cur = p;
        }
        let mut path = self.roots[self.nodes[node].root].path.clone();
        for &pivot in pivots.iter().rev() {
            let p = path.iter().position(|&v| v == pivot).expect("pivot on path");
            path[p + 1..].reverse();
        }
        debug_assert_eq!(path[0], self.fixed_end);
        debug_assert_eq!(path[path.len() - 1], self.nodes[node].endpoint);
        path
    }

    /// Fake edges of the root of `node` that are still on its path.
    pub fn fakes_on_path(&self, node: usize, path: &[usize]) -> HashSet<Edge> {
        let fake = &self.roots[self.nodes[node].root].fake;
        path.windows(2)
            .map(|w| Edge::new(w[0], w[1]))
            .filter(|e| fake.contains(e))
            .collect()
    }
}

struct Marks {
    end: Vec<bool>,
    pivot: Vec<bool>,
    union: Vec<bool>,
    end_count: usize,
    union_size: usize,
    union_edges: usize,
}

impl Marks {
    fn add_union(&mut self, host: &HostGraph, v: usize) {
        if self.union[v] {
            return;
        }
        self.union[v] = true;
        self.union_size += 1;
        self.union_edges += host.neighbors(v).iter().filter(|&&w| self.union[w]).count();
    }
}

/// Breadth-first search over rotation space from the roots of `state`, up to
/// `cfg.depth_limit` rotations. A rotation inserts a host edge from the far
/// end to an interior path vertex; edges in `cfg.avoid` are skipped. Each
/// completed level is checked against [`LevelStats::disjunction`].
pub fn expand_endpoints(host: &HostGraph, mut state: RotationState, cfg: &ExpandConfig) -> RotationState {
    let n = host.n();
    let fixed = state.fixed_end;
    let mut marks = Marks {
        end: vec![false; n],
        pivot: vec![false; n],
        union: vec![false; n],
        end_count: 0,
        union_size: 0,
        union_edges: 0,
    };
    let avoided = |e: Edge| cfg.avoid.is_some_and(|a| a.contains(&e));
    let closes = |v: usize| host.has_edge(fixed, v) && !avoided(Edge::new(fixed, v));
    let mut seen_paths: HashSet<Vec<usize>> = HashSet::new();
    let mut frontier: Vec<(usize, Vec<usize>)> = Vec::new();

    for (r, root) in state.roots.iter().enumerate() {
        let far = *root.path.last().expect("non-empty root");
        let id = state.nodes.len();
        state.nodes.push(RotationNode {
            parent: None,
            root: r,
            pivot: NONE,
            endpoint: far,
            depth: 0,
        });
        if !marks.end[far] {
            marks.end[far] = true;
            marks.end_count += 1;
            marks.add_union(host, far);
            state.witnesses.push((far, id));
        }
        if cfg.exhaustive {
            seen_paths.insert(root.path.clone());
        }
        if root.path.len() > 2 && closes(far) && state.event.is_none() {
            state.event = Some(RotationEvent::ClosingChord { node: id });
            if cfg.stop_on_event {
                return state;
            }
        }
        frontier.push((id, root.path.clone()));
    }

    let mut pos = vec![NONE; n];
    for level in 0..cfg.depth_limit {
        let end_before = marks.end_count;
        let mut next = Vec::new();
        for (id, path) in &frontier {
            let s = path.len();
            for (i, &v) in path.iter().enumerate() {
                pos[v] = i;
            }
            let far = path[s - 1];
            let root = state.nodes[*id].root;
            for &x in host.neighbors(far) {
                let p = pos[x];
                if p == 0 || p + 2 >= s {
                    continue;
                }
                let inserted = Edge::new(far, x);
                if avoided(inserted) {
                    continue;
                }
                debug_assert!(!state.roots[root].fake.contains(&inserted));
                let new_end = path[p + 1];
                let deleted = Edge::new(x, new_end);
                if !marks.pivot[x] {
                    marks.pivot[x] = true;
                    marks.add_union(host, x);
                }
                let fake_hit = state.roots[root].fake.contains(&deleted);
                let rotated = || {
                    let mut r = path.clone();
                    r[p + 1..].reverse();
                    r
                };
                let new_path = if cfg.exhaustive {
                    let r = rotated();
                    if !fake_hit && !seen_paths.insert(r.clone()) {
                        continue;
                    }
                    Some(r)
                } else {
                    None
                };
                if !fake_hit && !cfg.exhaustive && marks.end[new_end] {
                    continue;
                }
                let node = state.nodes.len();
                state.nodes.push(RotationNode {
                    parent: Some(*id),
                    root,
                    pivot: x,
                    endpoint: new_end,
                    depth: level + 1,
                });
                state.depth_reached = state.depth_reached.max(level + 1);
                if !marks.end[new_end] {
                    marks.end[new_end] = true;
                    marks.end_count += 1;
                    marks.add_union(host, new_end);
                    state.witnesses.push((new_end, node));
                }
                if fake_hit {
                    if state.event.is_none() {
                        state.event = Some(RotationEvent::FakeDeleted { node, deleted });
                    }
                    if cfg.stop_on_event {
                        return state;
                    }
                    continue;
                }
                if closes(new_end) && state.event.is_none() {
                    state.event = Some(RotationEvent::ClosingChord { node });
                    if cfg.stop_on_event {
                        return state;
                    }
                }
                next.push((node, new_path.unwrap_or_else(rotated)));
                if state.nodes.len() >= cfg.max_nodes {
                    state.truncated = true;
                    return state;
                }
            }
            for &v in path {
                pos[v] = NONE;
            }
        }
        state.levels.push(LevelStats {
            level,
            end_before,
            end_after: marks.end_count,
            union_size: marks.union_size,
            union_edges: marks.union_edges,
            holds: LevelStats::disjunction(
                level,
                end_before,
                marks.end_count,
                marks.union_size,
                marks.union_edges,
            ),
        });
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    state.pivots = (0..n).filter(|&v| marks.pivot[v]).collect();
    state
}
