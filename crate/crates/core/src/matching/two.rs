use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use super::bmatching::{augment_b_matching_at, max_b_matching_from};
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};

const NONE: usize = usize::MAX;

/// An edge set in which every vertex has degree at most two.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoMatching {
    partners: Vec<[usize; 2]>,
    size: usize,
}

impl TwoMatching {
    pub fn empty(n: usize) -> Self {
        TwoMatching {
            partners: vec![[NONE; 2]; n],
            size: 0,
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut m = TwoMatching::empty(n);
        for e in edges {
            if e.1 >= n {
                return Err(Error::VertexOutOfRange { vertex: e.1, n });
            }
            if e.0 == e.1 {
                return Err(Error::SelfLoop(e.0));
            }
            if m.contains(e) {
                return Err(Error::InvalidTwoMatching(format!("edge {e:?} listed twice")));
            }
            if m.deg_in(e.0) == 2 || m.deg_in(e.1) == 2 {
                return Err(Error::InvalidTwoMatching(format!(
                    "edge {e:?} raises a vertex above degree 2"
                )));
            }
            m.insert(e);
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.partners.len()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn deg_in(&self, v: usize) -> usize {
        self.partners[v].iter().filter(|&&p| p != NONE).count()
    }

    pub fn partners(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.partners[v].iter().copied().filter(|&p| p != NONE)
    }

    pub fn contains(&self, e: Edge) -> bool {
        e.0 < self.n() && self.partners[e.0].contains(&e.1)
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out: Vec<Edge> = (0..self.n())
            .flat_map(|v| self.partners(v).filter(move |&p| v < p).map(move |p| Edge(v, p)))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn is_two_factor(&self) -> bool {
        (0..self.n()).all(|v| self.deg_in(v) == 2)
    }

    pub fn is_two_matching_of(&self, g: &Graph) -> bool {
        self.n() == g.n() && self.edges().iter().all(|&e| g.contains_edge(e))
    }

    fn insert(&mut self, e: Edge) {
        for (a, b) in [(e.0, e.1), (e.1, e.0)] {
            let slot = self.partners[a].iter().position(|&p| p == NONE).expect("free slot");
            self.partners[a][slot] = b;
        }
        self.size += 1;
    }

    fn remove(&mut self, e: Edge) {
        for (a, b) in [(e.0, e.1), (e.1, e.0)] {
            let slot = self.partners[a].iter().position(|&p| p == b).expect("edge present");
            self.partners[a][slot] = NONE;
        }
        self.size -= 1;
    }
}

impl Serialize for TwoMatching {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.edges().serialize(s)
    }
}

/// Reachability sets from a deficient vertex `v` that admits no augmenting
/// alternating path: `q` holds `v` and the vertices whose shortest alternating
/// path from `v` is even, `w` those whose shortest path is odd, and `q_prime`
/// every vertex reachable by some even alternating path.
#[derive(Clone, Debug, Default, Serialize)]
pub struct FailureWitness {
    pub root: Option<usize>,
    pub q: Vec<usize>,
    pub w: Vec<usize>,
    pub q_prime: Vec<usize>,
}

impl FailureWitness {
    /// `N(Q')`: vertices outside `Q'` adjacent to it.
    pub fn neighborhood(&self, g: &Graph) -> Vec<usize> {
        let inside: HashSet<usize> = self.q_prime.iter().copied().collect();
        let mut out: Vec<usize> = self
            .q_prime
            .iter()
            .flat_map(|&u| g.neighbors(u).iter().copied())
            .filter(|z| !inside.contains(z))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Every `z ∈ N(Q')` has an `m`-edge into `Q'`, hence `|N(Q')| <= 2|Q'|`.
    pub fn check_claim(&self, g: &Graph, m: &TwoMatching) -> bool {
        let inside: HashSet<usize> = self.q_prime.iter().copied().collect();
        let nb = self.neighborhood(g);
        nb.iter().all(|&z| m.partners(z).any(|p| inside.contains(&p)))
            && nb.len() <= 2 * self.q_prime.len()
    }
}

#[derive(Clone, Debug)]
pub enum AugmentOutcome {
    Augmented(TwoMatching),
    Stuck(FailureWitness),
}

fn validate(g: &Graph, m: &TwoMatching) -> Result<()> {
    if m.n() != g.n() {
        return Err(Error::InvalidTwoMatching(format!(
            "2-matching on {} vertices, graph on {}",
            m.n(),
            g.n()
        )));
    }
    if let Some(e) = m.edges().into_iter().find(|&e| !g.contains_edge(e)) {
        return Err(Error::InvalidTwoMatching(format!("edge {e:?} is not in the graph")));
    }
    Ok(())
}

/// Breadth-first search over `(vertex, parity)` states from the deficient
/// vertex `v`. Odd-numbered steps leave along non-`m` edges, even-numbered
/// steps along `m` edges. The first shortest walk that ends, after an odd
/// step, at a vertex of `m`-degree at most one and uses no edge twice is
/// applied as a symmetric difference.
///
/// Walks over-approximate trails: when no walk qualifies, no augmenting path
/// starts at `v` and the reachability sets are returned. When some walk
/// reaches a deficient vertex but every such walk repeats an edge, the exact
/// b-matching reduction decides.
pub fn augment_from(g: &Graph, m: &TwoMatching, v: usize) -> Result<AugmentOutcome> {
    validate(g, m)?;
    if v >= g.n() {
        return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
    }
    if m.deg_in(v) == 2 {
        return Err(Error::InvalidParameter(format!("vertex {v} is not deficient")));
    }
    Ok(augment_unchecked(g, m, v))
}

fn augment_unchecked(g: &Graph, m: &TwoMatching, v: usize) -> AugmentOutcome {
    let n = g.n();
    let mut dist = vec![NONE; 2 * n];
    let mut parent = vec![NONE; 2 * n];
    let mut queue = VecDeque::new();
    dist[2 * v] = 0;
    queue.push_back(2 * v);
    let mut inconclusive = false;
    while let Some(s) = queue.pop_front() {
        let (x, parity) = (s / 2, s % 2);
        let next: Vec<usize> = if parity == 0 {
            g.neighbors(x)
                .iter()
                .copied()
                .filter(|&y| !m.contains(Edge::new(x, y)))
                .collect()
        } else {
            m.partners(x).collect()
        };
        for y in next {
            let t = 2 * y + (1 - parity);
            if dist[t] != NONE {
                continue;
            }
            dist[t] = dist[s] + 1;
            parent[t] = s;
            if parity == 0 && m.deg_in(y) <= 1 && (y != v || m.deg_in(v) == 0) {
                if let Some(out) = apply_walk(m, &parent, t) {
                    return AugmentOutcome::Augmented(out);
                }
                inconclusive = true;
            }
            queue.push_back(t);
        }
    }
    if inconclusive {
        let caps = vec![2; n];
        if let Some(edges) = augment_b_matching_at(g, &caps, &m.edges(), v) {
            return AugmentOutcome::Augmented(
                TwoMatching::from_edges(n, edges).expect("gadget output is a 2-matching"),
            );
        }
    }
    let mut q = Vec::new();
    let mut w = Vec::new();
    let mut q_prime = Vec::new();
    for u in 0..n {
        let (even, odd) = (dist[2 * u], dist[2 * u + 1]);
        if even != NONE {
            q_prime.push(u);
        }
        match (even, odd) {
            (NONE, NONE) => {}
            (e, o) if e != NONE && (o == NONE || e < o) => q.push(u),
            _ => w.push(u),
        }
    }
    AugmentOutcome::Stuck(FailureWitness {
        root: Some(v),
        q,
        w,
        q_prime,
    })
}

fn apply_walk(m: &TwoMatching, parent: &[usize], end: usize) -> Option<TwoMatching> {
    let mut edges = Vec::new();
    let mut s = end;
    while parent[s] != NONE {
        edges.push(Edge::new(s / 2, parent[s] / 2));
        s = parent[s];
    }
    let mut seen = HashSet::with_capacity(edges.len());
    if !edges.iter().all(|e| seen.insert(*e)) {
        return None;
    }
    let mut out = m.clone();
    for e in &edges {
        if out.contains(*e) {
            out.remove(*e);
        }
    }
    for e in &edges {
        if !m.contains(*e) {
            out.insert(*e);
        }
    }
    debug_assert_eq!(out.size(), m.size() + 1);
    Some(out)
}

/// One augmentation from the smallest deficient vertex that admits one. When
/// none does, the failure witness of the smallest deficient vertex is
/// returned (an empty witness for a 2-factor).
pub fn augment_two_matching(g: &Graph, m: &TwoMatching) -> Result<AugmentOutcome> {
    validate(g, m)?;
    let mut first = None;
    for v in (0..g.n()).filter(|&v| m.deg_in(v) < 2) {
        match augment_unchecked(g, m, v) {
            AugmentOutcome::Augmented(out) => return Ok(AugmentOutcome::Augmented(out)),
            AugmentOutcome::Stuck(w) => {
                first.get_or_insert(w);
            }
        }
    }
    Ok(AugmentOutcome::Stuck(first.unwrap_or_default()))
}

/// Augments `start` until no deficient vertex admits an augmenting path.
pub fn max_two_matching_from(g: &Graph, start: &TwoMatching) -> Result<TwoMatching> {
    validate(g, start)?;
    let n = g.n();
    let mut m = start.clone();
    loop {
        let mut any = false;
        for v in 0..n {
            if m.deg_in(v) < 2 {
                if let AugmentOutcome::Augmented(out) = augment_unchecked(g, &m, v) {
                    m = out;
                    any = true;
                }
            }
        }
        if !any {
            break;
        }
    }
    debug_assert!(n > 200 || m.size() == max_b_matching_from(g, &vec![2; n], &m.edges()).len());
    Ok(m)
}

/// A maximum 2-matching of `g`.
pub fn max_two_matching(g: &Graph) -> TwoMatching {
    let mut m = TwoMatching::empty(g.n());
    for &e in g.edges() {
        if m.deg_in(e.0) < 2 && m.deg_in(e.1) < 2 {
            m.insert(e);
        }
    }
    max_two_matching_from(g, &m).expect("greedy start is valid")
}
