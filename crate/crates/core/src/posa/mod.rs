//! Path covers, fake-edge gluing, Pósa rotations and reservoir-driven closure
//! of Hamilton paths into Hamilton cycles.

mod closure;
mod expand;
mod host;

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Edge;
use crate::matching::TwoMatching;

pub use closure::{
    build_closure_targets, consume_reservoir, ClosureAudit, ClosureConfig, ClosureEngine,
    ClosureEvent, ClosureSchedule, ClosureTargets, EventKind, PackStepResult,
};
pub use expand::{
    expand_endpoints, ExpandConfig, LevelStats, Root, RotationEvent, RotationNode, RotationState, Side,
};
pub use host::HostGraph;

/// Vertex-disjoint paths covering `0..n`; a closed cover of size 0 holds a
/// Hamilton cycle instead.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathCover {
    n: usize,
    paths: Vec<Vec<usize>>,
    closed: bool,
}

impl PathCover {
    pub fn from_paths(n: usize, paths: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for p in &paths {
            if p.is_empty() {
                return Err(Error::InvalidParameter("empty path in cover".into()));
            }
            for &v in p {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
                if std::mem::replace(&mut seen[v], true) {
                    return Err(Error::InvalidParameter(format!("vertex {v} covered twice")));
                }
            }
        }
        if let Some(v) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidParameter(format!("vertex {v} not covered")));
        }
        Ok(PathCover {
            n,
            paths,
            closed: false,
        })
    }

    /// The size-0 cover holding a Hamilton cycle, given in cyclic order.
    pub fn hamilton_cycle(cycle: Vec<usize>) -> Self {
        PathCover {
            n: cycle.len(),
            paths: vec![cycle],
            closed: true,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of paths; 0 for a Hamilton cycle.
    pub fn size(&self) -> usize {
        if self.closed {
            0
        } else {
            self.paths.len()
        }
    }

    pub fn paths(&self) -> &[Vec<usize>] {
        &self.paths
    }

    pub fn cycle(&self) -> Option<&[usize]> {
        self.closed.then(|| self.paths[0].as_slice())
    }

    /// Edges of the paths (and the closing edge of a cycle).
    pub fn real_edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.n);
        for p in &self.paths {
            out.extend(p.windows(2).map(|w| Edge::new(w[0], w[1])));
            if self.closed && p.len() > 2 {
                out.push(Edge::new(p[0], p[p.len() - 1]));
            }
        }
        out
    }

    /// Number of real edges that belong to `target`.
    pub fn m_intersection(&self, target: &TwoMatching) -> usize {
        self.real_edges().into_iter().filter(|&e| target.contains(e)).count()
    }

    /// Splits a Hamilton path at its fake edges.
    pub(crate) fn from_glued(path: &[usize], fake: &HashSet<Edge>) -> Self {
        let mut paths = vec![vec![path[0]]];
        for w in path.windows(2) {
            if fake.contains(&Edge::new(w[0], w[1])) {
                paths.push(vec![w[1]]);
            } else {
                paths.last_mut().expect("non-empty").push(w[1]);
            }
        }
        PathCover {
            n: path.len(),
            paths,
            closed: false,
        }
    }
}

/// Splits a 2-matching into paths: every cycle loses its lexicographically
/// smallest edge. Paths run from their smaller endpoint and are listed by
/// smallest vertex.
pub fn vdpc_from_two_matching(m: &TwoMatching) -> PathCover {
    let n = m.n();
    let mut seen = vec![false; n];
    let mut paths = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        // collect the component
        let mut comp = vec![start];
        seen[start] = true;
        let mut i = 0;
        while i < comp.len() {
            let v = comp[i];
            for w in m.partners(v) {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
            i += 1;
        }
        let ends: Vec<usize> = comp.iter().copied().filter(|&v| m.deg_in(v) < 2).collect();
        let (first, banned) = if ends.is_empty() {
            let cut = comp
                .iter()
                .flat_map(|&v| m.partners(v).map(move |w| Edge::new(v, w)))
                .min()
                .expect("cycle has edges");
            (cut.0, Some(cut))
        } else {
            (*ends.iter().min().expect("non-empty"), None)
        };
        let mut path = vec![first];
        let mut prev = usize::MAX;
        let mut cur = first;
        loop {
            let next = m
                .partners(cur)
                .find(|&w| w != prev && Some(Edge::new(cur, w)) != banned && w != first);
            match next {
                Some(w) => {
                    path.push(w);
                    prev = cur;
                    cur = w;
                }
                None => break,
            }
        }
        debug_assert_eq!(path.len(), comp.len());
        paths.push(path);
    }
    PathCover {
        n,
        paths,
        closed: false,
    }
}

/// A Hamilton path of the glued instance and the fake edges it uses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluedPath {
    pub path: Vec<usize>,
    pub fake: HashSet<Edge>,
}

/// Concatenates the cover into one Hamilton path that starts with path `i`,
/// ends with path `j` and visits the others in index order, joining
/// consecutive paths by fake edges.
pub fn glue_with_fake_edges(pc: &PathCover, i: usize, j: usize) -> Result<GluedPath> {
    let s = pc.size();
    if s == 0 {
        return Err(Error::InvalidParameter("cannot glue a Hamilton cycle".into()));
    }
    if i >= s || j >= s {
        return Err(Error::InvalidParameter(format!("path index out of range 0..{s}")));
    }
    if s > 1 && i == j {
        return Err(Error::InvalidParameter("start and end paths must differ".into()));
    }
    let order = std::iter::once(i)
        .chain((0..s).filter(|&x| x != i && x != j))
        .chain((s > 1).then_some(j));
    let mut path = Vec::with_capacity(pc.n);
    let mut fake = HashSet::with_capacity(s - 1);
    for idx in order {
        let p = &pc.paths[idx];
        if let Some(&last) = path.last() {
            fake.insert(Edge::new(last, p[0]));
        }
        path.extend_from_slice(p);
    }
    Ok(GluedPath { path, fake })
}

/// The outcome of one rotation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rotation {
    pub path: Vec<usize>,
    pub pivot: usize,
    pub deleted: Edge,
}

/// Pósa rotation of `(x_1, ..., x_s)` with `x_1 = fixed_end` by the chord
/// `{x_s, x_i}`, `1 < i < s - 1`: the result is
/// `(x_1, ..., x_i, x_s, x_{s-1}, ..., x_{i+1})`.
pub fn rotate(path: &[usize], fixed_end: usize, inserted: Edge) -> Result<Rotation> {
    let s = path.len();
    if s == 0 || path[0] != fixed_end {
        return Err(Error::InvalidParameter("path must start at the fixed end".into()));
    }
    let far = path[s - 1];
    if !inserted.contains(far) || inserted.0 == inserted.1 {
        return Err(Error::InvalidParameter(format!(
            "inserted edge {inserted:?} is not incident to the far end {far}"
        )));
    }
    let x = inserted.other(far);
    let p = path
        .iter()
        .position(|&v| v == x)
        .ok_or_else(|| Error::InvalidParameter(format!("{x} is not on the path")))?;
    if p == 0 || p + 2 >= s {
        return Err(Error::InvalidParameter(format!(
            "pivot position {} outside 1 < i < {}",
            p + 1,
            s - 1
        )));
    }
    let mut out = path.to_vec();
    out[p + 1..].reverse();
    Ok(Rotation {
        path: out,
        pivot: x,
        deleted: Edge::new(path[p], path[p + 1]),
    })
}
