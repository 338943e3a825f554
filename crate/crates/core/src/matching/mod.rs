//! Maximum matchings, Tutte–Berge certificates, layer peeling and
//! 2-matchings.

mod blossom;
mod bmatching;
mod cycles;
mod peel;
mod tutte;
mod two;

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};

pub use bmatching::max_b_matching;
pub use cycles::count_disjoint_cycles_lb;
pub use peel::{peel_matchings, LayerAudit, PeelConfig, PeelResult};
pub use tutte::{tutte_berge_oracle, TutteBergeCertificate, TUTTE_ORACLE_LIMIT};
pub use two::{
    augment_from, augment_two_matching, max_two_matching, max_two_matching_from, AugmentOutcome,
    FailureWitness, TwoMatching,
};

use blossom::{greedy_mates, Blossom, NONE};

/// A set of pairwise disjoint edges on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Matching {
    #[serde(skip)]
    mate: Vec<Option<usize>>,
    edges: Vec<Edge>,
}

impl Matching {
    pub fn empty(n: usize) -> Self {
        Matching {
            mate: vec![None; n],
            edges: Vec::new(),
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut mate = vec![None; n];
        let mut list = Vec::new();
        for e in edges {
            for v in [e.0, e.1] {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
            }
            if e.0 == e.1 {
                return Err(Error::SelfLoop(e.0));
            }
            if mate[e.0].is_some() || mate[e.1].is_some() {
                return Err(Error::InvalidParameter(format!(
                    "edge {e:?} shares a vertex with another matching edge"
                )));
            }
            mate[e.0] = Some(e.1);
            mate[e.1] = Some(e.0);
            list.push(e);
        }
        list.sort_unstable();
        Ok(Matching { mate, edges: list })
    }

    fn from_mates(mates: &[usize]) -> Self {
        let mate: Vec<Option<usize>> = mates
            .iter()
            .map(|&m| if m == NONE { None } else { Some(m) })
            .collect();
        let edges = (0..mates.len())
            .filter(|&v| mates[v] != NONE && v < mates[v])
            .map(|v| Edge(v, mates[v]))
            .collect();
        Matching { mate, edges }
    }

    fn to_mates(&self) -> Vec<usize> {
        self.mate.iter().map(|m| m.unwrap_or(NONE)).collect()
    }

    pub fn n(&self) -> usize {
        self.mate.len()
    }

    pub fn size(&self) -> usize {
        self.edges.len()
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn mate(&self, v: usize) -> Option<usize> {
        self.mate[v]
    }

    pub fn is_saturated(&self, v: usize) -> bool {
        self.mate[v].is_some()
    }

    pub fn saturated(&self) -> Vec<bool> {
        self.mate.iter().map(Option::is_some).collect()
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.mate.get(e.0).copied().flatten() == Some(e.1)
    }

    /// Whether every edge is an edge of `g`.
    pub fn is_matching_of(&self, g: &Graph) -> bool {
        self.n() == g.n() && self.edges.iter().all(|&e| g.contains_edge(e))
    }

    /// Text form: a `matching k n size` header, then one `u v` line per edge.
    pub fn to_file_string(&self, k: usize) -> String {
        let mut s = format!("matching {} {} {}\n", k, self.n(), self.size());
        for e in &self.edges {
            let _ = writeln!(s, "{} {}", e.0, e.1);
        }
        s
    }

    /// Parses [`Matching::to_file_string`] output; returns `(k, matching)`.
    pub fn parse_file(text: &str) -> Result<(usize, Matching)> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 || fields[0] != "matching" {
            return Err(Error::Parse {
                line: hl,
                msg: "expected `matching k n size`".into(),
            });
        }
        let num = |s: &str, line: usize| {
            s.parse::<usize>().map_err(|_| Error::Parse {
                line,
                msg: format!("not a non-negative integer: {s}"),
            })
        };
        let (k, n, size) = (num(fields[1], hl)?, num(fields[2], hl)?, num(fields[3], hl)?);
        let mut edges = Vec::with_capacity(size);
        for (line, l) in lines {
            let parts: Vec<&str> = l.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(Error::Parse {
                    line,
                    msg: "expected `u v`".into(),
                });
            }
            edges.push(Edge::new(num(parts[0], line)?, num(parts[1], line)?));
        }
        if edges.len() != size {
            return Err(Error::Parse {
                line: hl,
                msg: format!("header announces {size} edges, found {}", edges.len()),
            });
        }
        Ok((k, Matching::from_edges(n, edges)?))
    }
}

/// A maximum-cardinality matching of `g`.
pub fn max_matching(g: &Graph) -> Matching {
    let mates = greedy_mates(g.adjacency());
    Matching::from_mates(&Blossom::new(g.adjacency(), mates).run())
}

/// A maximum matching of `g` reached by augmenting `start`.
pub fn max_matching_from(g: &Graph, start: &Matching) -> Result<Matching> {
    if !start.is_matching_of(g) {
        return Err(Error::InvalidParameter(
            "start matching is not contained in the graph".into(),
        ));
    }
    Ok(Matching::from_mates(
        &Blossom::new(g.adjacency(), start.to_mates()).run(),
    ))
}
