//! Edge-list text and JSON graph formats.
//!
//! Text: a header line `n m`, then `m` lines `u v` with `0 <= u < v < n`.
//! JSON: `{"n": .., "m": .., "edges": [[u, v], ..]}`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Edge, Graph};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub m: usize,
    pub edges: Vec<Edge>,
}

impl Graph {
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(12 * (self.m() + 1));
        writeln!(out, "{} {}", self.n(), self.m()).unwrap();
        for e in self.edges() {
            writeln!(out, "{} {}", e.0, e.1).unwrap();
        }
        out
    }

    pub fn parse_edge_list(text: &str) -> Result<Graph> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header line `n m`".into(),
        })?;
        let [n, m] = parse_pair(hline, header)?;
        let mut edges = Vec::with_capacity(m);
        for (line, l) in lines {
            let [u, v] = parse_pair(line, l)?;
            if u >= n || v >= n {
                return Err(Error::Parse {
                    line,
                    msg: format!("vertex out of range for n = {n}"),
                });
            }
            if u == v {
                return Err(Error::Parse {
                    line,
                    msg: format!("self-loop at {u}"),
                });
            }
            edges.push(Edge::new(u, v));
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header announces {m} edges, found {}", edges.len()),
            });
        }
        Graph::from_edges(n, edges)
    }

    pub fn to_json(&self) -> GraphFile {
        GraphFile {
            n: self.n(),
            m: self.m(),
            edges: self.edges().to_vec(),
        }
    }

    pub fn from_json(file: &GraphFile) -> Result<Graph> {
        if file.edges.len() != file.m {
            return Err(Error::Parse {
                line: 0,
                msg: format!("`m` is {} but {} edges listed", file.m, file.edges.len()),
            });
        }
        Graph::from_edges(file.n, file.edges.iter().copied())
    }

    /// Accepts either format, deciding by the first non-blank character.
    pub fn parse_any(text: &str) -> Result<Graph> {
        if text.trim_start().starts_with('{') {
            let file: GraphFile = serde_json::from_str(text)?;
            Graph::from_json(&file)
        } else {
            Graph::parse_edge_list(text)
        }
    }
}

fn parse_pair(line: usize, text: &str) -> Result<[usize; 2]> {
    let mut it = text.split_whitespace().map(|t| {
        t.parse::<usize>().map_err(|e| Error::Parse {
            line,
            msg: format!("`{t}`: {e}"),
        })
    });
    match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) => Ok([a?, b?]),
        _ => Err(Error::Parse {
            line,
            msg: "expected two integers".into(),
        }),
    }
}
