use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const TUTTE_ORACLE_LIMIT: usize = 22;

/// A set `S` together with the Tutte–Berge value `n + |S| - o(G - S)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TutteBergeCertificate {
    pub witness_set: Vec<usize>,
    pub odd_components: usize,
    pub value: usize,
}

impl TutteBergeCertificate {
    /// Recounts the odd components of `g - witness_set`.
    pub fn recount(&self, g: &Graph) -> usize {
        let mut mask = 0u32;
        for &v in &self.witness_set {
            mask |= 1 << v;
        }
        odd_components(&bit_adjacency(g), g.n(), mask)
    }
}

fn bit_adjacency(g: &Graph) -> Vec<u32> {
    (0..g.n())
        .map(|v| g.neighbors(v).iter().fold(0u32, |a, &w| a | (1 << w)))
        .collect()
}

fn odd_components(adj: &[u32], n: usize, removed: u32) -> usize {
    let all = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut left = all & !removed;
    let mut odd = 0;
    while left != 0 {
        let start = left.trailing_zeros() as usize;
        let mut comp = 1u32 << start;
        let mut frontier = comp;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let fresh = adj[v] & left & !comp;
            comp |= fresh;
            frontier |= fresh;
        }
        left &= !comp;
        odd += (comp.count_ones() % 2) as usize;
    }
    odd
}

/// Minimises `n + |S| - o(G - S)` over all vertex subsets; ties go to the
/// largest `S`, then to the smallest bitmask. Exponential; `n <= 22` only.
pub fn tutte_berge_oracle(g: &Graph) -> Result<TutteBergeCertificate> {
    let n = g.n();
    if n > TUTTE_ORACLE_LIMIT {
        return Err(Error::OracleLimit {
            n,
            limit: TUTTE_ORACLE_LIMIT,
        });
    }
    let adj = bit_adjacency(g);
    let mut best: Option<(usize, usize, u32, usize)> = None;
    for mask in 0..(1u32 << n) {
        let size = mask.count_ones() as usize;
        let odd = odd_components(&adj, n, mask);
        let value = n + size - odd;
        let better = match best {
            None => true,
            Some((bv, bs, _, _)) => value < bv || (value == bv && size > bs),
        };
        if better {
            best = Some((value, size, mask, odd));
        }
    }
    let (value, _, mask, odd) = best.expect("at least the empty set");
    Ok(TutteBergeCertificate {
        witness_set: (0..n).filter(|&v| mask >> v & 1 == 1).collect(),
        odd_components: odd,
        value,
    })
}
