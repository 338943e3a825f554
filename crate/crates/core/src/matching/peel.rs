use std::collections::HashSet;

use serde::Serialize;

use super::{count_disjoint_cycles_lb, max_matching, Matching};
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};

#[derive(Clone, Debug, Serialize)]
pub struct PeelConfig {
    /// Maximum degree allowed in the first layer graph.
    pub ell: usize,
    /// Slack coefficient of the layer-size bound.
    pub r: f64,
    /// When set, each layer graph is also searched for vertex-disjoint cycles
    /// and the count is compared against this threshold.
    pub cycle_budget: Option<f64>,
}

impl PeelConfig {
    pub fn new(ell: usize, r: f64) -> Result<Self> {
        if ell == 0 {
            return Err(Error::InvalidParameter("ell must be at least 1".into()));
        }
        if !(r >= 0.0) {
            return Err(Error::InvalidParameter("r must be non-negative".into()));
        }
        Ok(PeelConfig {
            ell,
            r,
            cycle_budget: None,
        })
    }

    pub fn with_cycle_budget(mut self, budget: f64) -> Self {
        self.cycle_budget = Some(budget);
        self
    }
}

/// `ln ln n` floored at 1 so the bounds below stay finite for tiny `n`.
pub(crate) fn lnln(n: usize) -> f64 {
    (n.max(3) as f64).ln().ln().max(1.0)
}

/// `n/2 - (r+2) n / (2 (ln ln n)^6)`.
pub fn layer_bound(n: usize, r: f64) -> f64 {
    let n = n as f64;
    n / 2.0 - (r + 2.0) * n / (2.0 * lnln(n as usize).powi(6))
}

#[derive(Clone, Debug, Serialize)]
pub struct LayerAudit {
    pub layer: usize,
    pub size: usize,
    pub max_degree_before: usize,
    pub max_degree_after: usize,
    pub unsaturated: usize,
    pub extra_removed: usize,
    pub bound: f64,
    pub cycles_lb: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct PeelResult {
    pub layers: Vec<Matching>,
    pub audit: Vec<LayerAudit>,
    /// What is left of `h` after the last layer.
    pub residual: Graph,
}

/// Splits `h` (maximum degree at most `k - 1`) into `k - 1` edge-disjoint
/// matchings.
///
/// Layer `i` is a maximum matching `M_i` of `H_i`. Then `M_i` is removed, and
/// every vertex left unsaturated by `M_i` that has not yet lost an edge loses
/// one: the edge to its neighbour of highest residual degree, ties to the
/// smaller id. Every vertex of positive degree thus loses at least one edge
/// per layer.
pub fn peel_matchings(h: &Graph, k: usize, cfg: &PeelConfig) -> Result<PeelResult> {
    if k < 2 {
        return Err(Error::InvalidParameter("k must be at least 2".into()));
    }
    if h.max_degree() > k - 1 {
        return Err(Error::Precondition(format!(
            "layer graph has maximum degree {} > k - 1 = {}",
            h.max_degree(),
            k - 1
        )));
    }
    let n = h.n();
    let mut cur = h.clone();
    let mut layers = Vec::with_capacity(k - 1);
    let mut audit = Vec::with_capacity(k - 1);
    for layer in 1..k {
        let before = cur.max_degree();
        let cycles_lb = cfg.cycle_budget.map(|_| count_disjoint_cycles_lb(&cur));
        let m = max_matching(&cur);
        let mut removed: HashSet<Edge> = m.edges().iter().copied().collect();
        let mut deg = cur.degrees();
        for e in m.edges() {
            deg[e.0] -= 1;
            deg[e.1] -= 1;
        }
        let mut lost = vec![false; n];
        for e in m.edges() {
            lost[e.0] = true;
            lost[e.1] = true;
        }
        let mut unsaturated = 0;
        let mut extra = 0;
        for v in 0..n {
            if m.is_saturated(v) || cur.degree(v) == 0 {
                continue;
            }
            unsaturated += 1;
            if lost[v] {
                continue;
            }
            let pick = cur
                .neighbors(v)
                .iter()
                .copied()
                .filter(|&w| !removed.contains(&Edge::new(v, w)))
                .max_by(|&a, &b| deg[a].cmp(&deg[b]).then(b.cmp(&a)));
            if let Some(w) = pick {
                removed.insert(Edge::new(v, w));
                deg[v] -= 1;
                deg[w] -= 1;
                lost[v] = true;
                lost[w] = true;
                extra += 1;
            }
        }
        let next = cur.without_edges(&removed);
        audit.push(LayerAudit {
            layer,
            size: m.size(),
            max_degree_before: before,
            max_degree_after: next.max_degree(),
            unsaturated,
            extra_removed: extra,
            bound: layer_bound(n, cfg.r),
            cycles_lb,
        });
        layers.push(m);
        cur = next;
    }
    Ok(PeelResult {
        layers,
        audit,
        residual: cur,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::oracle::{max_matching_size, random_graph};
    use crate::matching::max_b_matching;
    use crate::seed;
    use rand::Rng as _;

    fn cfg(k: usize) -> PeelConfig {
        PeelConfig::new(k - 1, 0.0).unwrap()
    }

    #[test]
    fn six_cycle_splits_into_two_perfect_matchings() {
        // every maximum matching of C_6 is perfect and its complement is the
        // other perfect matching
        let r = peel_matchings(&Graph::cycle(6), 3, &cfg(3)).unwrap();
        let sizes: Vec<usize> = r.layers.iter().map(Matching::size).collect();
        assert_eq!(sizes, vec![3, 3]);
        assert_eq!(r.residual.m(), 0);
    }

    #[test]
    fn perfect_matching_is_one_layer() {
        let h = Graph::from_edges(6, [(0, 1), (2, 3), (4, 5)]).unwrap();
        let r = peel_matchings(&h, 2, &cfg(2)).unwrap();
        assert_eq!(r.layers.len(), 1);
        assert_eq!(r.layers[0].edges(), h.edges());
    }

    #[test]
    fn two_triangles() {
        let h = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert_eq!(max_matching_size(&h), 2);
        let r = peel_matchings(&h, 3, &cfg(3)).unwrap();
        assert_eq!(r.layers[0].size(), 2);
        assert_eq!(r.audit[0].max_degree_after, 1);
        assert_eq!(r.layers[1].size(), 2);
    }

    #[test]
    fn rejects_high_degree() {
        assert!(matches!(
            peel_matchings(&Graph::complete(5), 3, &cfg(3)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn layer_invariants_on_random_inputs() {
        let mut rng = seed::rng(8);
        for _ in 0..200 {
            let n = rng.random_range(2..=40);
            let k = rng.random_range(2..=6);
            let p = rng.random_range(0.05..0.6);
            let g = random_graph(&mut rng, n, p);
            let h = max_b_matching(&g, k - 1);
            let r = peel_matchings(&h, k, &cfg(k).with_cycle_budget(1.0)).unwrap();
            assert_eq!(r.layers.len(), k - 1);
            let mut seen = HashSet::new();
            for (m, a) in r.layers.iter().zip(&r.audit) {
                assert!(m.is_matching_of(&h));
                for &e in m.edges() {
                    assert!(seen.insert(e), "layers overlap at {e:?}");
                }
                assert!(a.max_degree_after <= a.max_degree_before.saturating_sub(1));
                assert!(a.cycles_lb.is_some());
            }
        }
    }
}
