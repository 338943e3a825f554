//! Checkers for small-set density, incidence and neighbourhood expansion,
//! the expansion parameter inequalities, and packing certificates.
//!
//! Every violation comes with a [`ViolationWitness`] that [`replay`]s on the
//! graph. Heuristic modes may miss violations but never report false ones.
//!
//! [`replay`]: ViolationWitness::replay

use std::collections::{HashMap, VecDeque};

use rand::seq::SliceRandom;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::packer::{Outcome, PackerConfig, PackingCertificate, TailType};
use crate::random_models::{f_k, solve_lambda};
use crate::seed;

pub const EXACT_SUBSET_LIMIT: usize = 24;
pub const EXACT_EXPANSION_LIMIT: usize = 20;

/// β, γ with the calibration context `k`, `c` and `λ` (mean degree `2c`).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExpansionParams {
    pub beta: f64,
    pub gamma: f64,
    pub k: usize,
    pub c: f64,
    pub lambda: f64,
}

impl ExpansionParams {
    /// Fails unless β, γ ∈ (0, 0.1) and both
    /// `9 e^{1+λ} λ² / (c f_k(λ)) · (γλ/c)^{0.1} < 1/2` and
    /// `[2(k+λ) + log₂(βγ) + 3] β < 2(1-β)` hold.
    pub fn new(k: usize, c: f64, beta: f64, gamma: f64) -> Result<Self> {
        for (name, v) in [("beta", beta), ("gamma", gamma)] {
            if !(v > 0.0 && v < 0.1) {
                return Err(Error::InvalidParameter(format!("{name} = {v} outside (0, 0.1)")));
            }
        }
        let lambda = solve_lambda(k, 2.0 * c)?;
        let p = ExpansionParams { beta, gamma, k, c, lambda };
        let (a, b) = p.lhs();
        if !(a < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "density inequality fails: {a:.4e} >= 1/2 (gamma = {gamma:e})"
            )));
        }
        if !(b < 2.0 * (1.0 - beta)) {
            return Err(Error::InvalidParameter(format!(
                "incidence inequality fails: {b:.4} >= {:.4} (beta = {beta})",
                2.0 * (1.0 - beta)
            )));
        }
        Ok(p)
    }

    /// Left-hand sides of the two inequalities.
    pub fn lhs(&self) -> (f64, f64) {
        let (k, c, l) = (self.k as f64, self.c, self.lambda);
        let fk = f_k(self.k, l).unwrap_or(f64::NAN);
        let a = 9.0 * (1.0 + l).exp() * l * l / (c * fk) * (self.gamma * l / c).powf(0.1);
        let b = (2.0 * (k + l) + (self.beta * self.gamma).log2() + 3.0) * self.beta;
        (a, b)
    }

    /// Largest table entry `β = 0.05`, `γ = 0.05 · 10^{-j}` satisfying both
    /// inequalities.
    pub fn default_for(k: usize, c: f64) -> Result<Self> {
        let mut last = None;
        for j in 0..=300 {
            let gamma = 0.05 * 10f64.powi(-j);
            match ExpansionParams::new(k, c, 0.05, gamma) {
                Ok(p) => return Ok(p),
                Err(e) => last = Some(e),
            }
        }
        Err(last.unwrap_or_else(|| Error::InvalidParameter("no parameters".into())))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ViolationWitness {
    pub property: String,
    /// Sorted vertex set, or the endpoints of the offending edge.
    pub set: Vec<usize>,
    pub measured: f64,
    pub threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl ViolationWitness {
    fn new(property: &str, mut set: Vec<usize>, measured: f64, threshold: f64) -> Self {
        set.sort_unstable();
        ViolationWitness {
            property: property.into(),
            set,
            measured,
            threshold,
            detail: None,
        }
    }

    /// Recomputes the measured value on `g`; `None` for certificate
    /// witnesses, which are not set functions.
    pub fn recompute(&self, g: &Graph) -> Option<f64> {
        let s = &self.set;
        match self.property.as_str() {
            "density" => Some(spanned_edges(g, s) as f64),
            "incidence" => Some(incidence(g, s) as f64),
            "neighborhood_expansion" => {
                let (nb, connected) = closure(g, s);
                connected.then_some(nb.len() as f64)
            }
            _ => None,
        }
    }

    /// Whether the witness holds on `g`.
    pub fn replay(&self, g: &Graph) -> bool {
        if self.set.iter().any(|&v| v >= g.n()) {
            return false;
        }
        match (self.property.as_str(), self.recompute(g)) {
            ("density" | "incidence", Some(v)) => v == self.measured && v >= self.threshold,
            ("neighborhood_expansion", Some(v)) => v == self.measured && v < self.threshold,
            _ => true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Exhaustive; the verdict is a proof.
    Exact,
    /// A domination bound; a pass is a proof.
    Bound,
    /// Local search; a pass is evidence only.
    Sampled,
    Standalone,
    Full,
    Informational,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub property: String,
    pub mode: Mode,
    pub pass: bool,
    /// False when the checker could neither prove the property nor find a
    /// violation.
    pub conclusive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ViolationWitness>,
    pub params: Value,
}

impl Verdict {
    fn new(property: &str, mode: Mode, witness: Option<ViolationWitness>, params: Value) -> Self {
        Verdict {
            property: property.into(),
            mode,
            pass: witness.is_none(),
            conclusive: witness.is_some() || matches!(mode, Mode::Exact | Mode::Bound | Mode::Standalone | Mode::Full),
            witness,
            params,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("verdict serializes")
    }
}

fn spanned_edges(g: &Graph, s: &[usize]) -> usize {
    let mut inside = vec![false; g.n()];
    for &v in s {
        inside[v] = true;
    }
    g.edges_within(&inside)
}

fn incidence(g: &Graph, s: &[usize]) -> usize {
    s.iter().map(|&v| g.degree(v)).sum::<usize>() - spanned_edges(g, s)
}

/// `N(S)` and whether `S ∪ N(S)` induces a connected graph.
fn closure(g: &Graph, s: &[usize]) -> (Vec<usize>, bool) {
    let n = g.n();
    let mut mark = vec![0u8; n];
    for &v in s {
        mark[v] = 1;
    }
    let mut nb = Vec::new();
    for &v in s {
        for &w in g.neighbors(v) {
            if mark[w] == 0 {
                mark[w] = 2;
                nb.push(w);
            }
        }
    }
    nb.sort_unstable();
    let Some(&start) = s.first() else {
        return (nb, false);
    };
    let total = s.len() + nb.len();
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut q = VecDeque::from([start]);
    let mut count = 1;
    while let Some(v) = q.pop_front() {
        for &w in g.neighbors(v) {
            if mark[w] != 0 && !seen[w] {
                seen[w] = true;
                count += 1;
                q.push_back(w);
            }
        }
    }
    (nb, count == total)
}

/// Calls `f` on every subset of `0..n` of size `s` as a bitmask, in colex
/// order, until it returns `true`.
fn for_each_subset(n: usize, s: usize, mut f: impl FnMut(u32) -> bool) -> bool {
    if s > n {
        return false;
    }
    if s == 0 {
        return f(0);
    }
    let limit = 1u64 << n;
    let mut x: u64 = (1 << s) - 1;
    while x < limit {
        if f(x as u32) {
            return true;
        }
        // next subset of the same size
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
    false
}

fn mask_to_set(mask: u32) -> Vec<usize> {
    (0..32).filter(|&i| mask >> i & 1 == 1).collect()
}

fn adjacency_masks(g: &Graph) -> Vec<u32> {
    (0..g.n())
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | 1 << w))
        .collect()
}

fn mask_edges(adj: &[u32], mask: u32) -> usize {
    let mut t = 0;
    let mut m = mask;
    while m != 0 {
        let v = m.trailing_zeros() as usize;
        t += (adj[v] & mask).count_ones() as usize;
        m &= m - 1;
    }
    t / 2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityMode {
    Exact,
    Sampled,
}

/// Every `S` with `|S| <= γn` spans fewer than `1.1|S| + 1` edges.
///
/// Sampled mode grows a dense set greedily from each of up to `seeds`
/// edges, refines it by single swaps, and reports the first set that breaks
/// the bound.
pub fn check_density(g: &Graph, gamma: f64, mode: DensityMode) -> Result<Verdict> {
    check_density_seeded(g, gamma, mode, 256, 0)
}

pub fn check_density_seeded(g: &Graph, gamma: f64, mode: DensityMode, seeds: usize, seed: u64) -> Result<Verdict> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} outside (0, 1]")));
    }
    let n = g.n();
    let max = (gamma * n as f64).floor() as usize;
    let bound = |s: usize| 1.1 * s as f64 + 1.0;
    let params = json!({ "gamma": gamma, "max_size": max, "n": n });
    match mode {
        DensityMode::Exact => {
            if n > EXACT_SUBSET_LIMIT {
                return Err(Error::OracleLimit { n, limit: EXACT_SUBSET_LIMIT });
            }
            let adj = adjacency_masks(g);
            let mut found = None;
            for s in 1..=max {
                if for_each_subset(n, s, |m| {
                    let e = mask_edges(&adj, m);
                    if e as f64 >= bound(s) {
                        found = Some(ViolationWitness::new("density", mask_to_set(m), e as f64, bound(s)));
                        true
                    } else {
                        false
                    }
                }) {
                    break;
                }
            }
            Ok(Verdict::new("density", Mode::Exact, found, params))
        }
        DensityMode::Sampled => {
            let mut edges = g.edges().to_vec();
            if edges.len() > seeds {
                edges.shuffle(&mut seed::rng(seed));
                edges.truncate(seeds);
            }
            let mut best: Option<ViolationWitness> = None;
            for e in edges {
                if max < 2 {
                    break;
                }
                if let Some(w) = grow_dense(g, e, max) {
                    best = Some(w);
                    break;
                }
            }
            Ok(Verdict::new("density", Mode::Sampled, best, params))
        }
    }
}

fn grow_dense(g: &Graph, seed_edge: Edge, max: usize) -> Option<ViolationWitness> {
    let n = g.n();
    let mut inside = vec![false; n];
    let mut links = HashMap::new();
    let mut set = Vec::with_capacity(max);
    let mut edges = 0usize;
    let add = |v: usize, inside: &mut Vec<bool>, links: &mut HashMap<usize, usize>, set: &mut Vec<usize>| {
        inside[v] = true;
        set.push(v);
        links.remove(&v);
        for &w in g.neighbors(v) {
            if !inside[w] {
                *links.entry(w).or_insert(0) += 1;
            }
        }
    };
    add(seed_edge.0, &mut inside, &mut links, &mut set);
    add(seed_edge.1, &mut inside, &mut links, &mut set);
    edges += 1;
    loop {
        let s = set.len();
        if edges as f64 >= 1.1 * s as f64 + 1.0 {
            return Some(ViolationWitness::new("density", set, edges as f64, 1.1 * s as f64 + 1.0));
        }
        if let Some(w) = swap_improve(g, &set, &inside, edges) {
            return Some(w);
        }
        if s == max {
            return None;
        }
        let Some((&v, &l)) = links.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))) else {
            return None;
        };
        edges += l;
        add(v, &mut inside, &mut links, &mut set);
    }
}

/// One pass of single swaps: drop the set vertex with fewest inner
/// neighbours for an outside vertex with more.
fn swap_improve(g: &Graph, set: &[usize], inside: &[bool], edges: usize) -> Option<ViolationWitness> {
    let inner = |v: usize, skip: usize| g.neighbors(v).iter().filter(|&&w| inside[w] && w != skip).count();
    let (&out, out_deg) = set.iter().map(|v| (v, inner(*v, usize::MAX))).min_by_key(|x| (x.1, *x.0))?;
    let base = edges - out_deg;
    let s = set.len();
    let mut frontier: Vec<usize> = set
        .iter()
        .flat_map(|&v| g.neighbors(v).iter().copied())
        .filter(|&w| !inside[w])
        .collect();
    frontier.sort_unstable();
    frontier.dedup();
    for w in frontier {
        let gain = inner(w, out);
        if (base + gain) as f64 >= 1.1 * s as f64 + 1.0 {
            let mut t: Vec<usize> = set.iter().copied().filter(|&v| v != out).collect();
            t.push(w);
            return Some(ViolationWitness::new("density", t, (base + gain) as f64, 1.1 * s as f64 + 1.0));
        }
    }
    None
}

/// Sum of the `s` largest degrees: an upper bound on the incidence of any
/// `s`-set.
pub fn incidence_upper_bound(g: &Graph, s: usize) -> usize {
    let mut d = g.degrees();
    d.sort_unstable_by(|a, b| b.cmp(a));
    d.iter().take(s).sum()
}

/// Every `S` with `|S| <= βγn` is incident to fewer than `2(1-β)γn` edges.
///
/// Incidence grows with `S`, so only the largest size matters. A pass of the
/// top-degree bound is a proof; otherwise prefixes of the degree order are
/// tried as witnesses, and graphs with `n <= 24` are searched exhaustively.
pub fn check_incidence(g: &Graph, beta: f64, gamma: f64) -> Verdict {
    let n = g.n();
    let max = (beta * gamma * n as f64).floor() as usize;
    let threshold = 2.0 * (1.0 - beta) * gamma * n as f64;
    let ub = incidence_upper_bound(g, max);
    let params = json!({ "beta": beta, "gamma": gamma, "max_size": max, "threshold": threshold, "upper_bound": ub });
    if (ub as f64) < threshold {
        return Verdict::new("incidence", Mode::Bound, None, params);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));
    for s in 1..=max {
        let set = &order[..s];
        let inc = incidence(g, set);
        if inc as f64 >= threshold {
            let w = ViolationWitness::new("incidence", set.to_vec(), inc as f64, threshold);
            return Verdict::new("incidence", Mode::Bound, Some(w), params);
        }
    }
    if n <= EXACT_SUBSET_LIMIT {
        let adj = adjacency_masks(g);
        let deg = g.degrees();
        let mut found = None;
        for s in 1..=max {
            if for_each_subset(n, s, |m| {
                let set = mask_to_set(m);
                let inc = set.iter().map(|&v| deg[v]).sum::<usize>() - mask_edges(&adj, m);
                if inc as f64 >= threshold {
                    found = Some(ViolationWitness::new("incidence", set, inc as f64, threshold));
                    true
                } else {
                    false
                }
            }) {
                break;
            }
        }
        return Verdict::new("incidence", Mode::Exact, found, params);
    }
    let mut v = Verdict::new("incidence", Mode::Bound, None, params);
    v.pass = false;
    v.conclusive = false;
    v
}

/// Size window for [`check_neighborhood_expansion`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SizeRange {
    pub min: usize,
    pub max: usize,
}

impl SizeRange {
    /// `n / ln² n <= |S| <= n / (100 k)`; empty below astronomically large `n`.
    pub fn default_for(n: usize, k: usize) -> Self {
        let l = (n.max(2) as f64).ln();
        SizeRange {
            min: (n as f64 / (l * l)).ceil() as usize,
            max: (n as f64 / (100.0 * k as f64)).floor() as usize,
        }
    }
}

/// No `S` in the default size window has `S ∪ N(S)` connected and
/// `|N(S)| < k|S|`.
pub fn check_neighborhood_expansion(g: &Graph, k: usize) -> Verdict {
    check_neighborhood_expansion_in(g, k, SizeRange::default_for(g.n(), k), 64, 0)
}

/// As [`check_neighborhood_expansion`] over an explicit size window.
/// Exhaustive for `n <= 20`; otherwise grows sets breadth-first from up to
/// `seeds` start vertices.
pub fn check_neighborhood_expansion_in(g: &Graph, k: usize, range: SizeRange, seeds: usize, seed: u64) -> Verdict {
    let n = g.n();
    let lo = range.min.max(1);
    let hi = range.max.min(n);
    let params = json!({ "k": k, "min_size": range.min, "max_size": range.max });
    let test = |set: &[usize]| -> Option<ViolationWitness> {
        let (nb, connected) = closure(g, set);
        let t = (k * set.len()) as f64;
        (connected && (nb.len() as f64) < t)
            .then(|| ViolationWitness::new("neighborhood_expansion", set.to_vec(), nb.len() as f64, t))
    };
    if lo > hi {
        return Verdict::new("neighborhood_expansion", Mode::Exact, None, params);
    }
    if n <= EXACT_EXPANSION_LIMIT {
        let mut found = None;
        for s in lo..=hi {
            if for_each_subset(n, s, |m| {
                found = test(&mask_to_set(m));
                found.is_some()
            }) {
                break;
            }
        }
        return Verdict::new("neighborhood_expansion", Mode::Exact, found, params);
    }
    let mut starts: Vec<usize> = (0..n).collect();
    if n > seeds {
        starts.shuffle(&mut seed::rng(seed));
        starts.truncate(seeds);
    }
    for v in starts {
        let mut seen = vec![false; n];
        let mut set = Vec::new();
        let mut q = VecDeque::from([v]);
        seen[v] = true;
        while let Some(x) = q.pop_front() {
            set.push(x);
            if set.len() >= lo {
                if let Some(w) = test(&set) {
                    return Verdict::new("neighborhood_expansion", Mode::Sampled, Some(w), params);
                }
            }
            if set.len() == hi {
                break;
            }
            for &y in g.neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    q.push_back(y);
                }
            }
        }
    }
    Verdict::new("neighborhood_expansion", Mode::Sampled, None, params)
}

#[derive(Clone, Debug, Serialize)]
pub struct CoreSizeRow {
    pub i: usize,
    pub core_size: usize,
    /// `(1 - e^{-i/40n}) n`.
    pub bound: f64,
    /// The same with a positive exponent, negative for every `i > 0`.
    pub bound_printed_sign: f64,
    pub holds: bool,
}

/// Measured core sizes against `(1 - e^{-i/40n}) n`; informational.
pub fn check_core_size(n: usize, checkpoints: &[(usize, usize)]) -> Vec<CoreSizeRow> {
    let nf = n as f64;
    checkpoints
        .iter()
        .map(|&(i, core_size)| {
            let x = i as f64 / (40.0 * nf);
            let bound = (1.0 - (-x).exp()) * nf;
            CoreSizeRow {
                i,
                core_size,
                bound,
                bound_printed_sign: (1.0 - x.exp()) * nf,
                holds: core_size as f64 >= bound,
            }
        })
        .collect()
}

/// Checks that every cycle is a Hamilton cycle of `g`, that cycles and tail
/// are pairwise edge-disjoint and inside `g`, and that the tail is a matching
/// or a 2-factor. Unless `standalone`, the tail type must follow the parity
/// of `k` and the number of cycles must be the packing target. Certificates
/// whose audit marks them partial are held to the cycles found and a tail of
/// maximum degree 1 or 2.
pub fn validate_certificate(g: &Graph, cert: &PackingCertificate, standalone: bool) -> Verdict {
    let n = g.n();
    let half = n as f64 / 2.0;
    let mode = if standalone { Mode::Standalone } else { Mode::Full };
    let partial = cert.audit.outcome != Outcome::Success;
    let params = json!({
        "partial": partial,
        "n": n,
        "k": cert.k,
        "cycles": cert.cycles.len(),
        "tail_type": cert.tail_type,
        "tail_size": cert.tail_edges.len(),
        "tail_fraction_of_half_n": if n == 0 { 0.0 } else { cert.tail_edges.len() as f64 / half },
    });
    let fail = |what: &str, set: Vec<usize>, measured: f64, threshold: f64, detail: String| {
        let mut w = ViolationWitness::new(&format!("certificate.{what}"), set, measured, threshold);
        w.detail = Some(detail);
        Verdict::new("certificate", mode, Some(w), params.clone())
    };
    if cert.n != n {
        return fail("size", vec![], cert.n as f64, n as f64, format!("certificate is for n = {}, graph has {n}", cert.n));
    }
    let mut used: HashMap<Edge, &'static str> = HashMap::new();
    for (ci, c) in cert.cycles.iter().enumerate() {
        if c.len() != n {
            return fail("hamiltonicity", vec![], c.len() as f64, n as f64, format!("cycle {ci} has {} vertices", c.len()));
        }
        let mut seen = vec![false; n];
        for &v in c {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return fail("hamiltonicity", vec![v], 2.0, 1.0, format!("cycle {ci} repeats or misplaces vertex {v}"));
            }
        }
        for i in 0..n {
            let e = Edge::new(c[i], c[(i + 1) % n]);
            if n < 3 || !g.contains_edge(e) {
                return fail("containment", vec![e.0, e.1], 0.0, 1.0, format!("cycle {ci} uses non-edge {e:?}"));
            }
            if let Some(prev) = used.insert(e, "cycle") {
                return fail("edge_disjointness", vec![e.0, e.1], 2.0, 1.0, format!("edge {e:?} repeated ({prev} and cycle {ci})"));
            }
        }
    }
    let cap = match cert.tail_type {
        TailType::Matching => 1,
        TailType::TwoFactor => 2,
    };
    let mut deg = vec![0usize; n];
    for &e in &cert.tail_edges {
        if e.0 >= n || e.1 >= n || !g.contains_edge(e) {
            return fail("containment", vec![e.0, e.1], 0.0, 1.0, format!("tail uses non-edge {e:?}"));
        }
        if let Some(prev) = used.insert(e, "tail") {
            return fail("edge_disjointness", vec![e.0, e.1], 2.0, 1.0, format!("edge {e:?} repeated ({prev} and tail)"));
        }
        for v in [e.0, e.1] {
            deg[v] += 1;
            if deg[v] > cap {
                return fail("tail_degree", vec![v], deg[v] as f64, cap as f64, format!("tail degree of {v} exceeds {cap}"));
            }
        }
    }
    if cert.tail_type == TailType::TwoFactor && !partial {
        if let Some(v) = deg.iter().position(|&d| d != 2) {
            return fail("tail_regularity", vec![v], deg[v] as f64, 2.0, format!("vertex {v} has tail degree {}", deg[v]));
        }
    }
    if !standalone {
        let want = if cert.k.is_multiple_of(2) { TailType::Matching } else { TailType::TwoFactor };
        if cert.tail_type != want {
            return fail("tail_parity", vec![], 0.0, 0.0, format!("k = {} needs tail {want:?}", cert.k));
        }
        let expect = PackerConfig::new(cert.k.max(4)).cycle_count();
        if cert.k < 4 || (cert.cycles.len() != expect && !partial) || cert.cycles.len() > expect {
            return fail(
                "cycle_count",
                vec![],
                cert.cycles.len() as f64,
                expect as f64,
                format!("k = {} needs {expect} cycles", cert.k),
            );
        }
    }
    Verdict::new("certificate", mode, None, params)
}
