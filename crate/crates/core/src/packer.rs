//! Edge-disjoint Hamilton cycles plus a matching or 2-factor tail.
//!
//! [`decompose`] splits off a reservoir of excess edges and peels `k - 1`
//! large matchings out of a maximum `(k-1)`-matching of what remains.
//! [`pack`] turns pairs of consecutive layers into Hamilton cycles with the
//! rotation engine, feeding each cycle its own reservoir slice, and finishes
//! with the leftover layer (k even) or a 2-factor (k odd).

use std::collections::HashSet;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::kcore::CoreResult;
use crate::matching::{max_b_matching, max_matching_from, max_two_matching_from, peel_matchings, Matching, PeelConfig, TwoMatching};
use crate::posa::{vdpc_from_two_matching, ClosureAudit, ClosureConfig, ClosureEngine, ClosureSchedule, PackStepResult};
use crate::process::ProcessStream;
use crate::seed::{self, Rng};

#[derive(Clone, Debug, Serialize)]
pub struct PackerConfig {
    pub k: usize,
    /// Edge density `m / n`. Inferred from the graph when unset.
    pub c: Option<f64>,
    /// Expected vertex count, checked against the graph when set.
    pub n: Option<usize>,
    pub seed: u64,
    /// Fraction of `(2c - k) n / 4` held out as reservoir.
    pub reservoir_fraction: f64,
    /// Hard cap on the reservoir as a fraction of `m`.
    pub reservoir_cap: f64,
    pub beta: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub depth_cap: usize,
    /// Decomposition attempts before giving up.
    pub trial_budget: usize,
    /// Every layer must reach `layer_fraction * n - 1` edges.
    pub layer_fraction: f64,
    pub closure: ClosureConfig,
}

impl PackerConfig {
    pub fn new(k: usize) -> Self {
        PackerConfig {
            k,
            c: None,
            n: None,
            seed: 0,
            reservoir_fraction: 0.5,
            reservoir_cap: 0.2,
            beta: 0.05,
            gamma: 0.05,
            epsilon: 0.1,
            depth_cap: 60,
            trial_budget: 5,
            layer_fraction: 0.4,
            closure: ClosureConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 4 {
            return Err(Error::InvalidParameter(format!("k = {} < 4", self.k)));
        }
        if let Some(c) = self.c {
            if !(c > self.k as f64 / 2.0) {
                return Err(Error::InvalidParameter(format!("c = {c} must exceed k/2 = {}", self.k as f64 / 2.0)));
            }
        }
        for (name, v) in [("beta", self.beta), ("gamma", self.gamma)] {
            if !(v > 0.0 && v < 0.1) {
                return Err(Error::InvalidParameter(format!("{name} = {v} outside (0, 0.1)")));
            }
        }
        if !(0.0..=1.0).contains(&self.reservoir_fraction) {
            return Err(Error::InvalidParameter("reservoir fraction outside [0, 1]".into()));
        }
        if self.trial_budget == 0 || self.depth_cap == 0 {
            return Err(Error::InvalidParameter("trial budget and depth cap must be positive".into()));
        }
        Ok(())
    }

    /// Hamilton cycles in the target: `(k-2)/2` for even `k`, `(k-3)/2` for odd.
    pub fn cycle_count(&self) -> usize {
        if self.k.is_multiple_of(2) {
            (self.k - 2) / 2
        } else {
            (self.k - 3) / 2
        }
    }
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    /// `G' = G - E_R`.
    pub work_graph: Graph,
    /// Reservoir edges in selection order.
    pub reservoir: Vec<Edge>,
    /// Edges at vertices whose degree fell to `k` during selection.
    pub excluded: HashSet<Edge>,
    pub layers: Vec<Matching>,
    pub c: f64,
}

/// Splits `g` into a reservoir and `k - 1` edge-disjoint matchings of `G'`.
///
/// Reservoir edges are drawn in uniformly random order from the edges whose
/// endpoints both stay at degree `>= k` after removal, up to
/// `min(fraction (2c - k) n / 4, cap m)`. The layers peel a maximum
/// `(k-1)`-matching of `G'`, computed on a random relabelling.
pub fn decompose(g: &Graph, cfg: &PackerConfig, rng: &mut Rng) -> Result<Decomposition> {
    cfg.validate()?;
    let (n, k) = (g.n(), cfg.k);
    if let Some(want) = cfg.n {
        if want != n {
            return Err(Error::InvalidParameter(format!("graph has {n} vertices, expected {want}")));
        }
    }
    if n == 0 || g.min_degree() < k {
        return Err(Error::Precondition(format!(
            "minimum degree {} < k = {k}",
            if n == 0 { 0 } else { g.min_degree() }
        )));
    }
    let c = cfg.c.unwrap_or(g.m() as f64 / n as f64);
    if c <= k as f64 {
        log::warn!("c = {c:.3} <= k = {k}; reservoir and layers may be tight");
    }
    let want = (cfg.reservoir_fraction * (2.0 * c - k as f64).max(0.0) * n as f64 / 4.0)
        .min(cfg.reservoir_cap * g.m() as f64)
        .floor() as usize;
    let mut order: Vec<Edge> = g.edges().to_vec();
    order.shuffle(rng);
    let mut deg = g.degrees();
    let mut reservoir = Vec::with_capacity(want);
    let mut taken = HashSet::with_capacity(want);
    for e in order {
        if reservoir.len() == want {
            break;
        }
        if deg[e.0] > k && deg[e.1] > k {
            deg[e.0] -= 1;
            deg[e.1] -= 1;
            reservoir.push(e);
            taken.insert(e);
        }
    }
    let work_graph = g.without_edges(&taken);
    let excluded = work_graph
        .edges()
        .iter()
        .copied()
        .filter(|e| deg[e.0] == k || deg[e.1] == k)
        .collect();

    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut inv = vec![0; n];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    let relabelled = Graph::from_edges(n, work_graph.edges().iter().map(|e| Edge::new(perm[e.0], perm[e.1])))?;
    let h = max_b_matching(&relabelled, k - 1);
    let h = Graph::from_edges(n, h.edges().iter().map(|e| Edge::new(inv[e.0], inv[e.1])))?;
    let peeled = peel_matchings(&h, k, &PeelConfig::new(k - 1, 0.0)?)?;
    let threshold = cfg.layer_fraction * n as f64 - 1.0;
    let sizes: Vec<usize> = peeled.layers.iter().map(Matching::size).collect();
    if sizes.iter().any(|&s| (s as f64) < threshold) {
        return Err(Error::Decomposition(format!(
            "layer sizes {sizes:?} below {threshold}"
        )));
    }
    Ok(Decomposition {
        work_graph,
        reservoir,
        excluded,
        layers: peeled.layers,
        c,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailType {
    Matching,
    TwoFactor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    #[default]
    Success,
    Partial,
    Failure,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct CycleAudit {
    pub index: usize,
    pub target_size: usize,
    pub initial_paths: usize,
    pub slice_size: usize,
    pub reservoir_used: usize,
    pub m_intersection_initial: usize,
    pub m_intersection_final: usize,
    pub r_t_total: f64,
    pub events: usize,
    pub claim_levels_checked: usize,
    pub claim_violations: usize,
    pub bookkeeping_breaches: usize,
    pub closed: bool,
    #[serde(skip)]
    pub closure: ClosureAudit,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct PackAudit {
    pub outcome: Outcome,
    pub c: f64,
    pub attempts: usize,
    pub reservoir_size: usize,
    pub reservoir_used: usize,
    pub layer_sizes: Vec<usize>,
    pub cycles: Vec<CycleAudit>,
    pub tail_size: usize,
    /// Edges of the last layer left after the cycles, before the tail
    /// matching is augmented in the rest of the work graph (k even).
    pub tail_layer_size: usize,
    /// Reservoir edges in a 2-factor tail.
    pub tail_reservoir_used: usize,
    pub message: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PackingCertificate {
    pub n: usize,
    pub k: usize,
    pub cycles: Vec<Vec<usize>>,
    pub tail_type: TailType,
    pub tail_edges: Vec<Edge>,
    #[serde(default)]
    pub audit: PackAudit,
}

impl PackingCertificate {
    pub fn outcome(&self) -> Outcome {
        self.audit.outcome
    }

    pub fn is_complete(&self) -> bool {
        self.audit.outcome == Outcome::Success
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Relabels vertices by `map` (vertex `i` becomes `map[i]`) onto `n` vertices.
    pub fn relabel(&self, map: &[usize], n: usize) -> PackingCertificate {
        PackingCertificate {
            n,
            k: self.k,
            cycles: self
                .cycles
                .iter()
                .map(|c| canonical_cycle(&c.iter().map(|&v| map[v]).collect::<Vec<_>>()))
                .collect(),
            tail_type: self.tail_type,
            tail_edges: {
                let mut t: Vec<Edge> = self.tail_edges.iter().map(|e| Edge::new(map[e.0], map[e.1])).collect();
                t.sort_unstable();
                t
            },
            audit: self.audit.clone(),
        }
    }
}

/// Rotates `cycle` to start at its minimum vertex and orients it toward the
/// smaller of that vertex's two neighbours.
pub fn canonical_cycle(cycle: &[usize]) -> Vec<usize> {
    let len = cycle.len();
    let Some(at) = (0..len).min_by_key(|&i| cycle[i]) else {
        return Vec::new();
    };
    let fwd = cycle[(at + 1) % len];
    let back = cycle[(at + len - 1) % len];
    if fwd <= back {
        (0..len).map(|i| cycle[(at + i) % len]).collect()
    } else {
        (0..len).map(|i| cycle[(at + len - i) % len]).collect()
    }
}

fn cycle_edges(cycle: &[usize]) -> impl Iterator<Item = Edge> + '_ {
    let len = cycle.len();
    (0..len).map(move |i| Edge::new(cycle[i], cycle[(i + 1) % len]))
}

/// Packs `(k-2)/2` (k even) or `(k-3)/2` (k odd) Hamilton cycles and a tail.
///
/// Decomposition is retried up to `trial_budget` times. A cycle that cannot
/// be closed before its reservoir slice runs out yields a partial
/// certificate holding the cycles found so far.
pub fn pack(g: &Graph, cfg: &PackerConfig, rng: &mut Rng) -> Result<PackingCertificate> {
    cfg.validate()?;
    let mut attempts = 0;
    let dec = loop {
        attempts += 1;
        match decompose(g, cfg, rng) {
            Ok(d) => break d,
            Err(Error::Decomposition(msg)) if attempts >= cfg.trial_budget => {
                return Err(Error::Decomposition(format!("{attempts} attempts: {msg}")))
            }
            Err(Error::Decomposition(_)) => continue,
            Err(e) => return Err(e),
        }
    };
    Ok(pack_decomposed(g, &dec, cfg, attempts, rng))
}

fn pack_decomposed(g: &Graph, dec: &Decomposition, cfg: &PackerConfig, attempts: usize, rng: &mut Rng) -> PackingCertificate {
    let (n, k) = (g.n(), cfg.k);
    let slices = {
        let mut r = dec.reservoir.clone();
        r.shuffle(rng);
        let parts = k - 1;
        let base = r.len() / parts;
        let mut out = Vec::with_capacity(parts);
        let mut it = r.into_iter();
        for _ in 0..parts {
            out.push(it.by_ref().take(base).collect::<Vec<Edge>>());
        }
        // leftovers past equal slices go to the last one
        out.last_mut().unwrap().extend(it);
        out
    };
    let mut audit = PackAudit {
        c: dec.c,
        attempts,
        reservoir_size: dec.reservoir.len(),
        layer_sizes: dec.layers.iter().map(Matching::size).collect(),
        ..PackAudit::default()
    };
    let mut closure = cfg.closure.clone();
    closure.depth_cap = cfg.depth_cap;
    let mut used: HashSet<Edge> = HashSet::new();
    let mut cycles = Vec::new();
    for i in 0..cfg.cycle_count() {
        let host = dec.work_graph.without_edges(&used);
        let pair = dec.layers[2 * i]
            .edges()
            .iter()
            .chain(dec.layers[2 * i + 1].edges())
            .copied()
            .filter(|e| !used.contains(e));
        let target = TwoMatching::from_edges(n, pair).expect("two disjoint matchings");
        let future: HashSet<Edge> = dec.layers[2 * i + 2..]
            .iter()
            .flat_map(|m| m.edges().iter().copied())
            .filter(|e| !used.contains(e))
            .collect();
        let start = max_two_matching_from(&host.without_edges(&future), &target).expect("target lies in host");
        let cover = vdpc_from_two_matching(&start);
        let r0 = target.size() as f64 - cover.m_intersection(&target) as f64;
        let mut sched = ClosureSchedule::new(n, cover.size(), r0);
        let initial_paths = cover.size();
        let engine = ClosureEngine::new(closure.clone()).protect(&future);
        let step = engine.run(&host, cover, &target, &slices[i], &mut sched);
        let ca = step.audit().clone();
        let mut rec = CycleAudit {
            index: i,
            target_size: target.size(),
            initial_paths,
            slice_size: slices[i].len(),
            reservoir_used: ca.reservoir_used,
            m_intersection_initial: ca.initial_m_intersection,
            m_intersection_final: ca.events.last().map_or(ca.initial_m_intersection, |e| e.m_intersection),
            r_t_total: sched.r_t(),
            events: ca.events.len(),
            claim_levels_checked: ca.levels_checked,
            claim_violations: ca.claim_violations,
            bookkeeping_breaches: ca.bookkeeping_breaches,
            closed: false,
            closure: ca,
        };
        audit.reservoir_used += rec.reservoir_used;
        match step {
            PackStepResult::Cycle { cycle, .. } => {
                rec.closed = true;
                used.extend(cycle_edges(&cycle));
                cycles.push(canonical_cycle(&cycle));
                audit.cycles.push(rec);
            }
            PackStepResult::Exhausted { cover, .. } => {
                audit.outcome = Outcome::Partial;
                audit.message = Some(format!(
                    "cycle {} left {} paths after {} reservoir edges",
                    i + 1,
                    cover.size(),
                    rec.reservoir_used
                ));
                audit.cycles.push(rec);
                break;
            }
        }
    }

    let (tail_type, tail_edges) = if k % 2 == 0 {
        let layer = Matching::from_edges(n, dec.layers[k - 2].edges().iter().copied().filter(|e| !used.contains(e)))
            .expect("sub-matching");
        audit.tail_layer_size = layer.size();
        let rest = dec.work_graph.without_edges(&used);
        let tail = max_matching_from(&rest, &layer).expect("layer lies in the work graph");
        (TailType::Matching, tail.edges().to_vec())
    } else {
        let last = dec.work_graph.without_edges(&used);
        let start = TwoMatching::from_edges(
            n,
            dec.layers[k - 3]
                .edges()
                .iter()
                .chain(dec.layers[k - 2].edges())
                .copied()
                .filter(|e| !used.contains(e)),
        )
        .expect("two disjoint matchings");
        let extra: Vec<Edge> = slices[k - 2].iter().copied().filter(|e| !used.contains(e)).collect();
        let host = last.with_edges(extra.iter().copied()).expect("reservoir is disjoint from the work graph");
        let m = max_two_matching_from(&host, &start).expect("start lies in host");
        let res: HashSet<Edge> = extra.into_iter().collect();
        audit.tail_reservoir_used = m.edges().iter().filter(|e| res.contains(e)).count();
        audit.reservoir_used += audit.tail_reservoir_used;
        if !m.is_two_factor() && audit.outcome == Outcome::Success {
            audit.outcome = Outcome::Partial;
            audit.message = Some(format!("tail 2-matching has {} of {n} edges", m.size()));
        }
        (TailType::TwoFactor, m.edges())
    };
    audit.tail_size = tail_edges.len();
    PackingCertificate {
        n,
        k,
        cycles,
        tail_type,
        tail_edges,
        audit,
    }
}

/// A process checkpoint: a multiple of `tau_k`, an absolute step, or
/// `n ln n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Checkpoint {
    Tau(f64),
    At(usize),
    NLogN,
}

impl Checkpoint {
    pub fn defaults() -> Vec<Checkpoint> {
        vec![Checkpoint::Tau(1.0), Checkpoint::Tau(1.1), Checkpoint::Tau(2.0), Checkpoint::NLogN]
    }

    /// Parses `tau`, `1.1tau`, `nlogn` or a plain step count.
    pub fn parse(s: &str) -> Result<Checkpoint> {
        let s = s.trim();
        let bad = || Error::InvalidParameter(format!("bad checkpoint `{s}`"));
        if s == "nlogn" {
            Ok(Checkpoint::NLogN)
        } else if let Some(f) = s.strip_suffix("tau") {
            let f = if f.is_empty() { 1.0 } else { f.trim_end_matches('*').parse().map_err(|_| bad())? };
            if f < 1.0 {
                return Err(bad());
            }
            Ok(Checkpoint::Tau(f))
        } else {
            s.parse().map(Checkpoint::At).map_err(|_| bad())
        }
    }

    pub fn resolve(self, n: usize, tau: usize) -> usize {
        match self {
            Checkpoint::Tau(f) => (f * tau as f64).ceil() as usize,
            Checkpoint::At(t) => t,
            Checkpoint::NLogN => (n as f64 * (n.max(2) as f64).ln()).ceil() as usize,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CheckpointResult {
    EmptyCore,
    Packed { certificate: PackingCertificate },
    Failed { error: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct ProcessCheckpoint {
    pub t: usize,
    pub tau_k: usize,
    pub core_size: usize,
    pub core_edges: usize,
    /// Certificate on the core, in original vertex labels.
    pub result: CheckpointResult,
    #[serde(skip)]
    pub core: Option<CoreResult>,
}

/// Runs the random graph process on `n` vertices and packs its k-core at
/// each checkpoint, with `c = |E(core)| / |V(core)|`. Checkpoints beyond
/// `max_t` (default all pairs) are clamped.
pub fn pack_process(
    n: usize,
    cfg: &PackerConfig,
    checkpoints: &[Checkpoint],
    max_t: Option<usize>,
    rng: &mut Rng,
) -> Result<Vec<ProcessCheckpoint>> {
    if cfg.k < 4 {
        return Err(Error::InvalidParameter(format!("k = {} < 4", cfg.k)));
    }
    let k = cfg.k;
    let mut stream = ProcessStream::new(n, rand::Rng::random(rng));
    let (tau, _) = stream.tau_k(k);
    let cap = max_t.unwrap_or(usize::MAX).min(stream.total_pairs());
    let mut out = Vec::with_capacity(checkpoints.len());
    for (idx, cp) in checkpoints.iter().enumerate() {
        let t = cp.resolve(n, tau).min(cap);
        let core = crate::kcore::k_core(&stream.graph_at(t), k);
        let core_size = core.len();
        let core_edges = core.core_graph.m();
        let result = if core.is_empty() {
            CheckpointResult::EmptyCore
        } else {
            let mut inner = cfg.clone();
            inner.c = None;
            inner.n = None;
            let mut trng = seed::rng(seed::sub_seed(cfg.seed, idx as u64));
            match pack(&core.core_graph, &inner, &mut trng) {
                Ok(cert) => CheckpointResult::Packed {
                    certificate: cert.relabel(&core.core_vertices, n),
                },
                Err(e) => CheckpointResult::Failed { error: e.to_string() },
            }
        };
        out.push(ProcessCheckpoint {
            t,
            tau_k: tau,
            core_size,
            core_edges,
            result,
            core: Some(core),
        });
    }
    Ok(out)
}
