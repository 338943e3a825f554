use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::expand::{expand_endpoints, ExpandConfig, LevelStats, Root, RotationEvent, RotationState, Side};
use super::host::HostGraph;
use super::{glue_with_fake_edges, PathCover};
use crate::graph::{Edge, Graph};
use crate::matching::TwoMatching;

#[derive(Clone, Debug, Serialize)]
pub struct ClosureConfig {
    /// Absolute cap on either depth limit.
    pub depth_cap: usize,
    pub max_left_starts: usize,
    pub max_right_starts: usize,
    /// Witness paths taken per right start.
    pub max_right_roots: usize,
    /// Reservoir misses tolerated before the targets are rebuilt.
    pub rebuild_after_misses: usize,
}

impl Default for ClosureConfig {
    fn default() -> Self {
        ClosureConfig {
            depth_cap: 60,
            max_left_starts: 16,
            max_right_starts: 32,
            max_right_roots: 4,
            rebuild_after_misses: 2048,
        }
    }
}

fn ln(n: usize) -> f64 {
    (n.max(3) as f64).ln()
}

/// `l_t = ⌈log_1.1(n / max(s-1, 1))⌉ + 4` and `l_t' = l_t + ⌈log_1.1 ln n⌉`,
/// both capped.
pub fn depth_limits(n: usize, s: usize, cap: usize) -> (usize, usize) {
    let base = (n as f64 / (s.saturating_sub(1).max(1)) as f64).max(1.0);
    let lt = (base.ln() / 1.1f64.ln()).ceil() as usize + 4;
    let extra = (ln(n).ln().max(0.0) / 1.1f64.ln()).ceil() as usize;
    (lt.min(cap), (lt + extra).min(cap))
}

/// Cover size `s_t`, loss budget `r_t` and reservoir clock `t`.
#[derive(Clone, Debug, Serialize)]
pub struct ClosureSchedule {
    n: usize,
    s_t: usize,
    r_t: f64,
    t: usize,
    history: Vec<(usize, usize, f64)>,
}

impl ClosureSchedule {
    pub fn new(n: usize, s0: usize, r0: f64) -> Self {
        ClosureSchedule {
            n,
            s_t: s0,
            r_t: r0,
            t: 0,
            history: vec![(0, s0, r0)],
        }
    }

    pub fn s_t(&self) -> usize {
        self.s_t
    }

    pub fn r_t(&self) -> f64 {
        self.r_t
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// `(t, s_t, r_t)` after every drop of `s_t`.
    pub fn history(&self) -> &[(usize, usize, f64)] {
        &self.history
    }

    /// Tier boundaries `n / (ln ln n)^8` and `n / (ln n)^8`.
    pub fn thresholds(&self) -> (f64, f64) {
        let n = self.n as f64;
        let l1 = ln(self.n).max(std::f64::consts::E);
        let l2 = l1.ln().max(1.0);
        (n / l2.powi(8), n / l1.powi(8))
    }

    /// Budget increment charged when the cover drops to size `s`:
    /// `(ln ln ln n)^2`, `(ln ln n)^2` or `(ln n)^2` by tier. Each iterated
    /// logarithm is floored at 1.
    pub fn increment(&self, s: usize) -> f64 {
        let l1 = ln(self.n).max(std::f64::consts::E);
        let l2 = l1.ln().max(std::f64::consts::E);
        let l3 = l2.ln().max(1.0);
        let (hi, lo) = self.thresholds();
        let s = s as f64;
        if s >= hi {
            l3 * l3
        } else if s > lo {
            l2 * l2
        } else {
            l1 * l1
        }
    }

    /// Records a strict drop of the cover size.
    pub fn record_drop(&mut self, s_new: usize) {
        assert!(s_new < self.s_t, "cover size must strictly drop");
        self.r_t += self.increment(s_new);
        self.s_t = s_new;
        self.history.push((self.t, s_new, self.r_t));
    }

    pub fn consume(&mut self) {
        self.t += 1;
    }
}

/// A structural improvement found without consuming reservoir edges.
#[derive(Clone, Debug)]
pub struct FoundEvent {
    pub kind: EventKind,
    pub path: Vec<usize>,
    pub fake: HashSet<Edge>,
    pub depth: usize,
}

/// Left and right expansions for the current cover, and the closure targets
/// `Q_t` with their witnesses.
#[derive(Clone, Debug)]
pub struct ClosureTargets {
    pub depth_limits: (usize, usize),
    pub left: Vec<RotationState>,
    pub v_right: Vec<usize>,
    pub right: Vec<RotationState>,
    /// Endpoint pair -> (right expansion, witness node).
    pub pairs: HashMap<Edge, (usize, usize)>,
    pub event: Option<FoundEvent>,
}

impl ClosureTargets {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The witness Hamilton path of a target pair, its fake edges and its
    /// rotation depth.
    pub fn witness(&self, e: Edge) -> Option<(Vec<usize>, HashSet<Edge>, usize)> {
        let &(r, node) = self.pairs.get(&e)?;
        let st = &self.right[r];
        let path = st.path_of(node);
        let fake = st.fakes_on_path(node, &path);
        Some((path, fake, st.total_depth(node)))
    }

    fn states(&self) -> impl Iterator<Item = &RotationState> {
        self.left.iter().chain(&self.right)
    }
}

fn event_of(st: &RotationState) -> Option<FoundEvent> {
    let (node, kind) = match st.event? {
        RotationEvent::FakeDeleted { node, .. } => (node, EventKind::FakeDeleted),
        RotationEvent::ClosingChord { node } => (node, EventKind::HostChord),
    };
    let path = st.path_of(node);
    let fake = st.fakes_on_path(node, &path);
    Some(FoundEvent {
        kind,
        path,
        fake,
        depth: st.total_depth(node),
    })
}

/// Expands fixed left ends `v_{i,1}` (path `i` glued first, its cyclic
/// predecessor last) to depth `l_t`; collects `V_right`, the far ends reached
/// from at least `max(L / ln n, 1)` of the `L` left expansions; expands each
/// right vertex to depth `l_t'` from witness paths of the left expansions
/// with the smallest fixed ends; and returns the endpoint pairs of the right
/// expansions as `Q_t`. Stops early on a fake-edge deletion or a host chord
/// closing a witness path.
pub fn build_closure_targets(
    host: &HostGraph,
    cover: &PathCover,
    cfg: &ClosureConfig,
    avoid: Option<&HashSet<Edge>>,
) -> ClosureTargets {
    let n = host.n();
    let s = cover.size();
    let (lt, lt2) = depth_limits(n, s, cfg.depth_cap);
    let mut out = ClosureTargets {
        depth_limits: (lt, lt2),
        left: Vec::new(),
        v_right: Vec::new(),
        right: Vec::new(),
        pairs: HashMap::new(),
        event: None,
    };
    if s == 0 {
        return out;
    }
    let left_count = s.min(cfg.max_left_starts).max(1);
    let mut ecfg = ExpandConfig::new(lt);
    ecfg.avoid = avoid;
    for step in 0..left_count {
        let i = step * s / left_count;
        let j = (i + s - 1) % s;
        let glued = glue_with_fake_edges(cover, i, j).expect("valid indices");
        let st = RotationState::new(
            glued.path[0],
            Side::Left,
            vec![Root {
                path: glued.path,
                fake: glued.fake,
                offset: 0,
            }],
        );
        let st = expand_endpoints(host, st, &ecfg);
        if let Some(ev) = event_of(&st) {
            out.event = Some(ev);
            out.left.push(st);
            return out;
        }
        out.left.push(st);
    }

    let threshold = ((left_count as f64 / ln(n)).ceil() as usize).max(1);
    let mut reached: HashMap<usize, Vec<usize>> = HashMap::new();
    for (li, st) in out.left.iter().enumerate() {
        for &(end, _) in &st.witnesses {
            reached.entry(end).or_default().push(li);
        }
    }
    let mut cands: Vec<(usize, Vec<usize>)> = reached
        .into_iter()
        .filter(|(_, ls)| ls.len() >= threshold)
        .collect();
    cands.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.0.cmp(&b.0)));
    cands.truncate(cfg.max_right_starts);
    out.v_right = cands.iter().map(|c| c.0).collect();

    ecfg.depth_limit = lt2;
    for (v, mut lefts) in cands {
        lefts.sort_by_key(|&li| out.left[li].fixed_end);
        lefts.truncate(cfg.max_right_roots);
        let roots: Vec<Root> = lefts
            .iter()
            .map(|&li| {
                let st = &out.left[li];
                let node = st.witness(v).expect("v is an endpoint");
                let mut path = st.path_of(node);
                let fake = st.fakes_on_path(node, &path);
                path.reverse();
                Root {
                    path,
                    fake,
                    offset: st.total_depth(node),
                }
            })
            .collect();
        let st = expand_endpoints(host, RotationState::new(v, Side::Right, roots), &ecfg);
        if let Some(ev) = event_of(&st) {
            out.event = Some(ev);
            out.right.push(st);
            return out;
        }
        let ri = out.right.len();
        for &(w, node) in &st.witnesses {
            if w != v {
                out.pairs.entry(Edge::new(v, w)).or_insert((ri, node));
            }
        }
        out.right.push(st);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    /// A rotation deleted a fake edge.
    FakeDeleted,
    /// A host edge closed a witness path.
    HostChord,
    /// A reservoir edge hit a closure target.
    Reservoir,
}

/// One drop of the cover size.
#[derive(Clone, Debug, Serialize)]
pub struct ClosureEvent {
    pub t: usize,
    pub s_t: usize,
    pub r_t: f64,
    pub depth_used: usize,
    pub fake_edges_remaining: usize,
    pub kind: EventKind,
    pub m_intersection: usize,
    /// `|target| - r_t - 2(l_t + l_t')`.
    pub intersection_bound: f64,
    /// Size of the symmetric difference of consecutive real-edge sets.
    pub edges_changed: usize,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ClosureAudit {
    pub initial_size: usize,
    pub target_size: usize,
    pub initial_m_intersection: usize,
    pub events: Vec<ClosureEvent>,
    pub reservoir_used: usize,
    pub target_builds: usize,
    pub expansions: usize,
    pub levels_checked: usize,
    pub claim_violations: usize,
    /// The first few failing levels.
    pub violation_examples: Vec<LevelStats>,
    /// Events whose real-edge change exceeded `2 * depth_used + 1`.
    pub bookkeeping_breaches: usize,
}

impl ClosureAudit {
    fn absorb(&mut self, targets: &ClosureTargets) {
        self.target_builds += 1;
        for st in targets.states() {
            self.expansions += 1;
            self.levels_checked += st.levels.len();
            for l in st.levels.iter().filter(|l| !l.holds) {
                self.claim_violations += 1;
                if self.violation_examples.len() < 16 {
                    self.violation_examples.push(l.clone());
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
pub enum PackStepResult {
    Cycle { cycle: Vec<usize>, audit: ClosureAudit },
    Exhausted { cover: PathCover, audit: ClosureAudit },
}

impl PackStepResult {
    pub fn audit(&self) -> &ClosureAudit {
        match self {
            PackStepResult::Cycle { audit, .. } | PackStepResult::Exhausted { audit, .. } => audit,
        }
    }
}

/// Closes path covers into a Hamilton cycle by rotations, host chords and
/// reservoir edges.
#[derive(Clone, Debug, Default)]
pub struct ClosureEngine<'a> {
    pub cfg: ClosureConfig,
    /// Edges kept out of rotations and closures while other moves remain.
    pub protected: Option<&'a HashSet<Edge>>,
}

impl<'a> ClosureEngine<'a> {
    pub fn new(cfg: ClosureConfig) -> Self {
        ClosureEngine { cfg, protected: None }
    }

    pub fn protect(mut self, edges: &'a HashSet<Edge>) -> Self {
        self.protected = Some(edges);
        self
    }

    fn targets(&self, host: &HostGraph, cover: &PathCover, audit: &mut ClosureAudit) -> ClosureTargets {
        if let Some(p) = self.protected.filter(|p| !p.is_empty()) {
            let t = build_closure_targets(host, cover, &self.cfg, Some(p));
            audit.absorb(&t);
            if t.event.is_some() {
                return t;
            }
        }
        let t = build_closure_targets(host, cover, &self.cfg, None);
        audit.absorb(&t);
        t
    }

    /// Runs until the cover is a Hamilton cycle or the reservoir is spent.
    /// Reservoir edges are consumed in order and join the host as they go.
    pub fn run(
        &self,
        g: &Graph,
        pc: PathCover,
        target: &TwoMatching,
        reservoir: &[Edge],
        sched: &mut ClosureSchedule,
    ) -> PackStepResult {
        let n = g.n();
        let mut host = HostGraph::new(g);
        let mut cover = pc;
        let mut audit = ClosureAudit {
            initial_size: cover.size(),
            target_size: target.size(),
            initial_m_intersection: cover.m_intersection(target),
            ..ClosureAudit::default()
        };
        let mut next = 0;
        loop {
            if let Some(c) = cover.cycle() {
                return PackStepResult::Cycle {
                    cycle: c.to_vec(),
                    audit,
                };
            }
            if n < 3 {
                return PackStepResult::Exhausted { cover, audit };
            }
            let targets = self.targets(&host, &cover, &mut audit);
            let limits = targets.depth_limits;
            if let Some(ev) = targets.event {
                cover = self.apply(&cover, ev, limits, target, sched, &mut audit);
                continue;
            }
            if next == reservoir.len() {
                return PackStepResult::Exhausted { cover, audit };
            }
            let mut misses = 0;
            while next < reservoir.len() && misses < self.cfg.rebuild_after_misses {
                let e = reservoir[next];
                next += 1;
                sched.consume();
                audit.reservoir_used += 1;
                host.add_edge(e);
                if let Some((path, fake, depth)) = targets.witness(e) {
                    let ev = FoundEvent {
                        kind: EventKind::Reservoir,
                        path,
                        fake,
                        depth,
                    };
                    cover = self.apply(&cover, ev, limits, target, sched, &mut audit);
                    break;
                }
                misses += 1;
            }
        }
    }

    fn apply(
        &self,
        old: &PathCover,
        ev: FoundEvent,
        limits: (usize, usize),
        target: &TwoMatching,
        sched: &mut ClosureSchedule,
        audit: &mut ClosureAudit,
    ) -> PathCover {
        let new = match ev.kind {
            EventKind::FakeDeleted => PathCover::from_glued(&ev.path, &ev.fake),
            EventKind::HostChord | EventKind::Reservoir => close(&ev.path, &ev.fake),
        };
        debug_assert_eq!(new.size() + 1, old.size());
        let before: HashSet<Edge> = old.real_edges().into_iter().collect();
        let after: HashSet<Edge> = new.real_edges().into_iter().collect();
        let changed = before.symmetric_difference(&after).count();
        if changed > 2 * ev.depth + 1 {
            audit.bookkeeping_breaches += 1;
        }
        sched.record_drop(new.size());
        let event = ClosureEvent {
            t: sched.t(),
            s_t: new.size(),
            r_t: sched.r_t(),
            depth_used: ev.depth,
            fake_edges_remaining: new.size().saturating_sub(1),
            kind: ev.kind,
            m_intersection: new.m_intersection(target),
            intersection_bound: target.size() as f64 - sched.r_t() - 2.0 * (limits.0 + limits.1) as f64,
            edges_changed: changed,
        };
        if log::log_enabled!(target: "hamcore::trace", log::Level::Debug) {
            log::debug!(
                target: "hamcore::trace",
                "{}",
                serde_json::json!({
                    "t": event.t,
                    "s_t": event.s_t,
                    "r_t": event.r_t,
                    "depth_used": event.depth_used,
                    "fake_edges_remaining": event.fake_edges_remaining,
                })
            );
        }
        audit.events.push(event);
        new
    }
}

/// Closes a Hamilton path by the edge between its ends; if fake edges remain
/// the smallest is dropped, leaving one path fewer.
fn close(path: &[usize], fake: &HashSet<Edge>) -> PathCover {
    let Some(&drop) = fake.iter().min() else {
        return PathCover::hamilton_cycle(path.to_vec());
    };
    let s = path.len();
    let at = (0..s - 1)
        .find(|&i| Edge::new(path[i], path[i + 1]) == drop)
        .expect("fake edge lies on the path");
    let mut opened = Vec::with_capacity(s);
    opened.extend_from_slice(&path[at + 1..]);
    opened.extend_from_slice(&path[..=at]);
    let rest: HashSet<Edge> = fake.iter().copied().filter(|&e| e != drop).collect();
    PathCover::from_glued(&opened, &rest)
}

/// [`ClosureEngine::run`] with the default configuration.
pub fn consume_reservoir(
    g: &Graph,
    pc: PathCover,
    target: &TwoMatching,
    reservoir: &[Edge],
    sched: &mut ClosureSchedule,
) -> PackStepResult {
    ClosureEngine::default().run(g, pc, target, reservoir, sched)
}
