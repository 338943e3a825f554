//! Truncated-Poisson calibration and configuration-model sampling of uniform
//! random graphs with `n` vertices, `m` edges and minimum degree `k`.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, MultiGraph};
use crate::seed::Rng;

/// `e^λ − Σ_{i<k} λ^i / i!`, the normalizer of Poisson(λ) conditioned on `≥ k`.
///
/// The direct difference is used only when the subtracted head is at most half
/// of `e^λ`; otherwise the tail `Σ_{i≥k} λ^i / i!` is summed, which has no
/// cancellation.
pub fn f_k(k: usize, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "f_k needs a positive finite rate, got {lambda}"
        )));
    }
    Ok(f_k_unchecked(k, lambda))
}

fn f_k_unchecked(k: usize, lambda: f64) -> f64 {
    let exp = lambda.exp();
    let mut head = 0.0;
    let mut term = 1.0;
    for i in 0..k {
        head += term;
        term *= lambda / (i + 1) as f64;
    }
    if head <= 0.5 * exp {
        return exp - head;
    }
    // term == λ^k / k!
    let mut sum = 0.0;
    let mut i = k;
    loop {
        sum += term;
        i += 1;
        term *= lambda / i as f64;
        if term <= sum * 1e-18 && i as f64 > lambda {
            break;
        }
    }
    sum
}

/// Mean of the truncated variable, `λ f_{k−1}(λ) / f_k(λ)`. For `k = 0` it is `λ`.
pub fn truncated_mean(k: usize, lambda: f64) -> f64 {
    if k == 0 {
        return lambda;
    }
    lambda * f_k_unchecked(k - 1, lambda) / f_k_unchecked(k, lambda)
}

/// The rate whose truncated mean is `mean_target`, by bisection.
///
/// The truncated mean increases strictly from `k` (as `λ → 0`) and exceeds
/// `λ`, so `(0, mean_target]` always brackets the root.
pub fn solve_lambda(k: usize, mean_target: f64) -> Result<f64> {
    if !(mean_target > k as f64) || !mean_target.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "truncated mean must exceed k = {k}, got {mean_target}"
        )));
    }
    let (mut lo, mut hi) = (0.0f64, mean_target);
    let mut mid = 0.5 * hi;
    for _ in 0..400 {
        mid = 0.5 * (lo + hi);
        let err = truncated_mean(k, mid) - mean_target;
        if err.abs() <= 1e-12 * mean_target || hi - lo <= f64::EPSILON * hi {
            break;
        }
        if err > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(mid)
}

/// Poisson(λ) conditioned on being at least `k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncatedPoisson {
    k: usize,
    lambda: f64,
    /// `P(X = k)`, used by the inversion sampler.
    p_first: f64,
}

impl TruncatedPoisson {
    pub fn new(k: usize, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "truncated Poisson needs λ > 0, got {lambda}"
            )));
        }
        // 1 / P(X = k) = Σ_{j≥0} λ^j k! / (k+j)!
        let mut s = 0.0f64;
        let mut term = 1.0;
        let mut j = 0usize;
        while term > 1e-18 * s.max(1.0) || (k + j) as f64 <= lambda {
            s += term;
            j += 1;
            term *= lambda / (k + j) as f64;
        }
        Ok(TruncatedPoisson {
            k,
            lambda,
            p_first: 1.0 / s,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mean(&self) -> f64 {
        truncated_mean(self.k, self.lambda)
    }

    /// `P(X = t)`.
    pub fn pmf(&self, t: usize) -> f64 {
        if t < self.k {
            return 0.0;
        }
        (self.k + 1..=t).fold(self.p_first, |p, i| p * self.lambda / i as f64)
    }

    pub fn sample(&self, rng: &mut Rng) -> usize {
        if self.lambda >= self.k as f64 / 2.0 {
            let pois = Poisson::new(self.lambda).expect("rate validated at construction");
            loop {
                let x: f64 = pois.sample(rng);
                let x = x as usize;
                if x >= self.k {
                    return x;
                }
            }
        }
        let mut u: f64 = rng.random();
        let mut t = self.k;
        let mut p = self.p_first;
        loop {
            if u < p || p == 0.0 {
                return t;
            }
            u -= p;
            t += 1;
            p *= self.lambda / t as f64;
        }
    }
}

pub fn sample_truncated_poisson(params: &TruncatedPoisson, rng: &mut Rng) -> usize {
    params.sample(rng)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeSequence {
    pub degrees: Vec<usize>,
    pub total: usize,
}

impl DegreeSequence {
    pub fn new(degrees: Vec<usize>) -> Self {
        let total = degrees.iter().sum();
        DegreeSequence { degrees, total }
    }
}

pub const DEFAULT_SEQUENCE_BUDGET: u64 = 1_000_000;
pub const DEFAULT_PAIRING_BUDGET: u64 = 10_000;

/// `n` i.i.d. truncated-Poisson degrees conditioned on summing to `2m`, by
/// redrawing whole vectors. A draw is abandoned as soon as its partial sum
/// leaves no room for the remaining vertices, which does not change the
/// conditional law.
pub fn sample_degree_sequence(
    n: usize,
    m: usize,
    k: usize,
    rng: &mut Rng,
    budget: u64,
) -> Result<DegreeSequence> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    let target = 2 * m;
    if target < k * n {
        return Err(Error::InvalidParameter(format!(
            "2m = {target} < kn = {}: no sequence with minimum degree {k}",
            k * n
        )));
    }
    if target == k * n {
        return Ok(DegreeSequence::new(vec![k; n]));
    }
    let law = TruncatedPoisson::new(k, solve_lambda(k, target as f64 / n as f64)?)?;
    let mut degrees = vec![0; n];
    'attempt: for _ in 0..budget {
        let mut sum = 0;
        for (i, d) in degrees.iter_mut().enumerate() {
            *d = law.sample(rng);
            sum += *d;
            if sum + k * (n - 1 - i) > target {
                continue 'attempt;
            }
        }
        if sum == target {
            return Ok(DegreeSequence::new(degrees));
        }
    }
    Err(Error::BudgetExhausted {
        budget,
        what: format!("conditioning {n} degrees on the sum {target}"),
    })
}

/// Uniform perfect pairing of the configuration points, via Fisher–Yates.
pub fn pairing_to_multigraph(seq: &DegreeSequence, rng: &mut Rng) -> Result<MultiGraph> {
    if !seq.total.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "degree total {} is odd",
            seq.total
        )));
    }
    let mut points: Vec<usize> = seq
        .degrees
        .iter()
        .enumerate()
        .flat_map(|(v, &d)| std::iter::repeat_n(v, d))
        .collect();
    points.shuffle(rng);
    let edges = points.chunks_exact(2).map(|p| (p[0], p[1])).collect();
    Ok(MultiGraph {
        n: seq.degrees.len(),
        edges,
    })
}

/// How the simple-graph condition is enforced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SimpleMethod {
    /// Redraw sequence and pairing until simple. Exactly uniform.
    Rejection,
    /// Draw once, remove loops and parallel edges by degree-preserving
    /// switches, then run `sweeps * m` random double-edge swaps. Approximately
    /// uniform; used where the simple probability is too small for rejection.
    SwitchRepair { sweeps: usize },
    /// Rejection when the estimated acceptance rate fits the pairing budget,
    /// switch repair otherwise.
    Auto,
}

#[derive(Clone, Copy, Debug)]
pub struct MinDegreeSampler {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub method: SimpleMethod,
    pub sequence_budget: u64,
    pub pairing_budget: u64,
}

impl MinDegreeSampler {
    pub fn new(n: usize, m: usize, k: usize) -> Self {
        MinDegreeSampler {
            n,
            m,
            k,
            method: SimpleMethod::Rejection,
            sequence_budget: DEFAULT_SEQUENCE_BUDGET,
            pairing_budget: DEFAULT_PAIRING_BUDGET,
        }
    }

    pub fn method(mut self, method: SimpleMethod) -> Self {
        self.method = method;
        self
    }

    /// Estimated probability that a pairing is simple, `exp(−μ/2 − μ²/4)`
    /// with `μ = E[d(d−1)] / E[d]` under the calibrated degree law.
    pub fn simple_probability_estimate(&self) -> f64 {
        let mean = 2.0 * self.m as f64 / self.n as f64;
        let mu = if mean <= self.k as f64 {
            self.k.saturating_sub(1) as f64
        } else {
            match solve_lambda(self.k, mean) {
                // E[d(d−1)] = λ² f_{k−2} / f_k  and  E[d] = λ f_{k−1} / f_k
                Ok(l) => {
                    l * f_k_unchecked(self.k.saturating_sub(2), l)
                        / f_k_unchecked(self.k.saturating_sub(1), l)
                }
                Err(_) => return 0.0,
            }
        };
        (-mu / 2.0 - mu * mu / 4.0).exp()
    }

    /// The method `Auto` resolves to.
    pub fn resolved_method(&self) -> SimpleMethod {
        match self.method {
            SimpleMethod::Auto => {
                let expected = 1.0 / self.simple_probability_estimate();
                if expected * 20.0 <= self.pairing_budget as f64 {
                    SimpleMethod::Rejection
                } else {
                    SimpleMethod::SwitchRepair { sweeps: 10 }
                }
            }
            other => other,
        }
    }

    pub fn sample(&self, rng: &mut Rng) -> Result<Graph> {
        let (n, m, k) = (self.n, self.m, self.k);
        if 2 * m < k * n {
            return Err(Error::InvalidParameter(format!(
                "2m = {} < kn = {}",
                2 * m,
                k * n
            )));
        }
        if m > n * n.saturating_sub(1) / 2 {
            return Err(Error::InvalidParameter(format!(
                "{m} edges do not fit in a simple graph on {n} vertices"
            )));
        }
        match self.resolved_method() {
            SimpleMethod::Rejection | SimpleMethod::Auto => {
                for _ in 0..self.pairing_budget {
                    let seq = sample_degree_sequence(n, m, k, rng, self.sequence_budget)?;
                    if let Some(g) = pairing_to_multigraph(&seq, rng)?.to_simple() {
                        return Ok(g);
                    }
                }
                Err(Error::BudgetExhausted {
                    budget: self.pairing_budget,
                    what: format!("waiting for a simple pairing (n = {n}, m = {m}, k = {k})"),
                })
            }
            SimpleMethod::SwitchRepair { sweeps } => {
                for _ in 0..self.pairing_budget {
                    let seq = sample_degree_sequence(n, m, k, rng, self.sequence_budget)?;
                    let mg = pairing_to_multigraph(&seq, rng)?;
                    if let Some(g) = switch_repair(mg, sweeps, rng) {
                        return Ok(g);
                    }
                }
                Err(Error::BudgetExhausted {
                    budget: self.pairing_budget,
                    what: "repairing pairings by switches".into(),
                })
            }
        }
    }
}

/// Uniform simple graph with `n` vertices, `m` edges and minimum degree `k`,
/// by exact rejection with the default budgets.
pub fn sample_gnm_min_degree(n: usize, m: usize, k: usize, rng: &mut Rng) -> Result<Graph> {
    MinDegreeSampler::new(n, m, k).sample(rng)
}

/// Removes loops and parallel edges by double-edge switches, then mixes with
/// random simple-preserving swaps. `None` if repair stalls (tiny or dense inputs).
fn switch_repair(mg: MultiGraph, sweeps: usize, rng: &mut Rng) -> Option<Graph> {
    let m = mg.edges.len();
    if m < 2 {
        return mg.to_simple();
    }
    let mut edges: Vec<(usize, usize)> = mg.edges;
    let mut mult: std::collections::HashMap<Edge, usize> = std::collections::HashMap::new();
    for &(a, b) in &edges {
        *mult.entry(Edge::new(a, b)).or_default() += 1;
    }
    let bad = |e: (usize, usize), mult: &std::collections::HashMap<Edge, usize>| {
        e.0 == e.1 || mult[&Edge::new(e.0, e.1)] > 1
    };
    let mut stalls = 0usize;
    loop {
        let Some(i) = (0..m).find(|&i| bad(edges[i], &mult)) else {
            break;
        };
        let j = rng.random_range(0..m);
        if i == j {
            continue;
        }
        let (a, b) = edges[i];
        let (c, d) = edges[j];
        let (x, y) = if rng.random::<bool>() {
            ((a, c), (b, d))
        } else {
            ((a, d), (b, c))
        };
        let fresh = |p: (usize, usize), mult: &std::collections::HashMap<Edge, usize>| {
            p.0 != p.1 && !mult.contains_key(&Edge::new(p.0, p.1))
        };
        if fresh(x, &mult) && fresh(y, &mult) && Edge::new(x.0, x.1) != Edge::new(y.0, y.1) {
            for old in [(a, b), (c, d)] {
                let key = Edge::new(old.0, old.1);
                let slot = mult.get_mut(&key).unwrap();
                *slot -= 1;
                if *slot == 0 {
                    mult.remove(&key);
                }
            }
            for new in [x, y] {
                *mult.entry(Edge::new(new.0, new.1)).or_default() += 1;
            }
            edges[i] = x;
            edges[j] = y;
            stalls = 0;
        } else {
            stalls += 1;
            if stalls > 100 * m {
                return None;
            }
        }
    }
    let mut set: HashSet<Edge> = edges.iter().map(|&(a, b)| Edge::new(a, b)).collect();
    let mut list: Vec<Edge> = edges.iter().map(|&(a, b)| Edge::new(a, b)).collect();
    for _ in 0..sweeps * m {
        let i = rng.random_range(0..m);
        let j = rng.random_range(0..m);
        if i == j {
            continue;
        }
        let (Edge(a, b), Edge(c, d)) = (list[i], list[j]);
        let (x, y) = if rng.random::<bool>() {
            ((a, c), (b, d))
        } else {
            ((a, d), (b, c))
        };
        if x.0 == x.1 || y.0 == y.1 {
            continue;
        }
        let (ex, ey) = (Edge::new(x.0, x.1), Edge::new(y.0, y.1));
        if ex == ey || set.contains(&ex) || set.contains(&ey) {
            continue;
        }
        set.remove(&list[i]);
        set.remove(&list[j]);
        set.insert(ex);
        set.insert(ey);
        list[i] = ex;
        list[j] = ey;
    }
    Graph::from_edges(mg.n, list).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    fn series_oracle(k: usize, lambda: f64) -> f64 {
        // plain tail sum with many terms
        let mut term = 1.0;
        for i in 1..=k {
            term *= lambda / i as f64;
        }
        let mut sum = 0.0;
        for i in k + 1..k + 400 {
            sum += term;
            term *= lambda / i as f64;
        }
        sum
    }

    #[test]
    fn f_k_values() {
        assert!((f_k(0, 1.7).unwrap() - 1.7f64.exp()).abs() < 1e-12);
        assert!((f_k(1, 1.0).unwrap() - 1.718281828459045).abs() < 1e-14);
        assert!((f_k(3, 1.0).unwrap() - 0.21828182845904524).abs() < 1e-14);
        assert!(f_k(3, 0.0).is_err());
        assert!(f_k(3, -1.0).is_err());
    }

    #[test]
    fn f_k_relative_accuracy() {
        for k in 0..12 {
            for &lambda in &[1e-4, 0.01, 0.3, 1.0, 2.5, 7.0, 15.0, 33.0, 50.0] {
                let got = f_k(k, lambda).unwrap();
                let want = series_oracle(k, lambda);
                assert!(
                    ((got - want) / want).abs() <= 1e-12,
                    "k={k} λ={lambda}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn f_k_increasing() {
        for k in 0..6 {
            let mut prev = 0.0;
            for i in 1..200 {
                let v = f_k(k, i as f64 * 0.1).unwrap();
                assert!(v > prev);
                prev = v;
            }
        }
    }

    #[test]
    fn solve_lambda_plug_back() {
        let l = solve_lambda(3, 6.0).unwrap();
        let back = l * series_oracle(2, l) / series_oracle(3, l);
        assert!((back - 6.0).abs() <= 1e-9, "{back}");

        let l = solve_lambda(4, 20.0).unwrap();
        assert!(l > 19.0 && l < 20.0, "{l}");
        let back = l * series_oracle(3, l) / series_oracle(4, l);
        assert!((back - 20.0).abs() <= 1e-9 * 20.0);

        let l = solve_lambda(3, 3.0 + 1e-6).unwrap();
        assert!(l < 1e-3 && l > 0.0);
        assert!(solve_lambda(3, 3.0).is_err());
        assert!(solve_lambda(3, 2.0).is_err());
    }

    #[test]
    fn truncated_poisson_support_and_pmf() {
        let law = TruncatedPoisson::new(3, 2.0).unwrap();
        let total: f64 = (0..80).map(|t| law.pmf(t)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let direct = 2f64.powi(5) / 120.0 / f_k(3, 2.0).unwrap();
        assert!((law.pmf(5) - direct).abs() < 1e-14);
        let mut rng = seed::rng(1);
        for _ in 0..10_000 {
            assert!(law.sample(&mut rng) >= 3);
        }
    }

    #[test]
    fn small_rate_concentrates_on_k() {
        let law = TruncatedPoisson::new(3, 0.01).unwrap();
        let mut rng = seed::rng(2);
        let hits = (0..100_000).filter(|_| law.sample(&mut rng) == 3).count();
        assert!(hits as f64 >= 0.997 * 100_000.0, "{hits}");
    }

    #[test]
    fn degree_sequences() {
        let mut rng = seed::rng(3);
        let s = sample_degree_sequence(1, 2, 3, &mut rng, 1000).unwrap();
        assert_eq!(s.degrees, vec![4]);
        for _ in 0..50 {
            let s = sample_degree_sequence(40, 90, 3, &mut rng, 1_000_000).unwrap();
            assert_eq!(s.total, 180);
            assert!(s.degrees.iter().all(|&d| d >= 3));
        }
        assert_eq!(
            sample_degree_sequence(4, 6, 3, &mut rng, 1).unwrap().degrees,
            vec![3; 4]
        );
        assert!(sample_degree_sequence(10, 14, 3, &mut rng, 10).is_err());
    }

    #[test]
    fn forced_pairings() {
        let mut rng = seed::rng(4);
        let mg = pairing_to_multigraph(&DegreeSequence::new(vec![1, 1]), &mut rng).unwrap();
        assert_eq!(Edge::new(mg.edges[0].0, mg.edges[0].1), Edge(0, 1));
        let mg = pairing_to_multigraph(&DegreeSequence::new(vec![2, 0]), &mut rng).unwrap();
        assert_eq!(mg.edges, vec![(0, 0)]);
        assert!(pairing_to_multigraph(&DegreeSequence::new(vec![2, 1]), &mut rng).is_err());
    }

    #[test]
    fn two_two_pairing_frequencies() {
        // 3 pairings of 4 points: 2 give a double edge, 1 gives two loops
        let mut rng = seed::rng(5);
        let seq = DegreeSequence::new(vec![2, 2]);
        let trials = 100_000;
        let double = (0..trials)
            .filter(|_| pairing_to_multigraph(&seq, &mut rng).unwrap().loop_count() == 0)
            .count();
        let p = double as f64 / trials as f64;
        assert!((p - 2.0 / 3.0).abs() < 0.01, "{p}");
    }

    #[test]
    fn k4_is_forced() {
        let mut rng = seed::rng(6);
        for _ in 0..20 {
            assert_eq!(sample_gnm_min_degree(4, 6, 3, &mut rng).unwrap(), Graph::complete(4));
        }
    }

    #[test]
    fn samples_satisfy_postconditions() {
        let mut rng = seed::rng(7);
        for _ in 0..20 {
            let g = sample_gnm_min_degree(60, 120, 3, &mut rng).unwrap();
            assert_eq!(g.m(), 120);
            assert!(g.min_degree() >= 3);
        }
        let g = MinDegreeSampler::new(2000, 6000, 4)
            .method(SimpleMethod::SwitchRepair { sweeps: 5 })
            .sample(&mut rng)
            .unwrap();
        assert_eq!(g.m(), 6000);
        assert!(g.min_degree() >= 4);
    }

    #[test]
    fn auto_picks_switches_when_rejection_hopeless() {
        let s = MinDegreeSampler::new(4000, 12000, 4).method(SimpleMethod::Auto);
        assert!(s.simple_probability_estimate() < 1e-3);
        assert!(matches!(s.resolved_method(), SimpleMethod::SwitchRepair { .. }));
        let s = MinDegreeSampler::new(6, 9, 3).method(SimpleMethod::Auto);
        assert_eq!(s.resolved_method(), SimpleMethod::Rejection);
    }

    #[test]
    fn seed_determinism() {
        let a = sample_gnm_min_degree(50, 100, 3, &mut seed::rng(9)).unwrap();
        let b = sample_gnm_min_degree(50, 100, 3, &mut seed::rng(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut rng = seed::rng(1);
        assert!(sample_gnm_min_degree(10, 10, 3, &mut rng).is_err());
        assert!(sample_gnm_min_degree(4, 7, 3, &mut rng).is_err());
    }
}
