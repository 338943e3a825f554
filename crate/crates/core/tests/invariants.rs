use std::collections::HashSet;

use hamcore::matching::{max_matching, max_matching_from, max_two_matching, max_two_matching_from, peel_matchings, PeelConfig};
use hamcore::packer::{canonical_cycle, pack, Outcome, PackerConfig};
use hamcore::posa::{rotate, vdpc_from_two_matching};
use hamcore::random_models::{MinDegreeSampler, SimpleMethod, TruncatedPoisson};
use hamcore::verifier::validate_certificate;
use hamcore::{k_core, seed, Edge, Graph, Matching, PackingCertificate};
use proptest::prelude::*;

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..=3 * n).prop_map(move |pairs| {
            Graph::from_edges_dedup(n, pairs.into_iter().filter(|(a, b)| a != b).map(|(a, b)| Edge::new(a, b))).unwrap()
        })
    })
}

fn bounded_degree(g: &Graph, b: usize) -> Graph {
    let mut deg = vec![0; g.n()];
    let kept: Vec<Edge> = g
        .edges()
        .iter()
        .copied()
        .filter(|e| {
            let ok = deg[e.0] < b && deg[e.1] < b;
            if ok {
                deg[e.0] += 1;
                deg[e.1] += 1;
            }
            ok
        })
        .collect();
    Graph::from_edges(g.n(), kept).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn edge_list_and_json_round_trip(g in graph(30)) {
        prop_assert_eq!(&Graph::parse_edge_list(&g.to_edge_list()).unwrap(), &g);
        prop_assert_eq!(&Graph::from_json(&g.to_json()).unwrap(), &g);
        prop_assert!(g.check_invariants());
    }

    #[test]
    fn k_core_is_the_maximal_min_degree_subgraph(g in graph(30), k in 1usize..5) {
        let core = k_core(&g, k);
        prop_assert!(core.is_empty() || core.core_graph.min_degree() >= k);
        prop_assert_eq!(core.len() + core.peel_order.len(), g.n());
        let again = k_core(&core.core_graph, k);
        prop_assert_eq!(again.len(), core.len());
        let inside: HashSet<usize> = core.core_vertices.iter().copied().collect();
        for e in core.original_edges() {
            prop_assert!(g.contains_edge(e) && inside.contains(&e.0) && inside.contains(&e.1));
        }
        prop_assert_eq!(core.original_edges().count(), core.core_graph.m());
    }

    #[test]
    fn matching_size_does_not_depend_on_the_start(g in graph(24), skip in 0usize..4) {
        let m = max_matching(&g);
        prop_assert!(m.is_matching_of(&g));
        let mut used = vec![false; g.n()];
        let start: Vec<Edge> = g.edges().iter().copied().skip(skip).filter(|e| {
            let ok = !used[e.0] && !used[e.1];
            if ok { used[e.0] = true; used[e.1] = true; }
            ok
        }).collect();
        let from = max_matching_from(&g, &Matching::from_edges(g.n(), start).unwrap()).unwrap();
        prop_assert_eq!(from.size(), m.size());
    }

    #[test]
    fn two_matching_from_a_greedy_start_is_maximum(g in graph(20)) {
        let m = max_two_matching(&g);
        prop_assert!(m.is_two_matching_of(&g));
        let greedy = bounded_degree(&g, 2);
        let start = hamcore::TwoMatching::from_edges(g.n(), greedy.edges().iter().copied()).unwrap();
        let from = max_two_matching_from(&g, &start).unwrap();
        prop_assert!(from.is_two_matching_of(&g));
        prop_assert_eq!(from.size(), m.size());
    }

    #[test]
    fn peeled_layers_are_disjoint_matchings(g in graph(30), k in 2usize..6) {
        let h = bounded_degree(&g, k - 1);
        let res = peel_matchings(&h, k, &PeelConfig::new(k - 1, 1.0).unwrap()).unwrap();
        prop_assert_eq!(res.layers.len(), k - 1);
        let mut seen = HashSet::new();
        for l in &res.layers {
            prop_assert!(l.is_matching_of(&h));
            for &e in l.edges() {
                prop_assert!(seen.insert(e));
            }
        }
    }

    #[test]
    fn path_cover_spans_every_vertex(g in graph(30)) {
        let m = max_two_matching(&g);
        let pc = vdpc_from_two_matching(&m);
        let mut all: Vec<usize> = pc.paths().iter().flatten().copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..g.n()).collect::<Vec<_>>());
        for e in pc.real_edges() {
            prop_assert!(m.contains(e));
        }
        prop_assert_eq!(pc.real_edges().len() + pc.paths().len(), g.n());
    }

    #[test]
    fn rotation_keeps_vertices_and_fixed_end(len in 4usize..60, pick in any::<prop::sample::Index>(), shuffle in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut path: Vec<usize> = (0..len).collect();
        path.shuffle(&mut seed::rng(shuffle));
        let i = 1 + pick.index(len - 3);
        let r = rotate(&path, path[0], Edge::new(path[len - 1], path[i])).unwrap();
        prop_assert_eq!(r.path[0], path[0]);
        prop_assert_eq!(r.pivot, path[i]);
        prop_assert_eq!(r.deleted, Edge::new(path[i], path[i + 1]));
        let mut a = r.path.clone();
        a.sort_unstable();
        prop_assert_eq!(a, (0..len).collect::<Vec<_>>());
    }

    #[test]
    fn canonical_cycle_is_rotation_and_reflection_invariant(len in 3usize..30, shift in 0usize..30, rev in any::<bool>(), s in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut c: Vec<usize> = (0..len).collect();
        c.shuffle(&mut seed::rng(s));
        let canon = canonical_cycle(&c);
        let mut other = c.clone();
        other.rotate_left(shift % len);
        if rev {
            other.reverse();
        }
        prop_assert_eq!(&canonical_cycle(&other), &canon);
        prop_assert_eq!(canon[0], 0);
        prop_assert!(canon[1] < canon[len - 1]);
    }

    #[test]
    fn truncated_poisson_pmf_sums_to_one(k in 0usize..8, lambda in 0.05f64..12.0) {
        let tp = TruncatedPoisson::new(k, lambda).unwrap();
        let total: f64 = (k..k + 200).map(|t| tp.pmf(t)).sum();
        prop_assert!((total - 1.0).abs() < 1e-9, "{}", total);
        let mean: f64 = (k..k + 200).map(|t| t as f64 * tp.pmf(t)).sum();
        prop_assert!((mean - tp.mean()).abs() < 1e-8 * mean.max(1.0));
        let mut rng = seed::rng(k as u64);
        for _ in 0..50 {
            prop_assert!(tp.sample(&mut rng) >= k);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn packings_validate_and_round_trip(n in 40usize..160, k in 4usize..7, s in any::<u64>()) {
        let m = (k as f64 * 0.6 * n as f64).round() as usize + n;
        let g = MinDegreeSampler::new(n, m, k).method(SimpleMethod::Auto).sample(&mut seed::rng(s)).unwrap();
        prop_assert!(g.min_degree() >= k && g.m() == m);
        let cert = match pack(&g, &PackerConfig::new(k), &mut seed::rng(s ^ 1)) {
            Ok(c) => c,
            Err(hamcore::Error::Decomposition(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let v = validate_certificate(&g, &cert, false);
        prop_assert!(v.pass, "{}", v.to_json());
        if cert.outcome() == Outcome::Success {
            prop_assert_eq!(cert.cycles.len(), PackerConfig::new(k).cycle_count());
        }
        for c in &cert.cycles {
            prop_assert_eq!(&canonical_cycle(c), c);
        }
        let back = PackingCertificate::from_json(&cert.to_json()).unwrap();
        prop_assert_eq!(back.cycles, cert.cycles.clone());
        prop_assert_eq!(back.tail_edges, cert.tail_edges.clone());
    }
}
