//! Desk-scale statistical runs of the packing pipeline.

use hamcore::matching::max_two_matching_from;
use hamcore::packer::{decompose, PackerConfig};
use hamcore::process::ProcessStream;
use hamcore::posa::{vdpc_from_two_matching, ClosureConfig, ClosureEngine, ClosureSchedule, PackStepResult};
use hamcore::random_models::{MinDegreeSampler, SimpleMethod};
use hamcore::verifier::check_core_size;
use hamcore::{k_core, seed, Graph, TwoMatching};
use rand::seq::SliceRandom;

fn sample(n: usize, c: f64, k: usize, s: u64) -> Graph {
    MinDegreeSampler::new(n, (c * n as f64).round() as usize, k)
        .method(SimpleMethod::Auto)
        .sample(&mut seed::rng(s))
        .unwrap()
}

#[test]
fn decomposition_layers_are_nearly_perfect() {
    let n = 2000;
    let mut good = 0;
    for i in 0..50 {
        let s = seed::sub_seed(11, i);
        let g = sample(n, 3.0, 4, s);
        let d = decompose(&g, &PackerConfig::new(4), &mut seed::rng(s)).unwrap();
        if d.layers.iter().all(|l| l.size() as f64 >= 0.45 * n as f64) {
            good += 1;
        }
    }
    assert!(good >= 48, "{good}/50 decompositions had all layers >= 0.45n");
}

#[test]
fn closure_turns_a_two_matching_into_a_hamilton_cycle() {
    let n = 2000;
    let mut closed = 0;
    for i in 0..30 {
        let s = seed::sub_seed(22, i);
        let g = sample(n, 3.0, 4, s);
        let mut rng = seed::rng(s);
        let mut edges = g.edges().to_vec();
        edges.shuffle(&mut rng);
        let split = edges.len() - n / 4;
        let host = Graph::from_edges(n, edges[..split].iter().copied()).unwrap();
        let reservoir = edges[split..].to_vec();
        let target = max_two_matching_from(&host, &TwoMatching::empty(n)).unwrap();
        let pc = vdpc_from_two_matching(&target);
        let mut sched = ClosureSchedule::new(n, pc.size(), (target.size() - pc.m_intersection(&target)) as f64);
        let res = ClosureEngine::new(ClosureConfig::default()).run(&host, pc, &target, &reservoir, &mut sched);
        if let PackStepResult::Cycle { cycle, .. } = res {
            assert_eq!(cycle.len(), n);
            closed += 1;
        }
    }
    assert!(closed >= 27, "{closed}/30 closed");
}

#[test]
fn core_size_report() {
    let n = 5000;
    let g = ProcessStream::new(n, 33).graph_at(20 * n);
    let rows = check_core_size(n, &[(20 * n, k_core(&g, 3).len())]);
    assert_eq!(rows.len(), 1);
    eprintln!("{}", serde_json::to_string(&rows).unwrap());
}
