//! Seeded trials, run in parallel and merged by trial id.

use std::time::Instant;

use hamcore::packer::{pack, pack_process, Checkpoint, CheckpointResult, Outcome, PackerConfig};
use hamcore::random_models::{MinDegreeSampler, SimpleMethod};
use hamcore::verifier::validate_certificate;
use hamcore::{seed, Graph, PackingCertificate};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::Model;

#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub model: Model,
    pub n: usize,
    /// Edge count for the min-degree model.
    pub m: usize,
    pub packer: PackerConfig,
    pub trials: usize,
    pub seed: u64,
    pub checkpoints: Vec<Checkpoint>,
    pub parallel: usize,
    pub timing: bool,
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub outcome: Outcome,
    pub cycles: usize,
    pub tail_size: usize,
    pub reservoir_used: usize,
    pub ms: Option<u64>,
}

/// Per-trial detail kept out of the CSV.
#[derive(Clone, Debug)]
pub struct TrialDetail {
    pub record: TrialRecord,
    pub seed: u64,
    pub certificate: Option<PackingCertificate>,
    pub valid: Option<bool>,
    pub core_size: Option<usize>,
    pub t: Option<usize>,
    pub error: Option<String>,
}

fn record_for(
    trial: usize,
    seed: u64,
    g: &Graph,
    res: hamcore::Result<PackingCertificate>,
    start: Instant,
    timing: bool,
) -> TrialDetail {
    let ms = timing.then(|| start.elapsed().as_millis() as u64);
    match res {
        Ok(cert) => {
            let valid = validate_certificate(g, &cert, false).pass;
            let outcome = if !valid {
                Outcome::Failure
            } else {
                cert.outcome()
            };
            TrialDetail {
                record: TrialRecord {
                    trial,
                    outcome,
                    cycles: cert.cycles.len(),
                    tail_size: cert.tail_edges.len(),
                    reservoir_used: cert.audit.reservoir_used,
                    ms,
                },
                seed,
                certificate: Some(cert),
                valid: Some(valid),
                core_size: None,
                t: None,
                error: None,
            }
        }
        Err(e) => TrialDetail {
            record: TrialRecord {
                trial,
                outcome: Outcome::Failure,
                cycles: 0,
                tail_size: 0,
                reservoir_used: 0,
                ms,
            },
            seed,
            certificate: None,
            valid: None,
            core_size: None,
            t: None,
            error: Some(e.to_string()),
        },
    }
}

fn pool(parallel: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(parallel.max(1))
        .build()
        .expect("thread pool")
}

/// Trial `i` samples its graph and packs it from `sub_seed(seed, i)`.
pub fn run_gnm_trials(spec: &ExperimentSpec) -> Vec<TrialDetail> {
    let run = |i: usize| {
        let s = seed::sub_seed(spec.seed, i as u64);
        let start = Instant::now();
        let mut rng = seed::rng(s);
        let sampler = MinDegreeSampler::new(spec.n, spec.m, spec.packer.k).method(SimpleMethod::Auto);
        match sampler.sample(&mut rng) {
            Ok(g) => {
                let mut cfg = spec.packer.clone();
                cfg.seed = s;
                let res = pack(&g, &cfg, &mut rng);
                record_for(i, s, &g, res, start, spec.timing)
            }
            Err(e) => record_for(i, s, &Graph::empty(0), Err(e), start, spec.timing),
        }
    };
    let mut out: Vec<TrialDetail> = pool(spec.parallel).install(|| (0..spec.trials).into_par_iter().map(run).collect());
    out.sort_by_key(|d| d.record.trial);
    out
}

/// One list of trials per checkpoint.
pub fn run_process_trials(spec: &ExperimentSpec) -> Vec<Vec<TrialDetail>> {
    let run = |i: usize| -> Vec<TrialDetail> {
        let s = seed::sub_seed(spec.seed, i as u64);
        let start = Instant::now();
        let mut cfg = spec.packer.clone();
        cfg.seed = s;
        cfg.c = None;
        match pack_process(spec.n, &cfg, &spec.checkpoints, None, &mut seed::rng(s)) {
            Ok(cps) => cps
                .into_iter()
                .map(|cp| {
                    let core = cp.core.expect("core kept");
                    let mut d = match cp.result {
                        CheckpointResult::Packed { certificate } => {
                            let local = certificate.relabel(&inverse(&core.core_vertices, spec.n), core.len());
                            let mut d = record_for(i, s, &core.core_graph, Ok(local), start, spec.timing);
                            d.certificate = Some(certificate);
                            d
                        }
                        CheckpointResult::EmptyCore => {
                            record_for(i, s, &core.core_graph, Err(hamcore::Error::Precondition("empty core".into())), start, spec.timing)
                        }
                        CheckpointResult::Failed { error } => {
                            record_for(i, s, &core.core_graph, Err(hamcore::Error::Decomposition(error)), start, spec.timing)
                        }
                    };
                    d.core_size = Some(cp.core_size);
                    d.t = Some(cp.t);
                    d
                })
                .collect(),
            Err(e) => spec
                .checkpoints
                .iter()
                .map(|_| record_for(i, s, &Graph::empty(0), Err(hamcore::Error::InvalidParameter(e.to_string())), start, spec.timing))
                .collect(),
        }
    };
    let per_trial: Vec<Vec<TrialDetail>> = pool(spec.parallel).install(|| (0..spec.trials).into_par_iter().map(run).collect());
    (0..spec.checkpoints.len())
        .map(|c| per_trial.iter().map(|t| t[c].clone()).collect())
        .collect()
}

/// Original label -> core label, for labels in the core.
fn inverse(core_vertices: &[usize], n: usize) -> Vec<usize> {
    let mut inv = vec![usize::MAX; n];
    for (i, &v) in core_vertices.iter().enumerate() {
        inv[v] = i;
    }
    inv
}

pub fn to_csv(records: &[TrialRecord]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for r in records {
        w.serialize(r).expect("csv row");
    }
    if records.is_empty() {
        w.write_record(["trial", "outcome", "cycles", "tail_size", "reservoir_used", "ms"]).expect("csv header");
    }
    w.into_inner().expect("csv buffer")
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Percentiles {
    pub p50: u64,
    pub p90: u64,
    pub p99: u64,
    pub max: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub trials: usize,
    pub successes: usize,
    pub partial: usize,
    pub failures: usize,
    pub success_rate: f64,
    pub ms: Option<Percentiles>,
    pub mean_cycles: f64,
    pub mean_tail_size: f64,
    pub mean_reservoir_used: f64,
}

/// Nearest-rank percentile of sorted values.
fn percentile(sorted: &[u64], p: f64) -> u64 {
    let rank = ((p / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

pub fn summarize(records: &[TrialRecord]) -> Summary {
    let count = |o| records.iter().filter(|r| r.outcome == o).count();
    let t = records.len();
    let mut ms: Vec<u64> = records.iter().filter_map(|r| r.ms).collect();
    ms.sort_unstable();
    let mean = |f: fn(&TrialRecord) -> usize| if t == 0 { 0.0 } else { records.iter().map(f).sum::<usize>() as f64 / t as f64 };
    Summary {
        trials: t,
        successes: count(Outcome::Success),
        partial: count(Outcome::Partial),
        failures: count(Outcome::Failure),
        success_rate: if t == 0 { 0.0 } else { count(Outcome::Success) as f64 / t as f64 },
        ms: (!ms.is_empty() && ms.len() == t).then(|| Percentiles {
            p50: percentile(&ms, 50.0),
            p90: percentile(&ms, 90.0),
            p99: percentile(&ms, 99.0),
            max: *ms.last().unwrap(),
        }),
        mean_cycles: mean(|r| r.cycles),
        mean_tail_size: mean(|r| r.tail_size),
        mean_reservoir_used: mean(|r| r.reservoir_used),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(trial: usize, outcome: Outcome, ms: Option<u64>) -> TrialRecord {
        TrialRecord {
            trial,
            outcome,
            cycles: 1,
            tail_size: 10,
            reservoir_used: trial,
            ms,
        }
    }

    #[test]
    fn csv_header_and_rows() {
        let text = String::from_utf8(to_csv(&[rec(0, Outcome::Success, Some(12)), rec(1, Outcome::Partial, None)])).unwrap();
        assert_eq!(
            text,
            "trial,outcome,cycles,tail_size,reservoir_used,ms\n0,success,1,10,0,12\n1,partial,1,10,1,\n"
        );
        assert!(String::from_utf8(to_csv(&[])).unwrap().starts_with("trial,outcome"));
    }

    #[test]
    fn summary_statistics() {
        let rs: Vec<TrialRecord> = (0..10)
            .map(|i| rec(i, if i < 9 { Outcome::Success } else { Outcome::Failure }, Some(10 * (i as u64 + 1))))
            .collect();
        let s = summarize(&rs);
        assert_eq!(s.success_rate, 0.9);
        assert_eq!(s.ms, Some(Percentiles { p50: 50, p90: 90, p99: 100, max: 100 }));
        assert_eq!(s.mean_reservoir_used, 4.5);
        assert!(summarize(&[rec(0, Outcome::Success, None)]).ms.is_none());
    }
}
