//! Command implementations behind the `hamcore` binary.
//!
//! Exit codes: 0 success, 1 bad input or a violated property, 2 a failed
//! precondition, 3 a partial or inconclusive result.

pub mod args;
pub mod experiment;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use hamcore::packer::{pack, Checkpoint, PackerConfig};
use hamcore::process::ProcessStream;
use hamcore::random_models::{MinDegreeSampler, SimpleMethod};
use hamcore::verifier::{
    check_density_seeded, check_incidence, check_neighborhood_expansion, validate_certificate, DensityMode,
    ExpansionParams, Verdict,
};
use hamcore::{seed, Error, Graph, PackingCertificate};
use serde_json::json;

use args::{Check, ExperimentArgs, GenerateArgs, Model, PackArgs, PackFlags, VerifyArgs};
use experiment::{run_gnm_trials, run_process_trials, summarize, to_csv, ExperimentSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    Violation = 1,
    Precondition = 2,
    Partial = 3,
}

#[derive(Debug)]
pub struct CliError {
    pub status: Status,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Precondition(_) => Status::Precondition,
            Error::Decomposition(_) | Error::BudgetExhausted { .. } => Status::Partial,
            _ => Status::Violation,
        };
        CliError {
            status,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e).into()
    }
}

fn input_error(msg: impl Into<String>) -> CliError {
    CliError {
        status: Status::Violation,
        message: msg.into(),
    }
}

pub type CliResult = Result<Status, CliError>;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

pub fn read_graph(path: &Path) -> Result<Graph, CliError> {
    Graph::parse_any(&read(path)?).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn write_out(path: Option<&PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn packer_config(flags: &PackFlags, seed: u64) -> Result<PackerConfig, CliError> {
    let mut cfg = PackerConfig::new(flags.k);
    cfg.c = flags.c;
    cfg.seed = seed;
    if let Some(f) = flags.reservoir_fraction {
        cfg.reservoir_fraction = f;
    }
    if let Some(d) = flags.depth_cap {
        cfg.depth_cap = d;
    }
    if let Some(b) = flags.beta {
        cfg.beta = b;
    }
    if let Some(g) = flags.gamma {
        cfg.gamma = g;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// `n m k seed` goes to `stdout` when the graph is written to a file, to
/// stderr otherwise.
pub fn cmd_generate(a: &GenerateArgs, stdout: &mut dyn Write) -> CliResult {
    let mut rng = seed::rng(a.seed);
    let (g, k) = match a.model {
        Model::GnmMindeg => {
            let k = a.k.ok_or_else(|| input_error("--k is required for gnm-mindeg"))?;
            let m = match (a.m, a.c) {
                (Some(m), _) => m,
                (None, Some(c)) => (c * a.n as f64).round() as usize,
                (None, None) => return Err(input_error("--m or --c is required")),
            };
            let g = MinDegreeSampler::new(a.n, m, k).method(SimpleMethod::Auto).sample(&mut rng)?;
            (g, k)
        }
        Model::Process => {
            let mut stream = ProcessStream::new(a.n, a.seed);
            match (a.until_tau_k, a.t) {
                (Some(k), _) => {
                    let (tau, _) = stream.tau_k(k);
                    (stream.graph_at(tau), k)
                }
                (None, Some(t)) => {
                    if t > stream.total_pairs() {
                        return Err(input_error(format!("t = {t} exceeds the {} vertex pairs", stream.total_pairs())));
                    }
                    (stream.graph_at(t), a.k.unwrap_or(0))
                }
                (None, None) => return Err(input_error("--until-tau-k or --t is required for the process model")),
            }
        }
    };
    let text = if a.json {
        serde_json::to_string(&g.to_json()).expect("graph serializes")
    } else {
        g.to_edge_list()
    };
    write_out(a.out.as_ref(), &text, stdout)?;
    let line = format!("{} {} {} {}\n", g.n(), g.m(), k, a.seed);
    if a.out.is_some() {
        stdout.write_all(line.as_bytes())?;
    } else {
        eprint!("{line}");
    }
    Ok(Status::Success)
}

/// Writes the certificate, then prints the validation verdict.
pub fn cmd_pack(a: &PackArgs, stdout: &mut dyn Write) -> CliResult {
    let g = read_graph(&a.input)?;
    let cfg = packer_config(&a.flags, a.seed)?;
    let cert = pack(&g, &cfg, &mut seed::rng(a.seed))?;
    write_out(a.out.as_ref(), &(cert.to_json() + "\n"), stdout)?;
    let verdict = validate_certificate(&g, &cert, false);
    writeln!(stdout, "{}", verdict.to_json())?;
    Ok(if !verdict.pass {
        Status::Violation
    } else if !cert.is_complete() {
        Status::Partial
    } else {
        Status::Success
    })
}

fn summary_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map_or_else(|| "experiment".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}.summary.json"))
}

fn checkpoint_path(out: &Path, i: usize) -> PathBuf {
    let stem = out.file_stem().map_or_else(|| "experiment".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}.cp{i}.csv"))
}

pub fn experiment_spec(a: &ExperimentArgs) -> Result<ExperimentSpec, CliError> {
    if a.trials == 0 {
        return Err(input_error("--trials must be at least 1"));
    }
    let packer = packer_config(&a.flags, a.seed)?;
    let m = match (a.model, a.m, a.flags.c) {
        (Model::Process, _, _) => 0,
        (_, Some(m), _) => m,
        (_, None, Some(c)) => (c * a.n as f64).round() as usize,
        _ => return Err(input_error("--m or --c is required")),
    };
    let checkpoints = match &a.checkpoints {
        Some(s) => s.split(',').map(Checkpoint::parse).collect::<Result<Vec<_>, _>>()?,
        None => Checkpoint::defaults(),
    };
    Ok(ExperimentSpec {
        model: a.model,
        n: a.n,
        m,
        packer,
        trials: a.trials,
        seed: a.seed,
        checkpoints,
        parallel: a.parallel,
        timing: !a.no_timing,
    })
}

/// One CSV row per trial; with the process model one CSV per checkpoint
/// (`<stem>.cp<i>.csv`, or `--out` itself for a single checkpoint). The
/// summary JSON is printed and written to `<stem>.summary.json`.
pub fn cmd_experiment(a: &ExperimentArgs, stdout: &mut dyn Write) -> CliResult {
    let spec = experiment_spec(a)?;
    let params = json!({
        "model": model_name(spec.model),
        "n": spec.n,
        "m": spec.m,
        "k": spec.packer.k,
        "c": spec.packer.c,
        "trials": spec.trials,
        "seed": spec.seed,
    });
    let (summary, all_success) = match spec.model {
        Model::GnmMindeg => {
            let details = run_gnm_trials(&spec);
            let records: Vec<_> = details.into_iter().map(|d| d.record).collect();
            fs::write(&a.out, to_csv(&records))?;
            let s = summarize(&records);
            let ok = s.successes == s.trials;
            (json!({ "params": params, "summary": s }), ok)
        }
        Model::Process => {
            let per_cp = run_process_trials(&spec);
            let mut entries = Vec::new();
            let mut ok = true;
            for (i, details) in per_cp.iter().enumerate() {
                let records: Vec<_> = details.iter().map(|d| d.record.clone()).collect();
                let path = if per_cp.len() == 1 { a.out.clone() } else { checkpoint_path(&a.out, i) };
                fs::write(&path, to_csv(&records))?;
                let s = summarize(&records);
                ok &= s.successes == s.trials;
                let core: Vec<usize> = details.iter().filter_map(|d| d.core_size).collect();
                entries.push(json!({
                    "checkpoint": format!("{:?}", spec.checkpoints[i]),
                    "csv": path.display().to_string(),
                    "core_sizes": core,
                    "summary": s,
                }));
            }
            (json!({ "params": params, "checkpoints": entries }), ok)
        }
    };
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    fs::write(summary_path(&a.out), format!("{text}\n"))?;
    writeln!(stdout, "{text}")?;
    Ok(if all_success { Status::Success } else { Status::Partial })
}

fn model_name(m: Model) -> String {
    use clap::ValueEnum;
    m.to_possible_value().map_or_else(String::new, |v| v.get_name().to_string())
}

fn status_of(v: &Verdict) -> Status {
    if v.witness.is_some() {
        Status::Violation
    } else if !v.conclusive && !v.pass {
        Status::Partial
    } else {
        Status::Success
    }
}

/// Prints a verdict JSON line; a violation prints its witness as part of it.
pub fn cmd_verify(a: &VerifyArgs, stdout: &mut dyn Write) -> CliResult {
    let g = read_graph(&a.graph)?;
    let check = match (a.check, &a.certificate) {
        (Some(c), _) => c,
        (None, Some(_)) => Check::Certificate,
        (None, None) => return Err(input_error("give --certificate or --check")),
    };
    let verdict = match check {
        Check::Certificate => {
            let path = a.certificate.as_ref().ok_or_else(|| input_error("--certificate is required"))?;
            let cert = PackingCertificate::from_json(&read(path)?)
                .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
            validate_certificate(&g, &cert, a.standalone)
        }
        Check::Density => {
            let gamma = a.gamma.ok_or_else(|| input_error("--gamma is required"))?;
            let mode = if a.sampled || g.n() > hamcore::verifier::EXACT_SUBSET_LIMIT {
                DensityMode::Sampled
            } else {
                DensityMode::Exact
            };
            check_density_seeded(&g, gamma, mode, 256, a.seed)?
        }
        Check::Incidence => {
            let gamma = a.gamma.ok_or_else(|| input_error("--gamma is required"))?;
            let beta = a.beta.ok_or_else(|| input_error("--beta is required"))?;
            check_incidence(&g, beta, gamma)
        }
        Check::Expansion => {
            let k = a.k.ok_or_else(|| input_error("--k is required"))?;
            check_neighborhood_expansion(&g, k)
        }
        Check::Params => {
            let k = a.k.ok_or_else(|| input_error("--k is required"))?;
            let c = a.c.unwrap_or(g.m() as f64 / g.n().max(1) as f64);
            let p = match (a.beta, a.gamma) {
                (Some(b), Some(gm)) => ExpansionParams::new(k, c, b, gm),
                _ => ExpansionParams::default_for(k, c),
            };
            let (pass, params) = match p {
                Ok(p) => (true, json!({ "params": p, "lhs": p.lhs() })),
                Err(e) => (false, json!({ "error": e.to_string(), "k": k, "c": c })),
            };
            writeln!(stdout, "{}", json!({ "property": "expansion_params", "mode": "exact", "pass": pass, "params": params }))?;
            return Ok(if pass { Status::Success } else { Status::Violation });
        }
    };
    writeln!(stdout, "{}", verdict.to_json())?;
    Ok(status_of(&verdict))
}

/// Routes `HAMCORE_LOG` (env_logger filter syntax) to stderr. Rotation trace
/// records (`hamcore::trace=debug`) are printed as bare JSON lines.
pub fn init_logging() {
    use std::io::Write as _;
    let env = env_logger::Env::new().filter_or("HAMCORE_LOG", "warn");
    let _ = env_logger::Builder::from_env(env)
        .format(|buf, rec| {
            if rec.target() == "hamcore::trace" {
                writeln!(buf, "{}", rec.args())
            } else {
                writeln!(buf, "[{} {}] {}", rec.level(), rec.target(), rec.args())
            }
        })
        .try_init();
}
