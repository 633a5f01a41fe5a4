//! Multi-trial execution and artifact persistence.
//!
//! Layout under the output directory:
//!
//! ```text
//! <label>/trial_<i>.csv     one per trial (diverged trials included)
//! <label>_aggregate.csv     surviving trials only
//! manifest.json             config hash, seeds, epochs, checksums
//! ```

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use perfdfo_core::diag::estimator_moments;
use perfdfo_core::estimator::EstimatorKind;
use perfdfo_core::{run, Rng, Schedule};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::aggregate::{aggregate, AggregateCurve};
use crate::config::{DiagConfig, ExperimentConfig, ResolvedAlgo};
use crate::error::{HarnessError, Result};
use crate::output::{aggregate_csv, moments_csv, trace_csv, trace_rows, MomentRow, TraceRow};

/// Outcome, retained rows, CSV path and digest of one trial.
type TrialArtifacts = (TrialOutcome, Vec<TraceRow>, PathBuf, String);

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| HarnessError::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| HarnessError::io(path, e))
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub seed: u64,
    pub diverged_at: Option<usize>,
    pub total_samples: u64,
    pub final_theta: Vec<f64>,
    pub output_index: usize,
}

#[derive(Debug, Clone)]
pub struct AlgoOutcome {
    pub label: String,
    pub algorithm: String,
    pub epochs: usize,
    pub trials: Vec<TrialOutcome>,
    /// `None` when every trial diverged.
    pub curve: Option<AggregateCurve>,
    pub trace_files: Vec<PathBuf>,
    pub aggregate_file: Option<PathBuf>,
}

impl AlgoOutcome {
    pub fn diverged(&self) -> usize {
        self.trials.iter().filter(|t| t.diverged_at.is_some()).count()
    }

    pub fn completed(&self) -> usize {
        self.trials.len() - self.diverged()
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub manifest: PathBuf,
    pub algorithms: Vec<AlgoOutcome>,
}

impl RunSummary {
    pub fn algorithm(&self, label: &str) -> Option<&AlgoOutcome> {
        self.algorithms.iter().find(|a| a.label == label)
    }
}

#[derive(Serialize)]
struct ScheduleRecord {
    preset: &'static str,
    alpha: f64,
    beta: f64,
    eta0: f64,
    delta0: f64,
    tau0: f64,
    lambda: f64,
    rho: f64,
}

impl From<&Schedule> for ScheduleRecord {
    fn from(s: &Schedule) -> Self {
        Self {
            preset: s.preset.name(),
            alpha: s.alpha,
            beta: s.beta,
            eta0: s.eta0,
            delta0: s.delta0,
            tau0: s.tau0,
            lambda: s.lambda,
            rho: s.rho,
        }
    }
}

#[derive(Serialize)]
struct AlgoRecord<'a> {
    label: &'a str,
    algorithm: &'a str,
    epochs: usize,
    planned_samples: u64,
    burn_in_tau: Option<usize>,
    schedule: ScheduleRecord,
    completed: usize,
    diverged: usize,
    trials: &'a [TrialOutcome],
}

#[derive(Serialize)]
struct FileRecord {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    version: u32,
    name: &'a str,
    config_sha256: String,
    created_unix: u64,
    environment: &'a str,
    base_seed: u64,
    trials: usize,
    seed_rule: &'static str,
    seeds: Vec<u64>,
    algorithms: Vec<AlgoRecord<'a>>,
    files: Vec<FileRecord>,
}

fn relative(base: &Path, p: &Path) -> String {
    p.strip_prefix(base).unwrap_or(p).to_string_lossy().replace('\\', "/")
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::config(format!("workers: cannot start thread pool: {e}")))
}

/// Hash of the document with the fields that cannot change results (output
/// location, worker count) cleared.
pub fn config_digest(cfg: &ExperimentConfig) -> String {
    let mut normalized = cfg.clone();
    normalized.output_dir = PathBuf::new();
    normalized.workers = None;
    sha256_hex(normalized.to_json().as_bytes())
}

/// Runs every algorithm for every trial and persists traces, aggregates and
/// the manifest. `out` and `workers` override the document's values.
///
/// Returns [`HarnessError::AllDiverged`] after writing everything else if some
/// algorithm has no surviving trial.
pub fn run_experiment(cfg: &ExperimentConfig, out: Option<&Path>, workers: Option<usize>) -> Result<RunSummary> {
    let mut cfg = cfg.clone();
    if let Some(out) = out {
        cfg.output_dir = out.to_path_buf();
    }
    let workers = workers.or(cfg.workers).unwrap_or(1);
    if workers == 0 {
        return Err(HarnessError::config("workers: must be at least 1"));
    }
    cfg.workers = None;
    let resolved = cfg.resolve()?;
    let dir = cfg.output_dir.clone();
    fs::create_dir_all(&dir).map_err(|e| HarnessError::io(&dir, e))?;
    let pool = pool(workers)?;
    let env = resolved.env.as_ref();
    let dim = env.dim();

    let mut files: Vec<(PathBuf, String)> = Vec::new();
    let mut outcomes = Vec::with_capacity(resolved.algorithms.len());
    for ResolvedAlgo { label, config } in &resolved.algorithms {
        let trial_dir = dir.join(label);
        fs::create_dir_all(&trial_dir).map_err(|e| HarnessError::io(&trial_dir, e))?;
        let results: Vec<Result<TrialArtifacts>> = pool.install(|| {
            (0..cfg.trials)
                .into_par_iter()
                .map(|trial| {
                    let seed = cfg.trial_seed(trial);
                    let mut rng = Rng::seed_from_u64(seed);
                    let trace = run(env, config, &mut rng)
                        .map_err(|e| HarnessError::config(format!("{label}: {e}")))?;
                    let rows = trace_rows(&trace, cfg.max_rows);
                    let csv = trace_csv(trial, &rows, dim, cfg.record_theta);
                    let path = trial_dir.join(format!("trial_{trial}.csv"));
                    write_file(&path, &csv)?;
                    let outcome = TrialOutcome {
                        trial,
                        seed,
                        diverged_at: trace.diverged_at,
                        total_samples: trace.total_samples,
                        final_theta: trace.final_theta().as_slice().to_vec(),
                        output_index: trace.output_index,
                    };
                    Ok((outcome, rows, path, sha256_hex(csv.as_bytes())))
                })
                .collect()
        });
        let mut trials = Vec::with_capacity(cfg.trials);
        let mut surviving: Vec<Vec<TraceRow>> = Vec::new();
        let mut trace_files = Vec::with_capacity(cfg.trials);
        for r in results {
            let (outcome, rows, path, digest) = r?;
            if outcome.diverged_at.is_none() {
                surviving.push(rows);
            }
            trials.push(outcome);
            files.push((path.clone(), digest));
            trace_files.push(path);
        }
        let (curve, aggregate_file) = if surviving.is_empty() {
            (None, None)
        } else {
            let refs: Vec<&[TraceRow]> = surviving.iter().map(Vec::as_slice).collect();
            let curve = aggregate(&refs).map_err(|e| HarnessError::config(format!("{label}: {e}")))?;
            let csv = aggregate_csv(&curve);
            let path = dir.join(format!("{label}_aggregate.csv"));
            write_file(&path, &csv)?;
            files.push((path.clone(), sha256_hex(csv.as_bytes())));
            (Some(curve), Some(path))
        };
        outcomes.push(AlgoOutcome {
            label: label.clone(),
            algorithm: config.algorithm.name().to_string(),
            epochs: config.epochs,
            trials,
            curve,
            trace_files,
            aggregate_file,
        });
    }

    let manifest = Manifest {
        version: cfg.version,
        name: &cfg.name,
        config_sha256: config_digest(&cfg),
        created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        environment: env.name(),
        base_seed: cfg.base_seed,
        trials: cfg.trials,
        seed_rule: "seed = base_seed + trial (u64, wrapping); generator ChaCha8 seeded via seed_from_u64",
        seeds: (0..cfg.trials).map(|t| cfg.trial_seed(t)).collect(),
        algorithms: resolved
            .algorithms
            .iter()
            .zip(&outcomes)
            .map(|(r, o)| AlgoRecord {
                label: &r.label,
                algorithm: r.config.algorithm.name(),
                epochs: r.config.epochs,
                planned_samples: r.config.sample_cost(),
                burn_in_tau: r.config.burn_in_tau,
                schedule: ScheduleRecord::from(&r.config.schedule),
                completed: o.completed(),
                diverged: o.diverged(),
                trials: &o.trials,
            })
            .collect(),
        files: files.iter().map(|(p, h)| FileRecord { path: relative(&dir, p), sha256: h.clone() }).collect(),
    };
    let manifest_path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    write_file(&manifest_path, &text)?;

    let dead: Vec<String> = outcomes.iter().filter(|o| o.curve.is_none()).map(|o| o.label.clone()).collect();
    if !dead.is_empty() {
        return Err(HarnessError::AllDiverged(dead));
    }
    Ok(RunSummary { output_dir: dir, manifest: manifest_path, algorithms: outcomes })
}

/// Runs every check of a diagnostics document and writes the moments CSV.
/// Check `i` uses seed `base_seed + i`.
pub fn run_diag(cfg: &DiagConfig, out: Option<&Path>) -> Result<(PathBuf, Vec<MomentRow>)> {
    let env = cfg.environment.build()?;
    let mut rows = Vec::with_capacity(cfg.checks.len());
    for (i, check) in cfg.checks.iter().enumerate() {
        let kind: EstimatorKind = check
            .estimator
            .parse()
            .map_err(|_| HarnessError::config(format!("checks[{i}].estimator: unknown estimator")))?;
        if check.theta.len() != env.dim() {
            return Err(HarnessError::config(format!(
                "checks[{i}].theta: expected {} entries, got {}",
                env.dim(),
                check.theta.len()
            )));
        }
        let mut rng = Rng::seed_from_u64(cfg.base_seed.wrapping_add(i as u64));
        let report = estimator_moments(env.as_ref(), &check.theta, check.delta, check.n, kind, &mut rng)
            .map_err(|e| HarnessError::config(format!("checks[{i}]: {e}")))?;
        rows.push(MomentRow {
            check: i,
            estimator: kind.name().to_string(),
            delta: check.delta,
            report,
            theta: check.theta.clone(),
        });
    }
    let path = out.map(Path::to_path_buf).unwrap_or_else(|| cfg.output.clone());
    write_file(&path, &moments_csv(&rows))?;
    Ok((path, rows))
}
