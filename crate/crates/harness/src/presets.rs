//! Built-in experiment documents for the three benchmarks and the estimator
//! diagnostics.
//!
//! Step-size constants were chosen so DFO(λ) is stable from the benchmark's
//! initial model; the baselines get the same sample budget as the
//! `dfo_lambda` entry listed first.

use std::path::PathBuf;

use crate::config::{AlgoSpec, DiagCheck, DiagConfig, EnvSpec, ExperimentConfig, ScheduleSpec, CONFIG_VERSION};

pub const EXPERIMENTS: [&str; 3] = ["quartic", "pricing", "regression"];
pub const DIAGNOSTICS: [&str; 2] = ["diag_quartic", "diag_pricing"];

pub fn describe(name: &str) -> Option<&'static str> {
    Some(match name {
        "quartic" => "scalar quartic risk, AR(1) samples (gamma=0.5), theta0=6; gradient norm vs samples",
        "pricing" => "5-good Markovian pricing (gamma=0.1, kappa=0.5); revenue vs samples, OPT=62.5",
        "regression" => "performative linear regression, AR pair process (gamma=0.25); risk vs samples",
        "diag_quartic" => "one-point / two-point estimator moments on the quartic benchmark",
        "diag_pricing" => "one-point unbiasedness and variance scaling on the pricing benchmark",
        _ => return None,
    })
}

fn smooth(eta0: f64, delta0: f64, lambda: f64) -> ScheduleSpec {
    ScheduleSpec {
        preset: Some("smooth".into()),
        eta0: Some(eta0),
        delta0: Some(delta0),
        lambda: Some(lambda),
        ..ScheduleSpec::default()
    }
}

fn labelled(label: &str, mut spec: AlgoSpec) -> AlgoSpec {
    spec.label = Some(label.into());
    spec
}

fn matched(algorithm: &str, schedule: ScheduleSpec, reference: &str) -> AlgoSpec {
    let mut spec = AlgoSpec::new(algorithm, schedule);
    spec.match_budget = Some(reference.into());
    spec
}

pub fn experiment(name: &str) -> Option<ExperimentConfig> {
    let cfg = match name {
        "quartic" => {
            let dfo = smooth(0.02, 2.5, 0.25);
            let reference = "dfo_lambda_0.25";
            ExperimentConfig {
                version: CONFIG_VERSION,
                name: name.into(),
                environment: EnvSpec { gamma: Some(0.5), sigma: Some(1.0), ..EnvSpec::kind("quartic") },
                algorithms: vec![
                    labelled(reference, AlgoSpec::new("dfo_lambda", dfo.clone())),
                    labelled("dfo_lambda_0.5", AlgoSpec::new("dfo_lambda", smooth(0.02, 2.5, 0.5))),
                    matched("dfo_gd", dfo.clone(), reference),
                    matched("sgd_gd", smooth(0.02, 2.5, 0.0), reference),
                    matched("two_point_I", dfo.clone(), reference),
                    matched("two_point_II", dfo, reference),
                ],
                trials: 10,
                base_seed: 20230,
                epochs: 12_500,
                theta0: vec![6.0],
                output_dir: PathBuf::from("runs/quartic"),
                record_theta: true,
                max_rows: Some(2_000),
                workers: None,
            }
        }
        "pricing" => {
            let dfo = smooth(0.06, 30.0, 0.25);
            let reference = "dfo_lambda_0.25";
            ExperimentConfig {
                version: CONFIG_VERSION,
                name: name.into(),
                environment: EnvSpec {
                    gamma: Some(0.1),
                    sigma: Some(1.0),
                    kappa: Some(0.5),
                    mu0: Some(vec![5.0, -5.0, -5.0, 5.0, -5.0]),
                    ..EnvSpec::kind("pricing")
                },
                algorithms: vec![
                    labelled(reference, AlgoSpec::new("dfo_lambda", dfo.clone())),
                    matched("dfo_gd", dfo, reference),
                    matched("sgd_gd", smooth(0.1, 1.0, 0.0), reference),
                ],
                trials: 10,
                base_seed: 20231,
                epochs: 5_000,
                theta0: vec![12.0, -12.0, 12.0, -12.0, 12.0],
                output_dir: PathBuf::from("runs/pricing"),
                record_theta: true,
                max_rows: Some(2_000),
                workers: None,
            }
        }
        "regression" => {
            let dfo = smooth(0.02, 25.0, 0.25);
            let reference = "dfo_lambda_0.25";
            ExperimentConfig {
                version: CONFIG_VERSION,
                name: name.into(),
                environment: EnvSpec {
                    gamma: Some(0.25),
                    sigma1: Some(1.0),
                    sigma2: Some(1.0),
                    theta_ref: Some(vec![5.0, -5.0, 5.0, -5.0, 5.0]),
                    ..EnvSpec::kind("regression")
                },
                algorithms: vec![
                    labelled(reference, AlgoSpec::new("dfo_lambda", dfo.clone())),
                    matched("dfo_gd", dfo, reference),
                    matched("sgd_gd", smooth(0.02, 1.0, 0.0), reference),
                ],
                trials: 10,
                base_seed: 20232,
                epochs: 10_000,
                theta0: vec![0.0; 5],
                output_dir: PathBuf::from("runs/regression"),
                record_theta: true,
                max_rows: Some(2_000),
                workers: None,
            }
        }
        _ => return None,
    };
    Some(cfg)
}

fn check(estimator: &str, theta: &[f64], delta: f64, n: usize) -> DiagCheck {
    DiagCheck { estimator: estimator.into(), theta: theta.to_vec(), delta, n }
}

pub fn diagnostic(name: &str) -> Option<DiagConfig> {
    let cfg = match name {
        "diag_quartic" => DiagConfig {
            version: CONFIG_VERSION,
            name: name.into(),
            environment: EnvSpec::kind("quartic"),
            base_seed: 7,
            output: PathBuf::from("runs/diag_quartic.csv"),
            checks: vec![
                check("one_point", &[1.0], 0.5, 1_000_000),
                check("two_point_I", &[1.0], 0.5, 1_000_000),
                check("two_point_II", &[1.0], 0.5, 1_000_000),
            ],
        },
        "diag_pricing" => {
            let mu0 = [5.0, -5.0, -5.0, 5.0, -5.0];
            DiagConfig {
                version: CONFIG_VERSION,
                name: name.into(),
                environment: EnvSpec::kind("pricing"),
                base_seed: 11,
                output: PathBuf::from("runs/diag_pricing.csv"),
                checks: vec![
                    check("one_point", &[0.0; 5], 1.0, 1_000_000),
                    check("one_point", &mu0, 1.0, 1_000_000),
                    check("one_point", &mu0, 0.5, 1_000_000),
                    check("two_point_II", &mu0, 1.0, 1_000_000),
                ],
            }
        }
        _ => return None,
    };
    Some(cfg)
}
