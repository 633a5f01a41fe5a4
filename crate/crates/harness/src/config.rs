//! JSON experiment and diagnostics documents.
//!
//! Tags (`environment.kind`, `algorithms[i].algorithm`, schedule presets,
//! estimator names) are plain strings checked during [`ExperimentConfig::resolve`]
//! so errors can name the offending field.

use std::path::{Path, PathBuf};

use perfdfo_core::estimator::EstimatorKind;
use perfdfo_core::schedule::{Schedule, SchedulePreset};
use perfdfo_core::{AlgoConfig, Algorithm, ArPricing, ArRegression, ArScalarQuartic, DecisionVector, Environment};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvSpec {
    /// `quartic`, `pricing` or `regression`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    /// Pricing: base demand mean μ₀.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu0: Option<Vec<f64>>,
    /// Regression: unshifted coefficient θ₀.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_ref: Option<Vec<f64>>,
}

impl EnvSpec {
    pub fn kind(kind: &str) -> Self {
        Self {
            kind: kind.to_string(),
            gamma: None,
            sigma: None,
            sigma1: None,
            sigma2: None,
            kappa: None,
            mu0: None,
            theta_ref: None,
        }
    }

    pub fn build(&self) -> Result<Box<dyn Environment>> {
        let field = |name: &str, e: perfdfo_core::Error| HarnessError::config(format!("environment.{name}: {e}"));
        let unused = |present: bool, name: &str| -> Result<()> {
            if present {
                Err(HarnessError::config(format!(
                    "environment.{name}: not a parameter of the `{}` environment",
                    self.kind
                )))
            } else {
                Ok(())
            }
        };
        match self.kind.as_str() {
            "quartic" => {
                unused(self.sigma1.is_some(), "sigma1")?;
                unused(self.sigma2.is_some(), "sigma2")?;
                unused(self.kappa.is_some(), "kappa")?;
                unused(self.mu0.is_some(), "mu0")?;
                unused(self.theta_ref.is_some(), "theta_ref")?;
                let env = ArScalarQuartic::new(self.gamma.unwrap_or(0.5), self.sigma.unwrap_or(1.0))
                    .map_err(|e| field("gamma/sigma", e))?;
                Ok(Box::new(env))
            }
            "pricing" => {
                unused(self.sigma1.is_some(), "sigma1")?;
                unused(self.sigma2.is_some(), "sigma2")?;
                unused(self.theta_ref.is_some(), "theta_ref")?;
                let d = ArPricing::default();
                let env = ArPricing::new(
                    self.gamma.unwrap_or(d.gamma()),
                    self.sigma.unwrap_or(d.sigma()),
                    self.kappa.unwrap_or(d.kappa()),
                    self.mu0.clone().unwrap_or_else(|| d.mu0().to_vec()),
                )
                .map_err(|e| field("gamma/sigma/kappa/mu0", e))?;
                Ok(Box::new(env))
            }
            "regression" => {
                unused(self.sigma.is_some(), "sigma")?;
                unused(self.mu0.is_some(), "mu0")?;
                let d = ArRegression::default();
                let theta_ref = self.theta_ref.clone().unwrap_or_else(|| d.theta_ref().to_vec());
                let norm = theta_ref.iter().map(|t| t * t).sum::<f64>().sqrt();
                let kappa = match self.kappa {
                    Some(k) => k,
                    None if norm > 0.0 => 1.0 / norm,
                    None => 0.0,
                };
                let env = ArRegression::new(
                    self.gamma.unwrap_or(d.gamma()),
                    self.sigma1.unwrap_or(d.sigma1()),
                    self.sigma2.unwrap_or(d.sigma2()),
                    kappa,
                    theta_ref,
                )
                .map_err(|e| field("gamma/sigma1/sigma2/kappa/theta_ref", e))?;
                Ok(Box::new(env))
            }
            other => Err(HarnessError::config(format!(
                "environment.kind: unknown environment `{other}` (expected quartic, pricing or regression)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    /// `smooth` (default), `nonsmooth` or `custom`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Mixing-rate estimate; defaults to the environment's `1 - gamma`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
}

impl ScheduleSpec {
    pub fn resolve(&self, env: &dyn Environment, at: &str) -> Result<Schedule> {
        let preset = match self.preset.as_deref().unwrap_or("smooth") {
            "smooth" => SchedulePreset::Smooth,
            "nonsmooth" => SchedulePreset::NonSmooth,
            "custom" => SchedulePreset::Custom,
            other => {
                return Err(HarnessError::config(format!(
                    "{at}.preset: unknown schedule preset `{other}` (expected smooth, nonsmooth or custom)"
                )))
            }
        };
        let (alpha, beta) = preset.default_exponents();
        let (eta0, delta0) = preset.default_constants(env.dim());
        Schedule::new(
            preset,
            self.alpha.unwrap_or(alpha),
            self.beta.unwrap_or(beta),
            self.eta0.unwrap_or(eta0),
            self.delta0.unwrap_or(delta0),
            self.lambda.unwrap_or(0.0),
            self.rho.or(env.mixing_rate()).unwrap_or(0.0),
            self.tau0,
        )
        .map_err(|e| HarnessError::config(format!("{at}: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgoSpec {
    /// Output name; defaults to the algorithm tag. Must be unique.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// `dfo_lambda`, `dfo_gd`, `sgd_gd`, `two_point_I` or `two_point_II`.
    pub algorithm: String,
    #[serde(default)]
    pub schedule: ScheduleSpec,
    /// Overrides the experiment-level epoch count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epochs: Option<usize>,
    /// Run as many epochs as needed to consume this many samples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_budget: Option<u64>,
    /// Use the sample cost of another (earlier or later) algorithm as the budget.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub match_budget: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in_tau: Option<usize>,
}

impl AlgoSpec {
    pub fn new(algorithm: &str, schedule: ScheduleSpec) -> Self {
        Self {
            label: None,
            algorithm: algorithm.to_string(),
            schedule,
            epochs: None,
            sample_budget: None,
            match_budget: None,
            theta0: None,
            burn_in_tau: None,
        }
    }

    pub fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.algorithm)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub name: String,
    pub environment: EnvSpec,
    pub algorithms: Vec<AlgoSpec>,
    pub trials: usize,
    pub base_seed: u64,
    pub epochs: usize,
    /// Initial model shared by all algorithms unless overridden.
    pub theta0: Vec<f64>,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub record_theta: bool,
    /// Thin each trace CSV (and the aggregate) to about this many rows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

/// An algorithm spec with every default filled in.
#[derive(Debug, Clone)]
pub struct ResolvedAlgo {
    pub label: String,
    pub config: AlgoConfig,
}

pub struct ResolvedExperiment {
    pub env: Box<dyn Environment>,
    pub algorithms: Vec<ResolvedAlgo>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| HarnessError::config(format!("invalid experiment document: {e}")))?;
        cfg.check_shallow()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Per-trial seed: `base_seed + trial` (wrapping).
    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.base_seed.wrapping_add(trial as u64)
    }

    fn check_shallow(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(HarnessError::config(format!(
                "version: unsupported version {} (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        if self.trials == 0 {
            return Err(HarnessError::config("trials: must be at least 1"));
        }
        if self.epochs == 0 {
            return Err(HarnessError::config("epochs: must be at least 1"));
        }
        if self.algorithms.is_empty() {
            return Err(HarnessError::config("algorithms: at least one algorithm is required"));
        }
        if matches!(self.max_rows, Some(m) if m < 2) {
            return Err(HarnessError::config("max_rows: must be at least 2"));
        }
        if self.workers == Some(0) {
            return Err(HarnessError::config("workers: must be at least 1"));
        }
        Ok(())
    }

    /// Builds the environment and fully specified algorithm configs.
    pub fn resolve(&self) -> Result<ResolvedExperiment> {
        self.check_shallow()?;
        let env = self.environment.build()?;
        let d = env.dim();
        let theta_from = |values: &[f64], at: &str| -> Result<DecisionVector> {
            if values.len() != d {
                return Err(HarnessError::config(format!(
                    "{at}: expected {d} entries for the `{}` environment, got {}",
                    env.name(),
                    values.len()
                )));
            }
            DecisionVector::new(values.to_vec()).map_err(|e| HarnessError::config(format!("{at}: {e}")))
        };
        let theta0 = theta_from(&self.theta0, "theta0")?;

        let mut labels = std::collections::HashSet::new();
        let mut partial = Vec::with_capacity(self.algorithms.len());
        for (i, spec) in self.algorithms.iter().enumerate() {
            let at = format!("algorithms[{i}]");
            let algorithm: Algorithm = spec.algorithm.parse().map_err(|_| {
                HarnessError::config(format!(
                    "{at}.algorithm: unknown algorithm `{}` (expected one of {})",
                    spec.algorithm,
                    Algorithm::ALL.map(|a| a.name()).join(", ")
                ))
            })?;
            let label = spec.label().to_string();
            if label.is_empty() || label.contains(['/', '\\']) || label.starts_with('.') {
                return Err(HarnessError::config(format!("{at}.label: `{label}` is not a usable file name")));
            }
            if !labels.insert(label.clone()) {
                return Err(HarnessError::config(format!("{at}.label: duplicate label `{label}`")));
            }
            if spec.burn_in_tau == Some(0) {
                return Err(HarnessError::config(format!("{at}.burn_in_tau: must be positive")));
            }
            let budget_fields = [spec.epochs.is_some(), spec.sample_budget.is_some(), spec.match_budget.is_some()];
            if budget_fields.iter().filter(|b| **b).count() > 1 {
                return Err(HarnessError::config(format!(
                    "{at}: set at most one of epochs, sample_budget, match_budget"
                )));
            }
            if spec.epochs == Some(0) {
                return Err(HarnessError::config(format!("{at}.epochs: must be at least 1")));
            }
            let schedule = spec.schedule.resolve(env.as_ref(), &format!("{at}.schedule"))?;
            let theta0 = match &spec.theta0 {
                Some(t) => theta_from(t, &format!("{at}.theta0"))?,
                None => theta0.clone(),
            };
            let mut config = AlgoConfig::new(algorithm, schedule, spec.epochs.unwrap_or(self.epochs), theta0);
            config.burn_in_tau = spec.burn_in_tau;
            if let Some(budget) = spec.sample_budget {
                config.epochs = algorithm.epochs_for_budget(&schedule, spec.burn_in_tau, budget);
            }
            partial.push(ResolvedAlgo { label, config });
        }

        // budgets borrowed from other entries resolve against their final epoch counts
        let costs: std::collections::HashMap<String, u64> = partial
            .iter()
            .zip(&self.algorithms)
            .filter(|(_, s)| s.match_budget.is_none())
            .map(|(r, _)| (r.label.clone(), r.config.sample_cost()))
            .collect();
        for (i, (resolved, spec)) in partial.iter_mut().zip(&self.algorithms).enumerate() {
            if let Some(target) = &spec.match_budget {
                let budget = costs.get(target).ok_or_else(|| {
                    HarnessError::config(format!(
                        "algorithms[{i}].match_budget: no algorithm labelled `{target}` with its own budget"
                    ))
                })?;
                let c = &resolved.config;
                resolved.config.epochs = c.algorithm.epochs_for_budget(&c.schedule, c.burn_in_tau, *budget);
            }
        }
        Ok(ResolvedExperiment { env, algorithms: partial })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagCheck {
    /// `one_point`, `two_point_I` or `two_point_II`.
    pub estimator: String,
    pub theta: Vec<f64>,
    pub delta: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagConfig {
    pub version: u32,
    pub name: String,
    pub environment: EnvSpec,
    pub base_seed: u64,
    /// CSV destination.
    pub output: PathBuf,
    pub checks: Vec<DiagCheck>,
}

impl DiagConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: DiagConfig =
            serde_json::from_str(text).map_err(|e| HarnessError::config(format!("invalid diag document: {e}")))?;
        if cfg.version != CONFIG_VERSION {
            return Err(HarnessError::config(format!(
                "version: unsupported version {} (expected {CONFIG_VERSION})",
                cfg.version
            )));
        }
        if cfg.checks.is_empty() {
            return Err(HarnessError::config("checks: at least one check is required"));
        }
        for (i, c) in cfg.checks.iter().enumerate() {
            c.estimator.parse::<EstimatorKind>().map_err(|_| {
                HarnessError::config(format!(
                    "checks[{i}].estimator: unknown estimator `{}` (expected one_point, two_point_I or two_point_II)",
                    c.estimator
                ))
            })?;
            if !(c.delta > 0.0) {
                return Err(HarnessError::config(format!("checks[{i}].delta: must be positive")));
            }
            if c.n < 2 {
                return Err(HarnessError::config(format!("checks[{i}].n: must be at least 2")));
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn quartic() -> ExperimentConfig {
        presets::experiment("quartic").unwrap()
    }

    fn config_err(cfg: &ExperimentConfig) -> String {
        match cfg.resolve() {
            Err(HarnessError::Config(msg)) => msg,
            Err(e) => panic!("expected a config error, got {e}"),
            Ok(_) => panic!("expected a config error"),
        }
    }

    #[test]
    fn presets_round_trip_through_json() {
        for name in presets::EXPERIMENTS {
            let cfg = presets::experiment(name).unwrap();
            assert_eq!(ExperimentConfig::from_json(&cfg.to_json()).unwrap(), cfg);
            cfg.resolve().unwrap();
        }
    }

    #[test]
    fn unknown_algorithm_names_its_field() {
        let mut cfg = quartic();
        cfg.algorithms[1].algorithm = "newton".into();
        let msg = config_err(&cfg);
        assert!(msg.starts_with("algorithms[1].algorithm"), "{msg}");
    }

    #[test]
    fn unknown_environment_names_its_field() {
        let mut cfg = quartic();
        cfg.environment.kind = "bandit".into();
        assert!(config_err(&cfg).starts_with("environment.kind"));
    }

    #[test]
    fn unknown_schedule_preset_names_its_field() {
        let mut cfg = quartic();
        cfg.algorithms[0].schedule.preset = Some("fast".into());
        assert!(config_err(&cfg).starts_with("algorithms[0].schedule.preset"));
    }

    #[test]
    fn stray_environment_parameter_is_rejected() {
        let mut cfg = quartic();
        cfg.environment.mu0 = Some(vec![1.0]);
        assert!(config_err(&cfg).starts_with("environment.mu0"));
    }

    #[test]
    fn theta0_length_must_match() {
        let mut cfg = quartic();
        cfg.theta0 = vec![1.0, 2.0];
        assert!(config_err(&cfg).starts_with("theta0"));
    }

    #[test]
    fn duplicate_labels_are_rejected() {
        let mut cfg = quartic();
        cfg.algorithms[1].label = cfg.algorithms[0].label.clone();
        assert!(config_err(&cfg).contains("duplicate label"));
    }

    #[test]
    fn version_and_shape_checks() {
        let mut cfg = quartic();
        cfg.version = 2;
        assert!(ExperimentConfig::from_json(&cfg.to_json()).is_err());
        let mut cfg = quartic();
        cfg.trials = 0;
        assert!(matches!(ExperimentConfig::from_json(&cfg.to_json()), Err(HarnessError::Config(_))));
        assert!(matches!(ExperimentConfig::from_json("{"), Err(HarnessError::Config(_))));
        let text = quartic().to_json().replace("\"trials\"", "\"trails\"");
        assert!(ExperimentConfig::from_json(&text).is_err());
    }

    #[test]
    fn matched_budgets_equalize_samples() {
        let cfg = quartic();
        let resolved = cfg.resolve().unwrap();
        let reference = resolved.algorithms[0].config.sample_cost();
        for a in &resolved.algorithms[1..] {
            let cost = a.config.sample_cost();
            assert!(cost >= reference, "{}", a.label);
            let per_epoch_max = a.config.algorithm.epoch_cost(a.config.epochs - 1, &a.config.schedule, a.config.burn_in_tau);
            assert!(cost - reference < per_epoch_max.max(1), "{}", a.label);
        }
    }

    #[test]
    fn match_budget_must_point_somewhere() {
        let mut cfg = quartic();
        cfg.algorithms[2].match_budget = Some("nope".into());
        assert!(config_err(&cfg).starts_with("algorithms[2].match_budget"));
    }

    #[test]
    fn rho_defaults_to_environment_mixing() {
        let cfg = presets::experiment("pricing").unwrap();
        let r = cfg.resolve().unwrap();
        assert!((r.algorithms[0].config.schedule.rho - 0.9).abs() < 1e-12);
    }

    #[test]
    fn diag_documents_validate() {
        for name in presets::DIAGNOSTICS {
            let cfg = presets::diagnostic(name).unwrap();
            assert_eq!(DiagConfig::from_json(&cfg.to_json()).unwrap(), cfg);
        }
        let mut cfg = presets::diagnostic("diag_pricing").unwrap();
        cfg.checks[0].estimator = "zero_point".into();
        match DiagConfig::from_json(&cfg.to_json()) {
            Err(HarnessError::Config(msg)) => assert!(msg.starts_with("checks[0].estimator"), "{msg}"),
            _ => panic!("expected config error"),
        }
    }
}
