//! Run configuration, read from JSON.

use std::path::{Path, PathBuf};

use lambdavar_core::{LambdaFunction, LossDistribution, PremiumRule};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    Lambdavar,
    ExpectedGeneral,
    ExpectedStoploss,
    Existence,
    LambdavarPremium,
    MixedPremium,
    QuotaShare,
    RobustLr,
    RobustMv,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::Lambdavar => "lambdavar",
            Problem::ExpectedGeneral => "expected_general",
            Problem::ExpectedStoploss => "expected_stoploss",
            Problem::Existence => "existence",
            Problem::LambdavarPremium => "lambdavar_premium",
            Problem::MixedPremium => "mixed_premium",
            Problem::QuotaShare => "quota_share",
            Problem::RobustLr => "robust_lr",
            Problem::RobustMv => "robust_mv",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Uncertainty {
    pub beta: Option<f64>,
    pub mu: Option<f64>,
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    /// A JSON pointer into this config, or one of the short names in [`ALIASES`].
    pub parameter: String,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

pub const ALIASES: &[(&str, &str)] = &[
    ("theta", "/premium/theta"),
    ("beta", "/uncertainty/beta"),
    ("alpha", "/distribution/alpha"),
    ("rate", "/distribution/rate"),
    ("mu", "/uncertainty/mu"),
    ("sigma", "/uncertainty/sigma"),
];

impl Sweep {
    pub fn pointer(&self) -> String {
        ALIASES
            .iter()
            .find(|(name, _)| *name == self.parameter)
            .map_or_else(|| self.parameter.clone(), |(_, p)| p.to_string())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.from];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.to
                } else {
                    self.from + (self.to - self.from) * (i as f64 / last)
                }
            })
            .collect()
    }

    fn validate(&self) -> Result<(), CliError> {
        if !(self.from.is_finite() && self.to.is_finite()) {
            return Err(CliError::Validation("sweep bounds must be finite".into()));
        }
        if self.from > self.to {
            return Err(CliError::Validation(format!(
                "sweep bounds out of order: from {} > to {}",
                self.from, self.to
            )));
        }
        if self.steps == 0 {
            return Err(CliError::Validation("sweep needs at least one step".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Brute-force cross-check attached to a single solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    #[serde(default = "default_atoms")]
    pub atoms: usize,
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
}

fn default_atoms() -> usize {
    500
}
fn default_grid() -> usize {
    200
}
fn default_trials() -> usize {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: Problem,
    #[serde(default)]
    pub distribution: Option<LossDistribution>,
    #[serde(default)]
    pub lambda: Option<LambdaFunction>,
    #[serde(default)]
    pub premium: Option<PremiumRule>,
    #[serde(default)]
    pub uncertainty: Option<Uncertainty>,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
    #[serde(default)]
    pub oracle: Option<OracleSpec>,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// A parsed config together with its raw JSON, which sweeps rewrite.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub raw: Value,
    pub config: RunConfig,
}

impl LoadedConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_str_in(&text, base)
    }

    /// Parses `text`, resolving empirical sample paths against `base`.
    pub fn from_str_in(text: &str, base: &Path) -> Result<Self, CliError> {
        let mut raw: Value =
            serde_json::from_str(text).map_err(|e| CliError::Validation(format!("config is not valid JSON: {e}")))?;
        inline_empirical(&mut raw, base)?;
        let config = parse(&raw)?;
        if let Some(s) = &config.sweep {
            s.validate()?;
            if raw.pointer(&s.pointer()).is_none() {
                return Err(CliError::Validation(format!(
                    "sweep parameter {} does not exist in this config",
                    s.parameter
                )));
            }
        }
        check_problem_inputs(&config)?;
        Ok(LoadedConfig { raw, config })
    }

    /// Config with the sweep parameter set to `value`.
    pub fn with_parameter(&self, value: f64) -> Result<RunConfig, CliError> {
        let Some(sweep) = &self.config.sweep else {
            return Ok(self.config.clone());
        };
        let mut raw = self.raw.clone();
        let slot = raw
            .pointer_mut(&sweep.pointer())
            .ok_or_else(|| CliError::Validation(format!("sweep parameter {} not found", sweep.parameter)))?;
        *slot = serde_json::json!(value);
        let config = parse(&raw)?;
        check_problem_inputs(&config)?;
        Ok(config)
    }
}

fn parse(raw: &Value) -> Result<RunConfig, CliError> {
    serde_json::from_value(raw.clone()).map_err(|e| CliError::Validation(format!("invalid config: {e}")))
}

/// Replaces `{"family": "empirical", "path": ...}` by the sample it names.
fn inline_empirical(raw: &mut Value, base: &Path) -> Result<(), CliError> {
    let Some(dist) = raw.get_mut("distribution") else {
        return Ok(());
    };
    if dist.get("family").and_then(Value::as_str) != Some("empirical") {
        return Ok(());
    }
    let Some(path) = dist.get("path").and_then(Value::as_str).map(PathBuf::from) else {
        return Ok(());
    };
    let full = if path.is_absolute() { path } else { base.join(path) };
    let values = read_sample(&full)?;
    *dist = serde_json::json!({ "family": "empirical", "sample": values });
    Ok(())
}

/// Newline-separated non-negative decimals; blank lines are skipped.
pub fn read_sample(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read sample {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| CliError::Validation(format!("{}:{}: not a number: {line}", path.display(), i + 1)))?;
        if !(v.is_finite() && v >= 0.0) {
            return Err(CliError::Validation(format!(
                "{}:{}: sample values must be finite and non-negative",
                path.display(),
                i + 1
            )));
        }
        out.push(v);
    }
    Ok(out)
}

fn missing(problem: Problem, what: &str) -> CliError {
    CliError::Validation(format!("problem {} needs {what}", problem.name()))
}

fn check_problem_inputs(c: &RunConfig) -> Result<(), CliError> {
    let p = c.problem;
    let needs_dist = p != Problem::RobustMv;
    if needs_dist && c.distribution.is_none() {
        return Err(missing(p, "a distribution"));
    }
    if c.lambda.is_none() {
        return Err(missing(p, "a lambda function"));
    }
    let premium = c.premium.as_ref();
    match p {
        Problem::Lambdavar => {}
        Problem::ExpectedGeneral
        | Problem::ExpectedStoploss
        | Problem::Existence
        | Problem::QuotaShare
        | Problem::RobustLr
        | Problem::RobustMv => {
            if !matches!(premium, Some(PremiumRule::ExpectedValue { .. })) {
                return Err(missing(p, "an expected_value premium"));
            }
        }
        Problem::LambdavarPremium => {
            if !matches!(premium, Some(PremiumRule::PureLambdaVar { .. })) {
                return Err(missing(p, "a pure_lambda_var premium"));
            }
        }
        Problem::MixedPremium => {
            if !matches!(premium, Some(PremiumRule::Mixed { .. })) {
                return Err(missing(p, "a mixed premium"));
            }
        }
    }
    let u = c.uncertainty.unwrap_or_default();
    if p == Problem::RobustLr && u.beta.is_none() {
        return Err(missing(p, "uncertainty.beta"));
    }
    if p == Problem::RobustMv && (u.mu.is_none() || u.sigma.is_none()) {
        return Err(missing(p, "uncertainty.mu and uncertainty.sigma"));
    }
    if let Some(o) = c.oracle {
        if !matches!(p, Problem::ExpectedGeneral | Problem::MixedPremium | Problem::RobustLr) {
            return Err(CliError::Validation(format!(
                "oracle checks are available for expected_general, robust_lr and mixed_premium, not {}",
                p.name()
            )));
        }
        if o.atoms < 2 || o.grid < 10 {
            return Err(CliError::Validation("oracle needs atoms ≥ 2 and grid ≥ 10".into()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{
        "problem": "expected_general",
        "distribution": {"family": "pareto", "alpha": 2.0},
        "lambda": {"kind": "two_level", "high": 0.9, "low": 0.8, "threshold": 1.0},
        "premium": {"kind": "expected_value", "theta": 0.5},
        "sweep": {"parameter": "theta", "from": 0.1, "to": 0.5, "steps": 5}
    }"#;

    #[test]
    fn sweep_rewrites_pointer() {
        let c = LoadedConfig::from_str_in(EXAMPLE, Path::new(".")).unwrap();
        let values = c.config.sweep.as_ref().unwrap().values();
        assert_eq!(values.len(), 5);
        assert_eq!(values[4], 0.5);
        let at = c.with_parameter(0.3).unwrap();
        assert_eq!(at.premium, Some(PremiumRule::ExpectedValue { theta: 0.3 }));
    }

    #[test]
    fn missing_premium_is_rejected() {
        let text = r#"{"problem": "expected_general",
            "distribution": {"family": "pareto", "alpha": 2.0},
            "lambda": {"kind": "constant", "level": 0.9}}"#;
        let err = LoadedConfig::from_str_in(text, Path::new(".")).unwrap_err();
        assert!(err.to_string().contains("expected_value"));
    }

    #[test]
    fn unknown_sweep_target_is_rejected() {
        let text = EXAMPLE.replace("\"theta\", \"from\"", "\"/premium/nope\", \"from\"");
        assert!(LoadedConfig::from_str_in(&text, Path::new(".")).is_err());
    }

    #[test]
    fn empirical_file_is_inlined() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("losses.txt"), "3.0\n1.0\n\n2.0\n").unwrap();
        let text = r#"{"problem": "lambdavar",
            "distribution": {"family": "empirical", "path": "losses.txt"},
            "lambda": {"kind": "constant", "level": 0.5}}"#;
        let c = LoadedConfig::from_str_in(text, dir.path()).unwrap();
        assert_eq!(c.config.distribution, Some(LossDistribution::empirical(vec![1.0, 2.0, 3.0]).unwrap()));
        std::fs::write(dir.path().join("losses.txt"), "1.0\n-2\n").unwrap();
        assert!(LoadedConfig::from_str_in(text, dir.path()).is_err());
    }
}
