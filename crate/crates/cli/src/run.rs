//! Executes a configured problem, singly or as a sweep.

use lambdavar_core::oracle::{self, DominanceReport, GridSearchResult, OracleComparison};
use lambdavar_core::solve::{solve_quota_share_with, QuotaGrid};
use lambdavar_core::{
    existence_positive_finite_deductible, lambda_var, lambda_var_rep, solve_expected_general,
    solve_expected_stoploss, solve_lambdavar_premium, solve_mixed_premium, solve_robust_lr, solve_robust_mv,
    ExistenceReport, IndemnityContract, LambdaFunction, LambdaVarResult, LossDistribution, PremiumRule, SolveReport,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{LoadedConfig, OracleSpec, Problem, RunConfig};
use crate::CliError;

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Outcome {
    Solve(SolveReport),
    Existence(ExistenceReport),
    LambdaVar {
        #[serde(flatten)]
        result: LambdaVarResult,
        #[serde(with = "lambdavar_core::money::float")]
        representation: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub grid: Option<OracleComparison>,
    pub grid_search: Option<GridSearchResult>,
    pub dominance: DominanceReport,
    pub dominance_pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub problem: Problem,
    pub result: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: f64,
    pub report: Report,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub problem: Problem,
    pub parameter: String,
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RunOutput {
    Single(Report),
    Sweep(SweepReport),
}

fn distribution(c: &RunConfig) -> &LossDistribution {
    c.distribution.as_ref().expect("checked at load")
}

fn lambda(c: &RunConfig) -> &LambdaFunction {
    c.lambda.as_ref().expect("checked at load")
}

fn theta(c: &RunConfig) -> f64 {
    match c.premium {
        Some(PremiumRule::ExpectedValue { theta }) | Some(PremiumRule::Mixed { theta, .. }) => theta,
        _ => 0.0,
    }
}

fn premium_lambda(c: &RunConfig) -> &LambdaFunction {
    match &c.premium {
        Some(PremiumRule::PureLambdaVar { lambda }) | Some(PremiumRule::Mixed { lambda, .. }) => lambda,
        _ => unreachable!("checked at load"),
    }
}

/// Solves one fully specified problem.
pub fn solve(c: &RunConfig, seed: u64) -> Result<Report, CliError> {
    let u = c.uncertainty.unwrap_or_default();
    let result = match c.problem {
        Problem::Lambdavar => Outcome::LambdaVar {
            result: lambda_var(distribution(c), lambda(c))?,
            representation: lambda_var_rep(distribution(c), lambda(c))?,
        },
        Problem::ExpectedGeneral => Outcome::Solve(solve_expected_general(distribution(c), lambda(c), theta(c))?),
        Problem::ExpectedStoploss => Outcome::Solve(solve_expected_stoploss(distribution(c), lambda(c), theta(c))?),
        Problem::Existence => {
            Outcome::Existence(existence_positive_finite_deductible(distribution(c), lambda(c), theta(c))?)
        }
        Problem::LambdavarPremium => {
            Outcome::Solve(solve_lambdavar_premium(distribution(c), lambda(c), premium_lambda(c))?)
        }
        Problem::MixedPremium => Outcome::Solve(solve_mixed_premium(
            distribution(c),
            lambda(c),
            premium_lambda(c),
            theta(c),
        )?),
        Problem::QuotaShare => {
            let grid = QuotaGrid {
                seed,
                ..QuotaGrid::default()
            };
            Outcome::Solve(solve_quota_share_with(distribution(c), lambda(c), theta(c), grid)?)
        }
        Problem::RobustLr => Outcome::Solve(solve_robust_lr(
            distribution(c),
            lambda(c),
            theta(c),
            u.beta.expect("checked at load"),
        )?),
        Problem::RobustMv => Outcome::Solve(solve_robust_mv(
            u.mu.expect("checked at load"),
            u.sigma.expect("checked at load"),
            lambda(c),
            theta(c),
        )?),
    };
    let oracle = match (c.oracle, &result) {
        (Some(spec), Outcome::Solve(report)) => Some(oracle_check(c, spec, report, seed)?),
        _ => None,
    };
    Ok(Report {
        problem: c.problem,
        result,
        oracle,
    })
}

/// Relative tolerance for random challengers against the analytic optimum.
pub const DOMINANCE_TOLERANCE: f64 = 1e-3;

fn oracle_check(c: &RunConfig, spec: OracleSpec, report: &SolveReport, seed: u64) -> Result<OracleCheck, CliError> {
    let d = distribution(c);
    let inst = oracle::discretize(d, spec.atoms)?;
    let u = c.uncertainty.unwrap_or_default();
    let (level_fn, rule) = match c.problem {
        Problem::RobustLr => (
            lambda(c).lr_distort(u.beta.expect("checked at load"))?,
            PremiumRule::ExpectedValue { theta: theta(c) },
        ),
        _ => (lambda(c).clone(), c.premium.clone().expect("checked at load")),
    };
    let dominance = oracle::random_indemnity_dominance(&inst, &level_fn, &rule, &report.contract, spec.trials, seed)?;
    let dominance_pass = dominance
        .max_violation
        .is_none_or(|v| v <= DOMINANCE_TOLERANCE * dominance.scale);
    let (grid, grid_search) = if let PremiumRule::ExpectedValue { theta } = rule {
        let g = oracle::grid_search_truncated_stoploss(&inst, &level_fn, theta, spec.grid)?;
        let tol = oracle::grid_tolerance(&inst, &level_fn, theta, &report.contract, report.optimal_value, g.cell)?;
        (Some(OracleComparison::new(report.optimal_value, g.value, tol)), Some(g))
    } else {
        (None, None)
    };
    Ok(OracleCheck {
        grid,
        grid_search,
        dominance,
        dominance_pass,
    })
}

/// Runs the config, sweeping in parallel when a sweep is present. Rows come
/// back in parameter order.
pub fn run(loaded: &LoadedConfig, seed: Option<u64>) -> Result<RunOutput, CliError> {
    let seed = seed.or(loaded.config.seed).unwrap_or(DEFAULT_SEED);
    let Some(sweep) = &loaded.config.sweep else {
        return Ok(RunOutput::Single(solve(&loaded.config, seed)?));
    };
    let rows = sweep
        .values()
        .into_par_iter()
        .map(|v| {
            let c = loaded.with_parameter(v)?;
            Ok(SweepRow {
                param: v,
                report: solve(&c, seed)?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(RunOutput::Sweep(SweepReport {
        problem: loaded.config.problem,
        parameter: sweep.parameter.clone(),
        rows,
    }))
}

/// Flat view of a report for CSV output.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub param: Option<f64>,
    pub x_star: f64,
    pub effective_level: f64,
    pub contract: String,
    pub deductible: Option<f64>,
    pub cap: Option<f64>,
    pub ceiling: Option<f64>,
    pub proportion: Option<f64>,
    pub branch: String,
}

impl CsvRow {
    pub fn from_report(param: Option<f64>, report: &Report) -> Self {
        let mut row = CsvRow {
            param,
            ..CsvRow::default()
        };
        match &report.result {
            Outcome::Solve(s) => {
                row.x_star = s.optimal_value;
                row.effective_level = s.effective_level;
                row.branch = serde_json::to_value(s.branch)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default();
                row.contract = s.contract.kind_name().to_string();
                match s.contract {
                    IndemnityContract::StopLoss { deductible } => row.deductible = Some(deductible.to_f64()),
                    IndemnityContract::TruncatedStopLoss { deductible, cap } => {
                        row.deductible = Some(deductible);
                        row.cap = Some(cap);
                    }
                    IndemnityContract::DualStopLoss { ceiling } => row.ceiling = Some(ceiling),
                    IndemnityContract::QuotaShare { proportion } => row.proportion = Some(proportion),
                    _ => {}
                }
            }
            Outcome::Existence(e) => {
                row.x_star = e.m;
                row.effective_level = f64::NAN;
                row.branch = if e.exists { "exists" } else { "does_not_exist" }.to_string();
            }
            Outcome::LambdaVar { result, .. } => {
                row.x_star = result.value;
                row.effective_level = result.crossing_level;
                row.branch = "lambda_var".to_string();
            }
        }
        row
    }
}

impl RunOutput {
    pub fn csv_rows(&self) -> Vec<CsvRow> {
        match self {
            RunOutput::Single(r) => vec![CsvRow::from_report(None, r)],
            RunOutput::Sweep(s) => s
                .rows
                .iter()
                .map(|row| CsvRow::from_report(Some(row.param), &row.report))
                .collect(),
        }
    }

    /// Whether every attached oracle check passed.
    pub fn oracle_pass(&self) -> bool {
        let ok = |r: &Report| {
            r.oracle
                .as_ref()
                .is_none_or(|o| o.dominance_pass && o.grid.is_none_or(|g| g.pass))
        };
        match self {
            RunOutput::Single(r) => ok(r),
            RunOutput::Sweep(s) => s.rows.iter().all(|row| ok(&row.report)),
        }
    }
}
