use serde::{Deserialize, Serialize};

use crate::contract::IndemnityContract;
use crate::dist::{LossDistribution, LossLaw};
use crate::error::{ensure_domain, Error, Result};
use crate::lambda_fn::LambdaFunction;
use crate::money::ExtendedMoney;
use crate::risk;
use crate::search;

use super::{check_loading, Branch, Diagnostics, SolveReport};

/// `M = d* + (1+θ) E[(X − d*)₊]`.
fn stop_loss_constant(d: &LossDistribution, theta: f64) -> (f64, ExtendedMoney) {
    let d_star = d.quantile_unchecked(theta / (1.0 + theta));
    let tail = d.layer_unchecked(d_star, f64::INFINITY);
    (d_star, (1.0 + theta) * tail + d_star)
}

/// Best stop-loss `(x − l)₊` under the expected-value premium.
pub fn solve_expected_stoploss(d: &LossDistribution, lambda: &LambdaFunction, theta: f64) -> Result<SolveReport> {
    check_loading(theta)?;
    lambda.validate()?;
    let (d_star, m) = stop_loss_constant(d, theta);
    let lvar = risk::lambda_var_value(d, lambda);

    let (contract, value, branch) = match m {
        ExtendedMoney::PlusInfinity => (
            IndemnityContract::StopLoss {
                deductible: ExtendedMoney::PlusInfinity,
            },
            lvar,
            Branch::InfinitePremium,
        ),
        ExtendedMoney::Finite(m) if m <= lvar => (IndemnityContract::stop_loss(d_star), m, Branch::FiniteDeductible),
        ExtendedMoney::Finite(_) => (
            IndemnityContract::StopLoss {
                deductible: ExtendedMoney::PlusInfinity,
            },
            lvar,
            Branch::InfiniteDeductible,
        ),
    };

    let mut diag = Diagnostics::default();
    diag.set("theta_star", theta / (1.0 + theta));
    diag.set("d_star", d_star);
    diag.set("m", m.to_f64());
    diag.set("lambda_var", lvar);

    Ok(SolveReport {
        contract,
        optimal_value: value,
        effective_level: lambda.at(value),
        branch,
        diagnostics: diag,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExistenceFailure {
    /// `θ* ≤ F(0)`: the optimal deductible is zero.
    AtomAtZero,
    /// `F(t) ≥ Λ(t)` for some `t < M`.
    CrossingBeforeM,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExistenceReport {
    pub exists: bool,
    pub m: f64,
    pub theta_star: f64,
    pub cdf_at_zero: f64,
    pub failure: Option<ExistenceFailure>,
    /// Smallest `t` at which the failing condition is observed.
    pub witness: Option<f64>,
}

/// Whether the optimal stop-loss deductible is finite and positive:
/// `θ* > F(0)` and `Λ(t) > F(t)` on all of `[0, M)`.
pub fn existence_positive_finite_deductible(
    d: &LossDistribution,
    lambda: &LambdaFunction,
    theta: f64,
) -> Result<ExistenceReport> {
    check_loading(theta)?;
    lambda.validate()?;
    let theta_star = theta / (1.0 + theta);
    let (_, m) = stop_loss_constant(d, theta);
    let m = m.finite().ok_or(Error::InfinitePremium)?;
    let f0 = d.cdf(0.0);
    let mut report = ExistenceReport {
        exists: false,
        m,
        theta_star,
        cdf_at_zero: f0,
        failure: None,
        witness: None,
    };
    if theta_star <= f0 {
        report.failure = Some(ExistenceFailure::AtomAtZero);
        report.witness = Some(0.0);
        return Ok(report);
    }
    // F − Λ is increasing, so the condition on [0, M) is decided just below M.
    let crossed = |t: f64| d.cdf(t) >= lambda.at(t);
    let last = m.next_down().max(0.0);
    if !crossed(last) {
        report.exists = true;
        return Ok(report);
    }
    let witness = if crossed(0.0) {
        0.0
    } else {
        search::bisect(0.0, last, crossed).1
    };
    report.failure = Some(ExistenceFailure::CrossingBeforeM);
    report.witness = Some(witness);
    Ok(report)
}

/// Sampling used to corroborate the endpoint comparison of the quota-share problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuotaGrid {
    pub samples: usize,
    pub seed: u64,
    /// Number of interior steps; the grid has `steps + 1` points.
    pub steps: usize,
}

impl Default for QuotaGrid {
    fn default() -> Self {
        QuotaGrid {
            samples: 20_000,
            seed: 0x5eed,
            steps: 100,
        }
    }
}

/// Best proportion `p` for `f(x) = p x`; the optimum sits at `p ∈ {0, 1}`.
pub fn solve_quota_share(d: &LossDistribution, lambda: &LambdaFunction, theta: f64) -> Result<SolveReport> {
    solve_quota_share_with(d, lambda, theta, QuotaGrid::default())
}

pub fn solve_quota_share_with(
    d: &LossDistribution,
    lambda: &LambdaFunction,
    theta: f64,
    grid: QuotaGrid,
) -> Result<SolveReport> {
    check_loading(theta)?;
    lambda.validate()?;
    ensure_domain("steps", grid.steps as f64, grid.steps >= 1, "[1, ∞)")?;
    let lvar = risk::lambda_var_value(d, lambda);
    let mut diag = Diagnostics::default();
    diag.set("lambda_var", lvar);

    let Some(mean) = d.mean().finite() else {
        diag.set("mean", f64::INFINITY);
        return Ok(SolveReport {
            contract: IndemnityContract::QuotaShare { proportion: 0.0 },
            optimal_value: lvar,
            effective_level: lambda.at(lvar),
            branch: Branch::InfiniteMean,
            diagnostics: diag,
        });
    };
    let full = (1.0 + theta) * mean;
    let (p, value, branch) = if full <= lvar {
        (1.0, full, Branch::FullShare)
    } else {
        (0.0, lvar, Branch::NoShare)
    };
    diag.set("mean", mean);
    diag.set("full_share_value", full);

    let sample = d.sample(grid.samples, grid.seed)?;
    let mut position = vec![0.0; sample.len()];
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..=grid.steps {
        let q = i as f64 / grid.steps as f64;
        for (out, x) in position.iter_mut().zip(&sample) {
            *out = (1.0 - q) * x + q * full;
        }
        let v = risk::empirical_lambda_var_sorted(&position, lambda);
        diag.probe(q, v, None);
        if v < best.0 {
            best = (v, q);
        }
    }
    diag.set("grid_min", best.0);
    diag.set("grid_argmin", best.1);

    Ok(SolveReport {
        contract: IndemnityContract::QuotaShare { proportion: p },
        optimal_value: value,
        effective_level: lambda.at(value),
        branch,
        diagnostics: diag,
    })
}
