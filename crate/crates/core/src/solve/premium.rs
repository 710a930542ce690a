use crate::contract::IndemnityContract;
use crate::dist::LossDistribution;
use crate::error::{ensure_domain, Result};
use crate::lambda_fn::LambdaFunction;
use crate::risk;
use crate::search;

use super::{snap_candidates, Branch, Diagnostics, SolveReport};

/// Optimal contract when the premium is `Λ′VaR(f(X))`: all or nothing.
pub fn solve_lambdavar_premium(
    d: &LossDistribution,
    lambda: &LambdaFunction,
    premium_lambda: &LambdaFunction,
) -> Result<SolveReport> {
    lambda.validate()?;
    premium_lambda.validate()?;
    let own = risk::lambda_var_value(d, lambda);
    let priced = risk::lambda_var_value(d, premium_lambda);
    let (contract, value, branch) = if priced < own {
        (IndemnityContract::Full, priced, Branch::FullInsurance)
    } else {
        (IndemnityContract::None, own, Branch::NoInsurance)
    };
    let mut diag = Diagnostics::default();
    diag.set("lambda_var", own);
    diag.set("premium_lambda_var", priced);
    Ok(SolveReport {
        contract,
        optimal_value: value,
        effective_level: lambda.at(value),
        branch,
        diagnostics: diag,
    })
}

/// Optimal contract under `E[f] + θ(Λ′VaR(f(X)) − E[f])`, a dual stop-loss
/// `x ∧ VaR_{Λ(x*)}(X)` with
/// `x* = inf{x : (1−θ) E[X ∧ v(x)] + θ (Λ′VaR(X) ∧ v(x)) ≤ x}`, `v = VaR_{Λ(·)}`.
pub fn solve_mixed_premium(
    d: &LossDistribution,
    lambda: &LambdaFunction,
    premium_lambda: &LambdaFunction,
    theta: f64,
) -> Result<SolveReport> {
    ensure_domain("theta", theta, theta > 0.0 && theta <= 1.0, "(0, 1]")?;
    lambda.validate()?;
    premium_lambda.validate()?;
    let priced = risk::lambda_var_value(d, premium_lambda);
    let phi_level = |level: f64| {
        let v = d.quantile_unchecked(level);
        let capped_mean = d.layer_unchecked(0.0, v);
        ((1.0 - theta) * capped_mean).to_f64() + theta * priced.min(v)
    };
    let phi = |x: f64| phi_level(lambda.at(x));
    let breaks = lambda.breakpoints();
    let phi0 = phi(0.0);
    let crossing = search::infimum(|x| phi(x) <= x, Some(phi0), |lo, hi| snap_candidates(&breaks, phi, lo, hi));
    let x_star = crossing.point;
    let level = lambda.at(x_star);
    let ceiling = d.quantile_unchecked(level);

    let mut diag = Diagnostics::default();
    diag.probe(0.0, phi0, None);
    diag.probe(x_star, phi(x_star), None);
    for b in &breaks {
        diag.probe(*b, phi(*b), Some(phi_level(lambda.left_limit(*b))));
    }
    diag.set("premium_lambda_var", priced);
    diag.set("ceiling_quantile", ceiling);
    diag.set("phi_at_x_star", phi(x_star));
    diag.set("lambda_var", risk::lambda_var_value(d, lambda));

    Ok(SolveReport {
        contract: IndemnityContract::DualStopLoss { ceiling },
        optimal_value: x_star,
        effective_level: level,
        branch: Branch::DualStopLoss,
        diagnostics: diag,
    })
}
