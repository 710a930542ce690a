use crate::contract::IndemnityContract;
use crate::dist::LossDistribution;
use crate::error::{ensure_domain, Result};
use crate::lambda_fn::LambdaFunction;
use crate::money::ExtendedMoney;
use crate::search;

use super::{snap_candidates, solve_expected_general, Branch, Diagnostics, SolveReport};

/// Worst case over laws with density ratio at most `1/β` against `X`: the
/// expected-value problem with `Λ_β = βΛ + 1 − β` in place of `Λ`.
pub fn solve_robust_lr(d: &LossDistribution, lambda: &LambdaFunction, theta: f64, beta: f64) -> Result<SolveReport> {
    let distorted = lambda.lr_distort(beta)?;
    solve_expected_general(d, &distorted, theta)
}

/// Worst case over all non-negative laws with mean `mu` and standard
/// deviation `sigma`, ceding a stop-loss under `(1+θ)E[f]`.
pub fn solve_robust_mv(mu: f64, sigma: f64, lambda: &LambdaFunction, theta: f64) -> Result<SolveReport> {
    ensure_domain("mu", mu, mu.is_finite() && mu > 0.0, "(0, ∞)")?;
    ensure_domain("sigma", sigma, sigma.is_finite() && sigma >= 0.0, "[0, ∞)")?;
    ensure_domain("theta", theta, theta.is_finite() && theta > 0.0, "(0, ∞)")?;
    lambda.validate()?;
    let theta_star = theta / (1.0 + theta);
    let low_loading = theta <= sigma * sigma / (mu * mu);

    let plateau = if low_loading {
        (1.0 + theta) * mu
    } else {
        mu + sigma * theta.sqrt()
    };
    let psi_level = |level: f64| {
        if level >= theta_star {
            plateau
        } else if low_loading {
            mu / (1.0 - level)
        } else {
            mu + sigma * (level / (1.0 - level)).sqrt()
        }
    };
    let psi = |x: f64| psi_level(lambda.at(x));
    let breaks = lambda.breakpoints();
    let crossing = search::infimum(|x| psi(x) <= x, Some(psi(0.0)), |lo, hi| snap_candidates(&breaks, psi, lo, hi));
    let x_star = crossing.point;
    let insured = x_star == plateau;

    let (deductible, branch) = match (low_loading, insured) {
        (true, true) => (ExtendedMoney::ZERO, Branch::MvLowLoadingInsured),
        (true, false) => (ExtendedMoney::PlusInfinity, Branch::MvLowLoadingUninsured),
        (false, true) => (
            ExtendedMoney::Finite(mu - sigma * (1.0 - theta) / (2.0 * theta.sqrt())),
            Branch::MvHighLoadingInsured,
        ),
        (false, false) => (ExtendedMoney::PlusInfinity, Branch::MvHighLoadingUninsured),
    };

    let mut diag = Diagnostics::default();
    diag.probe(0.0, psi(0.0), None);
    diag.probe(x_star, psi(x_star), None);
    for b in &breaks {
        diag.probe(*b, psi(*b), Some(psi_level(lambda.left_limit(*b))));
    }
    diag.set("theta_star", theta_star);
    diag.set("plateau", plateau);
    diag.set("deductible", deductible.to_f64());

    Ok(SolveReport {
        contract: IndemnityContract::StopLoss { deductible },
        optimal_value: x_star,
        effective_level: lambda.at(x_star),
        branch,
        diagnostics: diag,
    })
}
