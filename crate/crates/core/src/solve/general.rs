use crate::contract::IndemnityContract;
use crate::dist::LossDistribution;
use crate::error::{ensure_domain, Result};
use crate::lambda_fn::LambdaFunction;
use crate::risk;
use crate::search;

use super::{check_loading, snap_candidates, Branch, Diagnostics, SolveReport};

/// `G` for fixed `(X, θ)`: `d* ∧ v + (1+θ) ∫_{d*}^{d* ∨ v} S`, `v = VaR_ℓ(X)`.
pub(crate) struct ExpectedValueG<'a> {
    pub dist: &'a LossDistribution,
    pub theta: f64,
    pub d_star: f64,
}

impl<'a> ExpectedValueG<'a> {
    pub fn new(dist: &'a LossDistribution, theta: f64) -> Self {
        let theta_star = theta / (1.0 + theta);
        ExpectedValueG {
            dist,
            theta,
            d_star: dist.quantile_unchecked(theta_star),
        }
    }

    pub fn at_level(&self, level: f64) -> f64 {
        let v = self.dist.quantile_unchecked(level);
        let layer = self.dist.layer_unchecked(self.d_star, v.max(self.d_star));
        ((1.0 + self.theta) * layer).to_f64() + self.d_star.min(v)
    }
}

/// `G(x)` for the expected-value premium with loading `theta`.
pub fn g_eval(d: &LossDistribution, lambda: &LambdaFunction, theta: f64, x: f64) -> Result<f64> {
    check_loading(theta)?;
    ensure_domain("x", x, x >= 0.0, "[0, ∞]")?;
    lambda.validate()?;
    Ok(ExpectedValueG::new(d, theta).at_level(lambda.at(x)))
}

/// Optimal indemnity over all admissible contracts under `(1+θ)E[f(X)]`:
/// `x* = inf{x : G(x) ≤ x}` and a truncated stop-loss from `d*` up to
/// `VaR_{Λ(x*)}(X)`.
pub fn solve_expected_general(d: &LossDistribution, lambda: &LambdaFunction, theta: f64) -> Result<SolveReport> {
    check_loading(theta)?;
    lambda.validate()?;
    let g = ExpectedValueG::new(d, theta);
    let at = |x: f64| g.at_level(lambda.at(x));
    let breaks = lambda.breakpoints();
    let g0 = at(0.0);
    let crossing = search::infimum(|x| at(x) <= x, Some(g0), |lo, hi| snap_candidates(&breaks, at, lo, hi));
    let x_star = crossing.point;
    let level = lambda.at(x_star);
    let ceiling = d.quantile_unchecked(level);

    let (contract, branch) = if g.d_star <= ceiling {
        (
            IndemnityContract::TruncatedStopLoss {
                deductible: g.d_star,
                cap: ceiling - g.d_star,
            },
            Branch::TruncatedStopLoss,
        )
    } else {
        (IndemnityContract::None, Branch::NoInsurance)
    };

    let mut diag = Diagnostics::default();
    diag.probe(0.0, g0, None);
    diag.probe(x_star, at(x_star), None);
    for b in &breaks {
        diag.probe(*b, at(*b), Some(g.at_level(lambda.left_limit(*b))));
    }
    diag.set("theta_star", theta / (1.0 + theta));
    diag.set("d_star", g.d_star);
    diag.set("ceiling_quantile", ceiling);
    diag.set("lambda_var", risk::lambda_var_value(d, lambda));

    Ok(SolveReport {
        contract,
        optimal_value: x_star,
        effective_level: level,
        branch,
        diagnostics: diag,
    })
}
