//! Lambda-Value-at-Risk of insurance positions and optimal indemnity design.
//!
//! `ΛVaR(X) = inf{x ≥ 0 : P(X ≤ x) ≥ Λ(x)}` for a decreasing level function
//! `Λ`. The [`solve`] module finds indemnities minimizing the ΛVaR of the
//! retained position under expected-value, ΛVaR-based and mixed premiums,
//! and under likelihood-ratio and moment uncertainty. [`oracle`] re-derives
//! the optima by brute force on discretized losses.
//!
//! ```
//! use lambdavar_core::{lambda_var, LambdaFunction, LossDistribution};
//!
//! let x = LossDistribution::exponential(1.0).unwrap();
//! let l = LambdaFunction::two_level(0.9, 0.8, 1.0).unwrap();
//! let r = lambda_var(&x, &l).unwrap();
//! assert!((r.value - 5f64.ln()).abs() < 1e-12);
//! ```

pub mod contract;
pub mod dist;
pub mod error;
pub mod lambda_fn;
pub mod money;
pub mod oracle;
pub mod risk;
pub mod search;
pub mod solve;

pub use contract::{
    premium, retained_position_value, ContractInvariant, ContractViolation, IndemnityContract, Knot, PremiumRule,
};
pub use dist::{EmpiricalSample, LossDistribution, LossLaw};
pub use error::{Error, Result};
pub use lambda_fn::{LambdaFunction, LambdaInvariant, LambdaViolation};
pub use money::ExtendedMoney;
pub use risk::{empirical_lambda_var, lambda_var, lambda_var_rep, worst_case_var_mv, LambdaVarMethod, LambdaVarResult};
pub use solve::{
    existence_positive_finite_deductible, g_eval, solve_expected_general, solve_expected_stoploss,
    solve_lambdavar_premium, solve_mixed_premium, solve_quota_share, solve_robust_lr, solve_robust_mv, Branch,
    Diagnostics, ExistenceReport, Probe, SolveReport,
};
