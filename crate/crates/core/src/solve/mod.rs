//! Optimal-indemnity solvers.
//!
//! Each solver returns a [`SolveReport`] whose contract is one of the named
//! variants of [`IndemnityContract`] and whose value is the minimal ΛVaR of
//! the retained position.

mod general;
mod premium;
mod robust;
mod stoploss;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::contract::IndemnityContract;
use crate::error::{ensure_domain, Result};

pub use general::{g_eval, solve_expected_general};
pub use premium::{solve_lambdavar_premium, solve_mixed_premium};
pub use robust::{solve_robust_lr, solve_robust_mv};
pub use stoploss::{
    existence_positive_finite_deductible, solve_expected_stoploss, solve_quota_share,
    solve_quota_share_with, ExistenceFailure, ExistenceReport, QuotaGrid,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Deductible below the cap quantile: a truncated stop-loss is bought.
    TruncatedStopLoss,
    NoInsurance,
    /// `M ≤ ΛVaR(X)`: stop-loss at `VaR_{θ*}`.
    FiniteDeductible,
    /// `M > ΛVaR(X)`.
    InfiniteDeductible,
    /// `E[(X − d*)₊] = ∞`.
    InfinitePremium,
    FullInsurance,
    DualStopLoss,
    FullShare,
    NoShare,
    /// `E[X] = ∞`: any positive share has an infinite premium.
    InfiniteMean,
    /// `θ ≤ σ²/μ²` and the fixed point sits on the loaded-mean plateau.
    MvLowLoadingInsured,
    MvLowLoadingUninsured,
    /// `θ > σ²/μ²` and the fixed point sits on `μ + σ√θ`.
    MvHighLoadingInsured,
    MvHighLoadingUninsured,
}

/// One evaluation of the solver's comparison function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    #[serde(with = "crate::money::float")]
    pub x: f64,
    #[serde(with = "crate::money::float")]
    pub value: f64,
    /// Value with `Λ(x−)` in place of `Λ(x)`, recorded at steps of `Λ`.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::money::float::option")]
    pub left_limit: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub probes: Vec<Probe>,
    #[serde(with = "crate::money::float::map")]
    pub quantities: BTreeMap<String, f64>,
}

impl Diagnostics {
    pub(crate) fn probe(&mut self, x: f64, value: f64, left_limit: Option<f64>) {
        self.probes.push(Probe { x, value, left_limit });
    }

    pub(crate) fn set(&mut self, name: &str, value: f64) {
        self.quantities.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.quantities.get(name).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub contract: IndemnityContract,
    #[serde(with = "crate::money::float")]
    pub optimal_value: f64,
    /// `Λ(x*)`, or `Λ_β(x*)` for the likelihood-ratio problem.
    pub effective_level: f64,
    pub branch: Branch,
    pub diagnostics: Diagnostics,
}

pub(crate) fn check_loading(theta: f64) -> Result<()> {
    ensure_domain("theta", theta, theta.is_finite() && theta >= 0.0, "[0, ∞)")
}

/// Steps of `Λ` inside `(lo, hi)` plus `value(hi)`, the candidates an
/// infimum over a step function can land on.
pub(crate) fn snap_candidates(breaks: &[f64], value: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Vec<f64> {
    let mut out: Vec<f64> = breaks.iter().copied().filter(|b| *b > lo && *b < hi).collect();
    out.push(value(hi));
    out
}
