//! ΛVaR engines and the moment-set worst-case VaR.

use serde::{Deserialize, Serialize};

use crate::dist::LossLaw;
use crate::error::{ensure_domain, Error, Result};
use crate::lambda_fn::LambdaFunction;
use crate::search;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaVarMethod {
    DirectRoot,
    Representation,
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaVarResult {
    #[serde(with = "crate::money::float")]
    pub value: f64,
    /// `Λ(value)`.
    pub crossing_level: f64,
    pub method: LambdaVarMethod,
}

/// `inf{x ≥ 0 : F(x) ≥ Λ(x)}`, or the essential supremum when the set is empty.
pub fn lambda_var<D: LossLaw + ?Sized>(law: &D, lambda: &LambdaFunction) -> Result<LambdaVarResult> {
    lambda.validate()?;
    let value = lambda_var_value(law, lambda);
    Ok(LambdaVarResult {
        value,
        crossing_level: lambda.at(value),
        method: LambdaVarMethod::DirectRoot,
    })
}

pub(crate) fn lambda_var_value<D: LossLaw + ?Sized>(law: &D, lambda: &LambdaFunction) -> f64 {
    if let LambdaFunction::Constant { level } = *lambda {
        return law.value_at_risk(level);
    }
    match lambda.steps() {
        Some(steps) => {
            for step in &steps {
                let var = if step.level <= 0.0 {
                    step.start
                } else {
                    law.value_at_risk(step.level)
                };
                let candidate = step.start.max(var);
                if candidate < step.end {
                    return candidate;
                }
            }
            law.value_at_risk(1.0)
        }
        None => {
            let pred = |x: f64| law.cdf(x) >= lambda.at(x);
            let hint = law.value_at_risk(lambda.sup_level());
            let crossing = search::infimum(pred, Some(hint), |_, hi| vec![law.value_at_risk(law.cdf(hi))]);
            if crossing.point.is_finite() {
                crossing.point
            } else {
                law.value_at_risk(1.0)
            }
        }
    }
}

/// `inf_{x ≥ 0} VaR_{Λ(x)}(X) ∨ x`, evaluated without touching the CDF.
///
/// Kept as an independent check on [`lambda_var`]; solvers never call it.
pub fn lambda_var_rep<D: LossLaw + ?Sized>(law: &D, lambda: &LambdaFunction) -> Result<f64> {
    lambda.validate()?;
    let h = |x: f64| law.value_at_risk(lambda.at(x));
    let objective = |x: f64| h(x).max(x);
    if h(0.0) <= 0.0 {
        return Ok(0.0);
    }
    let Some(hi) = search::grow_until(h(0.0).min(1.0), |x| h(x) <= x) else {
        return Ok(law.value_at_risk(1.0));
    };
    let (lo, hi) = search::bisect(0.0, hi, |x| h(x) <= x);
    Ok(objective(lo).min(objective(hi)))
}

/// ΛVaR of the empirical law of `sample`, restricted to the sample atoms: the
/// smallest order statistic `x` with `F_n(x) ≥ Λ(x)`, else the largest value.
pub fn empirical_lambda_var(sample: &[f64], lambda: &LambdaFunction) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::InvalidDistribution("empirical sample is empty".into()));
    }
    if sample.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidDistribution("sample values must be finite and non-negative".into()));
    }
    if sample.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidDistribution("sample must be sorted".into()));
    }
    lambda.validate()?;
    Ok(empirical_lambda_var_sorted(sample, lambda))
}

/// As [`empirical_lambda_var`] with the checks already done by the caller.
pub(crate) fn empirical_lambda_var_sorted(sample: &[f64], lambda: &LambdaFunction) -> f64 {
    let n = sample.len();
    let nf = n as f64;
    let accepted = |i: usize| {
        let x = sample[i];
        let rank = sample[i..].partition_point(|s| *s <= x) + i;
        rank as f64 / nf >= lambda.at(x)
    };
    let (mut lo, mut hi) = (0usize, n);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if accepted(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let k = lo;
    if k == n {
        sample[n - 1]
    } else {
        sample[k]
    }
}

/// `sup VaR_α` over non-negative laws with mean `mu` and standard deviation `sigma`.
pub fn worst_case_var_mv(mu: f64, sigma: f64, alpha: f64) -> Result<f64> {
    ensure_domain("mu", mu, mu.is_finite() && mu >= 0.0, "[0, ∞)")?;
    ensure_domain("sigma", sigma, sigma.is_finite() && sigma >= 0.0, "[0, ∞)")?;
    ensure_domain("alpha", alpha, alpha > 0.0 && alpha < 1.0, "(0, 1)")?;
    Ok(cantelli(mu, sigma, alpha))
}

pub(crate) fn cantelli(mu: f64, sigma: f64, alpha: f64) -> f64 {
    mu + sigma * (alpha / (1.0 - alpha)).sqrt()
}
