//! Admissible indemnities, the laws they induce, and premium rules.
//!
//! Every contract is an increasing, 1-Lipschitz, piecewise-linear map with
//! `f(0) = 0`, so the ceded loss `f(X)` and the retained loss `X − f(X)` are
//! both increasing continuous transforms of `X` and inherit its quantiles.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dist::{LossDistribution, LossLaw};
use crate::error::{ensure_domain, Error, Result};
use crate::lambda_fn::LambdaFunction;
use crate::money::ExtendedMoney;
use crate::risk;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Knot {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IndemnityContract {
    None,
    Full,
    /// `(x − deductible)₊`; an infinite deductible cedes nothing.
    StopLoss { deductible: ExtendedMoney },
    /// `min{(x − deductible)₊, cap}`.
    TruncatedStopLoss { deductible: f64, cap: f64 },
    /// `x ∧ ceiling`.
    DualStopLoss {
        #[serde(with = "crate::money::float")]
        ceiling: f64,
    },
    /// `proportion · x`.
    QuotaShare { proportion: f64 },
    /// Linear interpolation of `knots` (starting at the origin), continued
    /// with `tail_slope` beyond the last knot.
    PiecewiseLinear { knots: Vec<Knot>, tail_slope: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ContractInvariant {
    /// `f(0) ≠ 0`.
    Origin,
    /// A slope exceeds 1.
    Lipschitz,
    /// A slope is negative.
    Monotonicity,
    /// A parameter is negative or not a number.
    Parameter,
    /// Knots are empty or not strictly increasing in `x`.
    Shape,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractViolation {
    pub invariant: ContractInvariant,
    pub index: Option<usize>,
    pub detail: String,
}

impl fmt::Display for ContractViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.invariant {
            ContractInvariant::Origin => "origin",
            ContractInvariant::Lipschitz => "lipschitz",
            ContractInvariant::Monotonicity => "monotonicity",
            ContractInvariant::Parameter => "parameter",
            ContractInvariant::Shape => "shape",
        };
        match self.index {
            Some(i) => write!(f, "{name} violated at segment {i}: {}", self.detail),
            None => write!(f, "{name} violated: {}", self.detail),
        }
    }
}

impl std::error::Error for ContractViolation {}

fn violation(invariant: ContractInvariant, index: Option<usize>, detail: impl Into<String>) -> ContractViolation {
    ContractViolation {
        invariant,
        index,
        detail: detail.into(),
    }
}

fn non_negative(name: &str, v: f64) -> Result<(), ContractViolation> {
    if v >= 0.0 {
        Ok(())
    } else {
        Err(violation(ContractInvariant::Parameter, None, format!("{name} = {v} must be ≥ 0")))
    }
}

/// Increasing continuous piecewise-linear map on `[0, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct LinearMap {
    /// `(x, g(x), slope on [x, next x))`, strictly increasing in `x`, first at the origin.
    pieces: Vec<(f64, f64, f64)>,
}

impl LinearMap {
    /// From `(x, g(x), slope)` triples; a piece of zero length is replaced
    /// by its successor.
    fn raw(triples: &[(f64, f64, f64)]) -> Self {
        let mut pieces: Vec<(f64, f64, f64)> = Vec::with_capacity(triples.len());
        for &p in triples {
            match pieces.last_mut() {
                Some(last) if p.0 <= last.0 => *last = (last.0, p.1, p.2),
                _ => pieces.push(p),
            }
        }
        LinearMap { pieces }
    }

    fn from_knots(knots: &[(f64, f64)], tail: f64) -> Self {
        let mut pieces = Vec::with_capacity(knots.len());
        for (i, &(x, y)) in knots.iter().enumerate() {
            let slope = match knots.get(i + 1) {
                Some(&(x1, y1)) => (y1 - y) / (x1 - x),
                None => tail,
            };
            pieces.push((x, y, slope));
        }
        LinearMap { pieces }
    }

    fn locate(&self, t: f64) -> usize {
        self.pieces.partition_point(|p| p.0 <= t).max(1) - 1
    }

    pub(crate) fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let (x0, y0, s) = self.pieces[self.locate(t)];
        if s == 0.0 {
            y0
        } else {
            y0 + s * (t - x0)
        }
    }

    /// `sup{t ≥ 0 : g(t) ≤ y}`; `−∞` when `y < 0`.
    pub(crate) fn upper_inverse(&self, y: f64) -> f64 {
        if y < 0.0 {
            return f64::NEG_INFINITY;
        }
        let i = self.pieces.partition_point(|p| p.1 <= y) - 1;
        let (x0, y0, s) = self.pieces[i];
        let end = self.pieces.get(i + 1).map_or(f64::INFINITY, |p| p.0);
        if s == 0.0 {
            end
        } else {
            (x0 + (y - y0) / s).min(end)
        }
    }

    /// `(start, end, slope)` for each linear piece.
    pub(crate) fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.pieces.iter().enumerate().map(move |(i, &(x, _, s))| {
            let end = self.pieces.get(i + 1).map_or(f64::INFINITY, |p| p.0);
            (x, end, s)
        })
    }

    /// `t ↦ t − g(t)`.
    pub(crate) fn complement(&self) -> LinearMap {
        LinearMap {
            pieces: self.pieces.iter().map(|&(x, y, s)| (x, x - y, 1.0 - s)).collect(),
        }
    }

    /// `E[g(X)] = Σ slope · ∫ S` over the pieces.
    pub(crate) fn expectation(&self, d: &LossDistribution) -> ExtendedMoney {
        let mut total = ExtendedMoney::ZERO;
        for (a, b, slope) in self.pieces() {
            if slope == 0.0 {
                continue;
            }
            total = total + slope * d.layer_unchecked(a, b);
        }
        total
    }
}

impl IndemnityContract {
    pub fn stop_loss(deductible: f64) -> Self {
        IndemnityContract::StopLoss {
            deductible: ExtendedMoney::from_f64(deductible),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            IndemnityContract::None => "none",
            IndemnityContract::Full => "full",
            IndemnityContract::StopLoss { .. } => "stop_loss",
            IndemnityContract::TruncatedStopLoss { .. } => "truncated_stop_loss",
            IndemnityContract::DualStopLoss { .. } => "dual_stop_loss",
            IndemnityContract::QuotaShare { .. } => "quota_share",
            IndemnityContract::PiecewiseLinear { .. } => "piecewise_linear",
        }
    }

    pub fn check_admissible(&self) -> Result<(), ContractViolation> {
        use ContractInvariant::*;
        match self {
            IndemnityContract::None | IndemnityContract::Full => Ok(()),
            IndemnityContract::StopLoss { deductible } => non_negative("deductible", deductible.to_f64()),
            IndemnityContract::TruncatedStopLoss { deductible, cap } => {
                non_negative("deductible", *deductible)?;
                non_negative("cap", *cap)?;
                if deductible.is_finite() {
                    Ok(())
                } else {
                    Err(violation(Parameter, None, "truncated deductible must be finite"))
                }
            }
            IndemnityContract::DualStopLoss { ceiling } => non_negative("ceiling", *ceiling),
            IndemnityContract::QuotaShare { proportion } => {
                if (0.0..=1.0).contains(proportion) {
                    Ok(())
                } else {
                    Err(violation(Parameter, None, format!("proportion {proportion} not in [0, 1]")))
                }
            }
            IndemnityContract::PiecewiseLinear { knots, tail_slope } => {
                let Some(first) = knots.first() else {
                    return Err(violation(Shape, None, "no knots"));
                };
                if first.x != 0.0 || first.y != 0.0 {
                    return Err(violation(
                        Origin,
                        Some(0),
                        format!("first knot ({}, {}) is not the origin", first.x, first.y),
                    ));
                }
                let check_slope = |i: usize, s: f64| {
                    if s.is_nan() || s < 0.0 {
                        Err(violation(Monotonicity, Some(i), format!("slope {s} is negative")))
                    } else if s > 1.0 {
                        Err(violation(Lipschitz, Some(i), format!("slope {s} exceeds 1")))
                    } else {
                        Ok(())
                    }
                };
                for (i, w) in knots.windows(2).enumerate() {
                    let dx = w[1].x - w[0].x;
                    if !(dx > 0.0 && w[1].x.is_finite()) {
                        return Err(violation(Shape, Some(i), format!("knot x {} not above {}", w[1].x, w[0].x)));
                    }
                    // tolerate rounding in slopes computed from stored knots
                    let dy = w[1].y - w[0].y;
                    if dy < 0.0 {
                        check_slope(i, dy / dx)?;
                    } else if dy > dx * (1.0 + 1e-12) {
                        check_slope(i, dy / dx)?;
                    }
                }
                check_slope(knots.len() - 1, *tail_slope)
            }
        }
    }

    pub(crate) fn linear_map(&self) -> LinearMap {
        match *self {
            IndemnityContract::None => LinearMap::raw(&[(0.0, 0.0, 0.0)]),
            IndemnityContract::Full => LinearMap::raw(&[(0.0, 0.0, 1.0)]),
            IndemnityContract::StopLoss { deductible } => match deductible {
                ExtendedMoney::PlusInfinity => LinearMap::raw(&[(0.0, 0.0, 0.0)]),
                ExtendedMoney::Finite(l) => LinearMap::raw(&[(0.0, 0.0, 0.0), (l, 0.0, 1.0)]),
            },
            IndemnityContract::TruncatedStopLoss { deductible, cap } => {
                LinearMap::raw(&[(0.0, 0.0, 0.0), (deductible, 0.0, 1.0), (deductible + cap, cap, 0.0)])
            }
            IndemnityContract::DualStopLoss { ceiling } => {
                LinearMap::raw(&[(0.0, 0.0, 1.0), (ceiling, ceiling, 0.0)])
            }
            IndemnityContract::QuotaShare { proportion } => LinearMap::raw(&[(0.0, 0.0, proportion)]),
            IndemnityContract::PiecewiseLinear { ref knots, tail_slope } => {
                let points: Vec<(f64, f64)> = knots.iter().map(|k| (k.x, k.y)).collect();
                LinearMap::from_knots(&points, tail_slope)
            }
        }
    }

    /// `f(x)`.
    pub fn apply(&self, x: f64) -> Result<f64> {
        ensure_domain("x", x, x >= 0.0, "[0, ∞]")?;
        self.check_admissible()?;
        Ok(self.linear_map().eval(x))
    }

    /// `x − f(x)`.
    pub fn retained(&self, x: f64) -> Result<f64> {
        ensure_domain("x", x, x >= 0.0, "[0, ∞]")?;
        self.check_admissible()?;
        Ok(self.linear_map().complement().eval(x))
    }

    /// Left quantile of `f(X)`, which is `f(VaR_u(X))`.
    pub fn ceded_quantile(&self, d: &LossDistribution, u: f64) -> Result<f64> {
        self.check_admissible()?;
        let q = d.quantile(u)?;
        Ok(self.linear_map().eval(q))
    }

    /// `E[f(X)]`.
    pub fn expected_indemnity(&self, d: &LossDistribution) -> Result<ExtendedMoney> {
        self.check_admissible()?;
        Ok(self.linear_map().expectation(d))
    }

    /// Law of `f(X)`.
    pub fn ceded_law<'a>(&self, d: &'a LossDistribution) -> Result<CededLaw<'a>> {
        self.check_admissible()?;
        Ok(CededLaw {
            dist: d,
            map: self.linear_map(),
        })
    }

    /// Law of `X − f(X) + premium`.
    pub fn retained_law<'a>(&self, d: &'a LossDistribution, premium: f64) -> Result<RetainedLaw<'a>> {
        self.check_admissible()?;
        ensure_domain("premium", premium, premium.is_finite() && premium >= 0.0, "[0, ∞)")?;
        Ok(RetainedLaw {
            dist: d,
            map: self.linear_map().complement(),
            premium,
        })
    }
}

/// Distribution of the ceded loss `f(X)`.
#[derive(Debug, Clone)]
pub struct CededLaw<'a> {
    dist: &'a LossDistribution,
    map: LinearMap,
}

impl LossLaw for CededLaw<'_> {
    fn cdf(&self, y: f64) -> f64 {
        if y < 0.0 {
            return 0.0;
        }
        self.dist.cdf(self.map.upper_inverse(y))
    }

    fn value_at_risk(&self, level: f64) -> f64 {
        self.map.eval(self.dist.value_at_risk(level))
    }
}

/// Distribution of the retained position `X − f(X) + Π`.
#[derive(Debug, Clone)]
pub struct RetainedLaw<'a> {
    dist: &'a LossDistribution,
    map: LinearMap,
    premium: f64,
}

impl LossLaw for RetainedLaw<'_> {
    fn cdf(&self, y: f64) -> f64 {
        if y < self.premium {
            return 0.0;
        }
        self.dist.cdf(self.map.upper_inverse(y - self.premium))
    }

    fn value_at_risk(&self, level: f64) -> f64 {
        self.map.eval(self.dist.value_at_risk(level)) + self.premium
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PremiumRule {
    /// `(1 + θ) E[f(X)]`.
    ExpectedValue { theta: f64 },
    /// `Λ′VaR(f(X))`.
    PureLambdaVar { lambda: LambdaFunction },
    /// `E[f(X)] + θ (Λ′VaR(f(X)) − E[f(X)])` with `θ ∈ (0, 1]`.
    Mixed { theta: f64, lambda: LambdaFunction },
}

impl PremiumRule {
    pub fn validate(&self) -> Result<()> {
        match self {
            PremiumRule::ExpectedValue { theta } => {
                ensure_domain("theta", *theta, theta.is_finite() && *theta >= 0.0, "[0, ∞)")
            }
            PremiumRule::PureLambdaVar { lambda } => Ok(lambda.validate()?),
            PremiumRule::Mixed { theta, lambda } => {
                ensure_domain("theta", *theta, *theta > 0.0 && *theta <= 1.0, "(0, 1]")?;
                Ok(lambda.validate()?)
            }
        }
    }

    /// `θ / (1 + θ)` for the expected-value rule.
    pub fn theta_star(&self) -> Option<f64> {
        match self {
            PremiumRule::ExpectedValue { theta } => Some(theta / (1.0 + theta)),
            _ => None,
        }
    }

    /// `Π(f(X))`; infinite when the rule needs an infinite mean.
    pub fn premium(&self, d: &LossDistribution, f: &IndemnityContract) -> Result<ExtendedMoney> {
        self.validate()?;
        f.check_admissible()?;
        let map = f.linear_map();
        match self {
            PremiumRule::ExpectedValue { theta } => Ok((1.0 + theta) * map.expectation(d)),
            PremiumRule::PureLambdaVar { lambda } => {
                let law = CededLaw { dist: d, map };
                Ok(ExtendedMoney::from_f64(risk::lambda_var_value(&law, lambda)))
            }
            PremiumRule::Mixed { theta, lambda } => {
                let mean = map.expectation(d);
                let law = CededLaw { dist: d, map };
                let var = ExtendedMoney::from_f64(risk::lambda_var_value(&law, lambda));
                match mean {
                    ExtendedMoney::PlusInfinity => Ok(ExtendedMoney::PlusInfinity),
                    ExtendedMoney::Finite(m) => Ok((1.0 - theta) * ExtendedMoney::Finite(m) + *theta * var),
                }
            }
        }
    }
}

/// `Π` for contract `f` under `rule`.
pub fn premium(d: &LossDistribution, f: &IndemnityContract, rule: &PremiumRule) -> Result<ExtendedMoney> {
    rule.premium(d, f)
}

/// `ΛVaR(X − f(X) + Π(f(X)))`.
pub fn retained_position_value(
    d: &LossDistribution,
    f: &IndemnityContract,
    rule: &PremiumRule,
    lambda: &LambdaFunction,
) -> Result<f64> {
    lambda.validate()?;
    let pi = rule.premium(d, f)?.finite().ok_or(Error::InfinitePremium)?;
    let law = f.retained_law(d, pi)?;
    Ok(risk::lambda_var_value(&law, lambda))
}
