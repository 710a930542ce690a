//! Decreasing probability-level functions `Λ : [0, ∞) → [0, 1]`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_domain, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "RawLambda")]
pub enum LambdaFunction {
    Constant { level: f64 },
    /// `high` on `[0, threshold)`, `low` on `[threshold, ∞)`.
    TwoLevel { high: f64, low: f64, threshold: f64 },
    /// `a·e^{-k x} + c`.
    ExpAffine { a: f64, k: f64, c: f64 },
    /// `levels[i]` on `[breakpoints[i-1], breakpoints[i])`, with
    /// `breakpoints[-1] = 0` and `breakpoints[n] = ∞`.
    PiecewiseConstant { breakpoints: Vec<f64>, levels: Vec<f64> },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawLambda {
    Constant { level: f64 },
    TwoLevel { high: f64, low: f64, threshold: f64 },
    ExpAffine { a: f64, k: f64, c: f64 },
    PiecewiseConstant { breakpoints: Vec<f64>, levels: Vec<f64> },
}

impl TryFrom<RawLambda> for LambdaFunction {
    type Error = LambdaViolation;

    fn try_from(raw: RawLambda) -> Result<Self, LambdaViolation> {
        let l = match raw {
            RawLambda::Constant { level } => LambdaFunction::Constant { level },
            RawLambda::TwoLevel { high, low, threshold } => LambdaFunction::TwoLevel { high, low, threshold },
            RawLambda::ExpAffine { a, k, c } => LambdaFunction::ExpAffine { a, k, c },
            RawLambda::PiecewiseConstant { breakpoints, levels } => {
                LambdaFunction::PiecewiseConstant { breakpoints, levels }
            }
        };
        l.validate()?;
        Ok(l)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaInvariant {
    /// A level or parameter lies outside its allowed range.
    Range,
    /// A level increases.
    Monotonicity,
    IdenticallyZero,
    /// Breakpoints are not a strictly increasing list matching the levels.
    Shape,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaViolation {
    pub invariant: LambdaInvariant,
    /// Offending level or breakpoint index, where one exists.
    pub index: Option<usize>,
    pub detail: String,
}

impl fmt::Display for LambdaViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.invariant {
            LambdaInvariant::Range => "range",
            LambdaInvariant::Monotonicity => "monotonicity",
            LambdaInvariant::IdenticallyZero => "identically zero",
            LambdaInvariant::Shape => "shape",
        };
        match self.index {
            Some(i) => write!(f, "{name} violated at index {i}: {}", self.detail),
            None => write!(f, "{name} violated: {}", self.detail),
        }
    }
}

impl std::error::Error for LambdaViolation {}

fn violation(invariant: LambdaInvariant, index: Option<usize>, detail: impl Into<String>) -> LambdaViolation {
    LambdaViolation {
        invariant,
        index,
        detail: detail.into(),
    }
}

fn unit(v: f64) -> bool {
    (0.0..=1.0).contains(&v)
}

/// A maximal interval `[start, end)` on which a step function is constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub start: f64,
    pub end: f64,
    pub level: f64,
}

impl LambdaFunction {
    pub fn constant(level: f64) -> Result<Self> {
        let l = LambdaFunction::Constant { level };
        l.validate()?;
        Ok(l)
    }

    pub fn two_level(high: f64, low: f64, threshold: f64) -> Result<Self> {
        let l = LambdaFunction::TwoLevel { high, low, threshold };
        l.validate()?;
        Ok(l)
    }

    pub fn exp_affine(a: f64, k: f64, c: f64) -> Result<Self> {
        let l = LambdaFunction::ExpAffine { a, k, c };
        l.validate()?;
        Ok(l)
    }

    pub fn piecewise_constant(breakpoints: Vec<f64>, levels: Vec<f64>) -> Result<Self> {
        let l = LambdaFunction::PiecewiseConstant { breakpoints, levels };
        l.validate()?;
        Ok(l)
    }

    /// `Λ(x)`; a step function takes its right-hand value at a breakpoint.
    pub fn eval(&self, x: f64) -> Result<f64> {
        ensure_domain("x", x, x >= 0.0, "[0, ∞]")?;
        Ok(self.at(x))
    }

    /// `Λ(x)` without the domain check; negative `x` evaluates at 0.
    pub fn at(&self, x: f64) -> f64 {
        let x = x.max(0.0);
        match *self {
            LambdaFunction::Constant { level } => level,
            LambdaFunction::TwoLevel { high, low, threshold } => {
                if x < threshold {
                    high
                } else {
                    low
                }
            }
            LambdaFunction::ExpAffine { a, k, c } => {
                if x == f64::INFINITY {
                    c
                } else {
                    a * (-k * x).exp() + c
                }
            }
            LambdaFunction::PiecewiseConstant {
                ref breakpoints,
                ref levels,
            } => levels[breakpoints.partition_point(|b| *b <= x)],
        }
    }

    /// `Λ(x−)`, which differs from `Λ(x)` only at a step.
    pub fn left_limit(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return self.at(0.0);
        }
        match *self {
            LambdaFunction::TwoLevel { high, low, threshold } => {
                if x <= threshold {
                    high
                } else {
                    low
                }
            }
            LambdaFunction::PiecewiseConstant {
                ref breakpoints,
                ref levels,
            } => levels[breakpoints.partition_point(|b| *b < x)],
            _ => self.at(x),
        }
    }

    /// `sup Λ = Λ(0)`.
    pub fn sup_level(&self) -> f64 {
        self.at(0.0)
    }

    /// `inf Λ = lim Λ(x)` as `x → ∞`.
    pub fn inf_level(&self) -> f64 {
        self.at(f64::INFINITY)
    }

    /// Points where `Λ` jumps.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            LambdaFunction::TwoLevel { threshold, high, low } if high != low && *threshold > 0.0 => {
                vec![*threshold]
            }
            LambdaFunction::PiecewiseConstant { breakpoints, .. } => breakpoints.clone(),
            _ => Vec::new(),
        }
    }

    /// Constant pieces for step-shaped variants, `None` for `ExpAffine`.
    pub fn steps(&self) -> Option<Vec<Step>> {
        match *self {
            LambdaFunction::Constant { level } => Some(vec![Step {
                start: 0.0,
                end: f64::INFINITY,
                level,
            }]),
            LambdaFunction::TwoLevel { high, low, threshold } => {
                let mut out = Vec::with_capacity(2);
                if threshold > 0.0 {
                    out.push(Step {
                        start: 0.0,
                        end: threshold,
                        level: high,
                    });
                }
                out.push(Step {
                    start: threshold,
                    end: f64::INFINITY,
                    level: low,
                });
                Some(out)
            }
            LambdaFunction::ExpAffine { .. } => None,
            LambdaFunction::PiecewiseConstant {
                ref breakpoints,
                ref levels,
            } => {
                let mut out = Vec::with_capacity(levels.len());
                let mut start = 0.0;
                for (i, level) in levels.iter().enumerate() {
                    let end = breakpoints.get(i).copied().unwrap_or(f64::INFINITY);
                    if end > start {
                        out.push(Step {
                            start,
                            end,
                            level: *level,
                        });
                    }
                    start = end;
                }
                Some(out)
            }
        }
    }

    pub fn validate(&self) -> Result<(), LambdaViolation> {
        use LambdaInvariant::*;
        match *self {
            LambdaFunction::Constant { level } => {
                if !unit(level) {
                    return Err(violation(Range, None, format!("level {level} not in [0, 1]")));
                }
                if level == 0.0 {
                    return Err(violation(IdenticallyZero, None, "constant level is 0"));
                }
            }
            LambdaFunction::TwoLevel { high, low, threshold } => {
                if !(threshold.is_finite() && threshold >= 0.0) {
                    return Err(violation(Range, None, format!("threshold {threshold} not in [0, ∞)")));
                }
                if !(low > 0.0 && high < 1.0 && unit(low) && unit(high)) {
                    return Err(violation(Range, None, format!("levels ({high}, {low}) not in (0, 1)")));
                }
                if low >= high {
                    return Err(violation(
                        Monotonicity,
                        Some(1),
                        format!("low level {low} is not below high level {high}"),
                    ));
                }
            }
            LambdaFunction::ExpAffine { a, k, c } => {
                if !(a >= 0.0 && c >= 0.0 && a.is_finite() && c.is_finite()) {
                    return Err(violation(Range, None, format!("a = {a}, c = {c} must be non-negative")));
                }
                if !(k > 0.0 && k.is_finite()) {
                    return Err(violation(Range, None, format!("decay k = {k} must be positive")));
                }
                if a + c > 1.0 {
                    return Err(violation(Range, None, format!("a + c = {} exceeds 1", a + c)));
                }
                if a + c == 0.0 {
                    return Err(violation(IdenticallyZero, None, "a = c = 0"));
                }
            }
            LambdaFunction::PiecewiseConstant {
                ref breakpoints,
                ref levels,
            } => {
                if levels.len() != breakpoints.len() + 1 {
                    return Err(violation(
                        Shape,
                        None,
                        format!(
                            "{} breakpoints need {} levels, got {}",
                            breakpoints.len(),
                            breakpoints.len() + 1,
                            levels.len()
                        ),
                    ));
                }
                for (i, b) in breakpoints.iter().enumerate() {
                    let prev = if i == 0 { 0.0 } else { breakpoints[i - 1] };
                    if !(b.is_finite() && *b > prev) {
                        return Err(violation(Shape, Some(i), format!("breakpoint {b} not above {prev}")));
                    }
                }
                for (i, l) in levels.iter().enumerate() {
                    if !unit(*l) {
                        return Err(violation(Range, Some(i), format!("level {l} not in [0, 1]")));
                    }
                    if i > 0 && *l > levels[i - 1] {
                        return Err(violation(
                            Monotonicity,
                            Some(i),
                            format!("level {l} exceeds the preceding {}", levels[i - 1]),
                        ));
                    }
                }
                if levels[0] == 0.0 {
                    return Err(violation(IdenticallyZero, Some(0), "every level is 0"));
                }
            }
        }
        Ok(())
    }

    /// `Λ_β = βΛ + 1 − β`, the worst-case level over the likelihood-ratio set.
    pub fn lr_distort(&self, beta: f64) -> Result<LambdaFunction> {
        ensure_domain("beta", beta, beta > 0.0 && beta <= 1.0, "(0, 1]")?;
        let t = |l: f64| beta * l + (1.0 - beta);
        Ok(match *self {
            LambdaFunction::Constant { level } => LambdaFunction::Constant { level: t(level) },
            LambdaFunction::TwoLevel { high, low, threshold } => LambdaFunction::TwoLevel {
                high: t(high),
                low: t(low),
                threshold,
            },
            LambdaFunction::ExpAffine { a, k, c } => LambdaFunction::ExpAffine {
                a: beta * a,
                k,
                c: t(c),
            },
            LambdaFunction::PiecewiseConstant {
                ref breakpoints,
                ref levels,
            } => LambdaFunction::PiecewiseConstant {
                breakpoints: breakpoints.clone(),
                levels: levels.iter().map(|l| t(*l)).collect(),
            },
        })
    }
}
