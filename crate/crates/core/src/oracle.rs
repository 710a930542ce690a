//! Brute-force checks for the analytic optima on discretized losses.

pub mod quadrature;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contract::{IndemnityContract, Knot, LinearMap, PremiumRule};
use crate::dist::LossDistribution;
use crate::error::{ensure_domain, Error, Result};
use crate::lambda_fn::LambdaFunction;
use crate::risk::cantelli;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub value: f64,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub n: usize,
    pub scheme: String,
}

/// A finite law with sorted atoms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteInstance {
    atoms: Vec<Atom>,
    /// `cumulative[i] = P(X ≤ atoms[i].value)` counting earlier ties.
    #[serde(skip)]
    cumulative: Vec<f64>,
    pub provenance: Provenance,
}

impl DiscreteInstance {
    pub fn new(mut atoms: Vec<Atom>, provenance: Provenance) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("no atoms".into()));
        }
        if atoms
            .iter()
            .any(|a| !(a.value.is_finite() && a.value >= 0.0 && a.prob > 0.0 && a.prob <= 1.0))
        {
            return Err(Error::InvalidDistribution("atoms need finite non-negative values and probabilities in (0, 1]".into()));
        }
        let total: f64 = atoms.iter().map(|a| a.prob).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        atoms.sort_by(|a, b| a.value.total_cmp(&b.value));
        let mut acc = 0.0;
        let cumulative: Vec<f64> = atoms
            .iter()
            .map(|a| {
                acc += a.prob;
                acc
            })
            .collect();
        Ok(DiscreteInstance {
            atoms,
            cumulative,
            provenance,
        })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn values(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.value).collect()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn max_value(&self) -> f64 {
        self.atoms.last().map_or(0.0, |a| a.value)
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.value * a.prob).sum()
    }

    /// Largest gap between consecutive atoms whose cumulative probability
    /// lies within `width` of `level`.
    pub fn spacing_near(&self, level: f64, width: f64) -> f64 {
        let mut gap: f64 = 0.0;
        for i in 1..self.atoms.len() {
            let c = self.cumulative[i - 1];
            if (c - level).abs() <= width {
                gap = gap.max(self.atoms[i].value - self.atoms[i - 1].value);
            }
        }
        gap
    }

    /// Order-statistic ΛVaR of the instance itself.
    pub fn lambda_var(&self, lambda: &LambdaFunction) -> f64 {
        let values = self.values();
        lambda_var_weighted(&values, &self.cumulative, lambda)
    }

    /// ΛVaR of `X − f(X) + Π(f(X))` on this instance.
    pub fn position_value(&self, f: &IndemnityContract, rule: &PremiumRule, lambda: &LambdaFunction) -> Result<f64> {
        f.check_admissible()?;
        rule.validate()?;
        lambda.validate()?;
        let mut scratch = Scratch::new(self.len());
        Ok(self.position_value_with(&f.linear_map(), rule, lambda, &mut scratch))
    }

    fn position_value_with(
        &self,
        map: &LinearMap,
        rule: &PremiumRule,
        lambda: &LambdaFunction,
        scratch: &mut Scratch,
    ) -> f64 {
        let retained = map.complement();
        let mut mean = 0.0;
        for (i, a) in self.atoms.iter().enumerate() {
            let ceded = map.eval(a.value);
            mean += a.prob * ceded;
            scratch.ceded[i] = ceded;
            scratch.position[i] = retained.eval(a.value);
        }
        monotone(&mut scratch.ceded);
        monotone(&mut scratch.position);
        let premium = match rule {
            PremiumRule::ExpectedValue { theta } => (1.0 + theta) * mean,
            PremiumRule::PureLambdaVar { lambda } => lambda_var_weighted(&scratch.ceded, &self.cumulative, lambda),
            PremiumRule::Mixed { theta, lambda } => {
                let v = lambda_var_weighted(&scratch.ceded, &self.cumulative, lambda);
                (1.0 - theta) * mean + theta * v
            }
        };
        for t in scratch.position.iter_mut() {
            *t += premium;
        }
        lambda_var_weighted(&scratch.position, &self.cumulative, lambda)
    }
}

struct Scratch {
    ceded: Vec<f64>,
    position: Vec<f64>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            ceded: vec![0.0; n],
            position: vec![0.0; n],
        }
    }
}

/// Removes rounding-level decreases so order statistics stay ordered.
fn monotone(values: &mut [f64]) {
    for i in 1..values.len() {
        if values[i] < values[i - 1] {
            values[i] = values[i - 1];
        }
    }
}

/// Smallest sorted value `v` with `P(V ≤ v) ≥ Λ(v)`, else the largest value.
fn lambda_var_weighted(values: &[f64], cumulative: &[f64], lambda: &LambdaFunction) -> f64 {
    let n = values.len();
    let accepted = |i: usize| {
        let x = values[i];
        let last = i + values[i..].partition_point(|v| *v <= x) - 1;
        cumulative[last] >= lambda.at(x)
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
    values[lo.min(n - 1)]
}

/// Equiprobable atoms at the midpoint quantiles `VaR_{(k − ½)/n}`.
pub fn discretize(d: &LossDistribution, n: usize) -> Result<DiscreteInstance> {
    ensure_domain("n", n as f64, n >= 2, "[2, ∞)")?;
    let p = 1.0 / n as f64;
    let atoms: Vec<Atom> = (1..=n)
        .map(|k| Atom {
            value: d.quantile_unchecked((k as f64 - 0.5) / n as f64),
            prob: p,
        })
        .collect();
    let source = match d {
        LossDistribution::Empirical { sample } => format!("empirical({} values)", sample.len()),
        other => format!("{other:?}"),
    };
    Ok(DiscreteInstance {
        atoms,
        cumulative: (1..=n).map(|k| k as f64 / n as f64).collect(),
        provenance: Provenance {
            source,
            n,
            scheme: "midpoint_quantile".into(),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearchResult {
    pub contract: IndemnityContract,
    pub value: f64,
    pub deductible: f64,
    pub cap: f64,
    /// Lattice spacing.
    pub cell: f64,
    pub evaluated: usize,
}

/// Exhaustive minimum over a `grid × grid` lattice of truncated stop-losses
/// spanning `[0, max atom]` in both deductible and cap.
pub fn grid_search_truncated_stoploss(
    inst: &DiscreteInstance,
    lambda: &LambdaFunction,
    theta: f64,
    grid: usize,
) -> Result<GridSearchResult> {
    ensure_domain("grid", grid as f64, grid >= 10, "[10, ∞)")?;
    let h = inst.max_value() / (grid - 1) as f64;
    let axis: Vec<f64> = (0..grid).map(|i| i as f64 * h).collect();
    let mut out = grid_search_lattice(inst, lambda, theta, &axis, &axis)?;
    out.cell = h;
    Ok(out)
}

/// Minimum over an explicit lattice `deductibles × caps`.
pub fn grid_search_lattice(
    inst: &DiscreteInstance,
    lambda: &LambdaFunction,
    theta: f64,
    deductibles: &[f64],
    caps: &[f64],
) -> Result<GridSearchResult> {
    ensure_domain("theta", theta, theta.is_finite() && theta >= 0.0, "[0, ∞)")?;
    lambda.validate()?;
    if deductibles.is_empty() || caps.is_empty() {
        return Err(Error::Numeric("empty lattice".into()));
    }
    let rule = PremiumRule::ExpectedValue { theta };
    let best = deductibles
        .par_iter()
        .enumerate()
        .map_init(
            || Scratch::new(inst.len()),
            |scratch, (i, &dd)| {
                let mut row_best = (f64::INFINITY, i, 0usize);
                for (j, &c) in caps.iter().enumerate() {
                    let f = IndemnityContract::TruncatedStopLoss { deductible: dd, cap: c };
                    let v = inst.position_value_with(&f.linear_map(), &rule, lambda, scratch);
                    if v < row_best.0 {
                        row_best = (v, i, j);
                    }
                }
                row_best
            },
        )
        .reduce(
            || (f64::INFINITY, usize::MAX, usize::MAX),
            |a, b| if (b.0, b.1, b.2) < (a.0, a.1, a.2) { b } else { a },
        );
    let (value, i, j) = best;
    let (deductible, cap) = (deductibles[i], caps[j]);
    Ok(GridSearchResult {
        contract: IndemnityContract::TruncatedStopLoss { deductible, cap },
        value,
        deductible,
        cap,
        cell: 0.0,
        evaluated: deductibles.len() * caps.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub trials: usize,
    /// Position value of the analytic contract on the instance.
    pub analytic_value: f64,
    /// ΛVaR of the uninsured position, the natural scale of all values.
    pub scale: f64,
    /// `max(analytic − challenger)`; `None` when no trial ran.
    pub max_violation: Option<f64>,
    pub best_challenger_value: Option<f64>,
    pub best_challenger: Option<IndemnityContract>,
}

/// Draws a random admissible piecewise-linear contract on `[0, top]`.
pub fn random_contract(rng: &mut impl Rng, top: f64) -> IndemnityContract {
    let pieces = rng.random_range(1..=6usize);
    let mut xs: Vec<f64> = (0..pieces).map(|_| rng.random::<f64>() * top).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut slope = || match rng.random_range(0..4u8) {
        0 => 0.0,
        1 => 1.0,
        _ => rng.random::<f64>(),
    };
    let mut knots = vec![Knot { x: 0.0, y: 0.0 }];
    for x in xs {
        let last = *knots.last().unwrap();
        if x <= last.x {
            continue;
        }
        let s = slope();
        knots.push(Knot {
            x,
            y: last.y + s * (x - last.x),
        });
    }
    IndemnityContract::PiecewiseLinear {
        knots,
        tail_slope: slope(),
    }
}

/// How far random admissible contracts can undercut `analytic` on `inst`.
pub fn random_indemnity_dominance(
    inst: &DiscreteInstance,
    lambda: &LambdaFunction,
    rule: &PremiumRule,
    analytic: &IndemnityContract,
    trials: usize,
    seed: u64,
) -> Result<DominanceReport> {
    let analytic_value = inst.position_value(analytic, rule, lambda)?;
    let scale = inst.lambda_var(lambda);
    let top = inst.max_value();
    let best = (0..trials)
        .into_par_iter()
        .map_init(
            || Scratch::new(inst.len()),
            |scratch, t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t as u64);
                let f = random_contract(&mut rng, top);
                let v = inst.position_value_with(&f.linear_map(), rule, lambda, scratch);
                (v, t)
            },
        )
        .reduce(|| (f64::INFINITY, usize::MAX), |a, b| if b < a { b } else { a });
    let (best_challenger_value, best_challenger) = if trials == 0 {
        (None, None)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(best.1 as u64);
        (Some(best.0), Some(random_contract(&mut rng, top)))
    };
    Ok(DominanceReport {
        trials,
        analytic_value,
        scale,
        max_violation: best_challenger_value.map(|v| analytic_value - v),
        best_challenger_value,
        best_challenger,
    })
}

/// Largest `VaR_α` over two-point laws on `[0, ∞)` with mean `mu` and
/// standard deviation `sigma`, scanning `grid` mass levels.
pub fn mv_two_point_worstcase(mu: f64, sigma: f64, alpha: f64, grid: usize) -> Result<f64> {
    ensure_domain("mu", mu, mu.is_finite() && mu > 0.0, "(0, ∞)")?;
    ensure_domain("sigma", sigma, sigma.is_finite() && sigma >= 0.0, "[0, ∞)")?;
    ensure_domain("alpha", alpha, alpha > 0.0 && alpha < 1.0, "(0, 1)")?;
    ensure_domain("grid", grid as f64, grid >= 1, "[1, ∞)")?;
    if sigma == 0.0 {
        return Ok(mu);
    }
    // mass p at a = μ − σ√((1−p)/p) ≥ 0 and 1 − p at b = μ + σ√(p/(1−p))
    let p_min = sigma * sigma / (mu * mu + sigma * sigma);
    let best = (0..grid)
        .into_par_iter()
        .map(|k| {
            let p = p_min + (1.0 - p_min) * k as f64 / grid as f64;
            if p < alpha {
                mu + sigma * (p / (1.0 - p)).sqrt()
            } else {
                (mu - sigma * ((1.0 - p) / p).sqrt()).max(0.0)
            }
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok(best)
}

/// Analytic optimum against its brute-force counterpart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub analytic: f64,
    pub oracle_best: f64,
    /// `oracle_best − analytic`.
    pub gap: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl OracleComparison {
    pub fn new(analytic: f64, oracle_best: f64, tolerance: f64) -> Self {
        let gap = oracle_best - analytic;
        OracleComparison {
            analytic,
            oracle_best,
            gap,
            tolerance,
            pass: gap.abs() <= tolerance,
        }
    }
}

/// Tolerance for comparing a lattice search with the analytic expected-value
/// optimum: moving deductible or cap by `δ` moves the position value by at
/// most `(2 + θ)δ`, plus the measured discretization error of the analytic
/// contract and the atom spacing at the optimal level.
pub fn grid_tolerance(
    inst: &DiscreteInstance,
    lambda: &LambdaFunction,
    theta: f64,
    analytic: &IndemnityContract,
    analytic_value: f64,
    cell: f64,
) -> Result<f64> {
    let rule = PremiumRule::ExpectedValue { theta };
    let on_instance = inst.position_value(analytic, &rule, lambda)?;
    let x_star_level = lambda.at(analytic_value);
    let width = 2.0 / inst.len() as f64;
    let spacing = inst.spacing_near(x_star_level, width);
    Ok((2.0 + theta) * cell + (on_instance - analytic_value).abs() + spacing)
}

/// Cantelli value with the two-point scan beside it.
pub fn cantelli_comparison(mu: f64, sigma: f64, alpha: f64, grid: usize, tolerance: f64) -> Result<OracleComparison> {
    let scan = mv_two_point_worstcase(mu, sigma, alpha, grid)?;
    Ok(OracleComparison::new(cantelli(mu, sigma, alpha), scan, tolerance))
}
