//! Loss distributions with exact quantiles and layer expectations.
//!
//! All families are supported on `[0, ∞)`. The Pareto family here is the
//! shifted (Lomax) form `S(x) = (1 + x)^{-α}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{ensure_domain, Error, Result};
use crate::money::ExtendedMoney;

/// Anything with a right-continuous CDF and a left-continuous quantile.
///
/// The ΛVaR engine only needs these two maps, which lets it price ceded and
/// retained positions through the same code as raw losses.
pub trait LossLaw {
    /// `P(X ≤ x)`. Must accept `x = ±∞`.
    fn cdf(&self, x: f64) -> f64;

    /// `inf{x ≥ 0 : P(X ≤ x) ≥ level}`, `+∞` allowed at `level = 1`.
    /// Callers pass `level ∈ [0, 1]`.
    fn value_at_risk(&self, level: f64) -> f64;
}

/// Sorted non-negative sample defining an empirical law.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct EmpiricalSample(Vec<f64>);

impl EmpiricalSample {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidDistribution("empirical sample is empty".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "empirical sample value {bad} is not a finite non-negative number"
            )));
        }
        values.sort_by(f64::total_cmp);
        Ok(EmpiricalSample(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<'de> Deserialize<'de> for EmpiricalSample {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = Vec::<f64>::deserialize(deserializer)?;
        EmpiricalSample::new(raw).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", try_from = "RawDistribution")]
pub enum LossDistribution {
    /// `S(x) = (1 + x)^{-alpha}`.
    Pareto { alpha: f64 },
    /// `S(x) = e^{-rate·x}`.
    Exponential { rate: f64 },
    /// Uniform on `[0, upper]`.
    Uniform { upper: f64 },
    /// `ln X ~ N(mu_log, sigma_log²)`.
    #[serde(rename = "lognormal")]
    LogNormal { mu_log: f64, sigma_log: f64 },
    Empirical { sample: EmpiricalSample },
}

#[derive(Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
enum RawDistribution {
    Pareto { alpha: f64 },
    Exponential { rate: f64 },
    Uniform { upper: f64 },
    #[serde(rename = "lognormal")]
    LogNormal { mu_log: f64, sigma_log: f64 },
    Empirical { sample: EmpiricalSample },
}

impl TryFrom<RawDistribution> for LossDistribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        let d = match raw {
            RawDistribution::Pareto { alpha } => LossDistribution::Pareto { alpha },
            RawDistribution::Exponential { rate } => LossDistribution::Exponential { rate },
            RawDistribution::Uniform { upper } => LossDistribution::Uniform { upper },
            RawDistribution::LogNormal { mu_log, sigma_log } => {
                LossDistribution::LogNormal { mu_log, sigma_log }
            }
            RawDistribution::Empirical { sample } => LossDistribution::Empirical { sample },
        };
        d.validate()?;
        Ok(d)
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    ensure_domain(name, v, v.is_finite() && v > 0.0, "(0, ∞)")
}

impl LossDistribution {
    pub fn pareto(alpha: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        Ok(LossDistribution::Pareto { alpha })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        positive("rate", rate)?;
        Ok(LossDistribution::Exponential { rate })
    }

    pub fn uniform(upper: f64) -> Result<Self> {
        positive("upper", upper)?;
        Ok(LossDistribution::Uniform { upper })
    }

    pub fn lognormal(mu_log: f64, sigma_log: f64) -> Result<Self> {
        ensure_domain("mu_log", mu_log, mu_log.is_finite(), "(-∞, ∞)")?;
        positive("sigma_log", sigma_log)?;
        Ok(LossDistribution::LogNormal { mu_log, sigma_log })
    }

    pub fn empirical(values: Vec<f64>) -> Result<Self> {
        Ok(LossDistribution::Empirical {
            sample: EmpiricalSample::new(values)?,
        })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            LossDistribution::Pareto { alpha } => positive("alpha", alpha),
            LossDistribution::Exponential { rate } => positive("rate", rate),
            LossDistribution::Uniform { upper } => positive("upper", upper),
            LossDistribution::LogNormal { mu_log, sigma_log } => {
                ensure_domain("mu_log", mu_log, mu_log.is_finite(), "(-∞, ∞)")?;
                positive("sigma_log", sigma_log)
            }
            LossDistribution::Empirical { ref sample } => {
                if sample.is_empty() {
                    Err(Error::InvalidDistribution("empirical sample is empty".into()))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            LossDistribution::Pareto { .. } => "pareto",
            LossDistribution::Exponential { .. } => "exponential",
            LossDistribution::Uniform { .. } => "uniform",
            LossDistribution::LogNormal { .. } => "lognormal",
            LossDistribution::Empirical { .. } => "empirical",
        }
    }

    /// `(F(x), S(x))`.
    pub fn cdf_survival(&self, x: f64) -> Result<(f64, f64)> {
        ensure_domain("x", x, x >= 0.0, "[0, ∞]")?;
        Ok((self.cdf_unchecked(x), self.survival(x)))
    }

    /// `P(X ≤ x)`; the empirical law counts atoms directly so that it equals `k / n`.
    pub(crate) fn cdf_unchecked(&self, x: f64) -> f64 {
        match *self {
            LossDistribution::Empirical { ref sample } if x >= 0.0 => {
                let v = sample.values();
                v.partition_point(|s| *s <= x) as f64 / v.len() as f64
            }
            _ => 1.0 - self.survival(x),
        }
    }

    /// Left quantile `inf{x ≥ 0 : F(x) ≥ u}`; `quantile(0)` is the essential
    /// infimum and `quantile(1)` the essential supremum (possibly `+∞`).
    pub fn quantile(&self, u: f64) -> Result<f64> {
        ensure_domain("u", u, (0.0..=1.0).contains(&u), "[0, 1]")?;
        Ok(self.quantile_unchecked(u))
    }

    pub fn ess_inf(&self) -> f64 {
        match self {
            LossDistribution::Empirical { sample } => sample.values()[0],
            _ => 0.0,
        }
    }

    pub fn ess_sup(&self) -> f64 {
        match self {
            LossDistribution::Uniform { upper } => *upper,
            LossDistribution::Empirical { sample } => *sample.values().last().unwrap(),
            _ => f64::INFINITY,
        }
    }

    /// `P(X > x)` without domain checks; `x < 0` gives 1.
    pub(crate) fn survival(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 1.0;
        }
        if x == f64::INFINITY {
            return 0.0;
        }
        match *self {
            LossDistribution::Pareto { alpha } => (1.0 + x).powf(-alpha),
            LossDistribution::Exponential { rate } => (-rate * x).exp(),
            LossDistribution::Uniform { upper } => (1.0 - x / upper).max(0.0),
            LossDistribution::LogNormal { mu_log, sigma_log } => {
                if x == 0.0 {
                    1.0
                } else {
                    standard_normal().sf((x.ln() - mu_log) / sigma_log)
                }
            }
            LossDistribution::Empirical { ref sample } => {
                let v = sample.values();
                let at_or_below = v.partition_point(|s| *s <= x);
                (v.len() - at_or_below) as f64 / v.len() as f64
            }
        }
    }

    pub(crate) fn quantile_unchecked(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return self.ess_inf();
        }
        if u >= 1.0 {
            return self.ess_sup();
        }
        match *self {
            LossDistribution::Pareto { alpha } => ((-(-u).ln_1p()) / alpha).exp_m1(),
            LossDistribution::Exponential { rate } => -(-u).ln_1p() / rate,
            LossDistribution::Uniform { upper } => u * upper,
            LossDistribution::LogNormal { mu_log, sigma_log } => {
                (mu_log + sigma_log * normal_quantile(u)).exp()
            }
            LossDistribution::Empirical { ref sample } => {
                let v = sample.values();
                v[empirical_rank(u, v.len()) - 1]
            }
        }
    }

    /// `E[min{(X − a)₊, (b − a)₊}] = ∫_a^b S(t) dt` in closed form.
    pub fn layer_expectation(&self, a: f64, b: ExtendedMoney) -> Result<ExtendedMoney> {
        ensure_domain("a", a, a.is_finite() && a >= 0.0, "[0, ∞)")?;
        let b = b.to_f64();
        ensure_domain("b", b, b >= a, "[a, ∞]")?;
        Ok(self.layer_unchecked(a, b))
    }

    pub(crate) fn layer_unchecked(&self, a: f64, b: f64) -> ExtendedMoney {
        if b <= a {
            return ExtendedMoney::ZERO;
        }
        let v = match *self {
            LossDistribution::Pareto { alpha } => {
                let head = (1.0 + a).powf(1.0 - alpha);
                if b == f64::INFINITY {
                    if alpha <= 1.0 {
                        return ExtendedMoney::PlusInfinity;
                    }
                    head / (alpha - 1.0)
                } else {
                    let log_ratio = ((b - a) / (1.0 + a)).ln_1p();
                    if alpha == 1.0 {
                        log_ratio
                    } else {
                        head * (-((1.0 - alpha) * log_ratio).exp_m1()) / (alpha - 1.0)
                    }
                }
            }
            LossDistribution::Exponential { rate } => {
                let head = (-rate * a).exp();
                if b == f64::INFINITY {
                    head / rate
                } else {
                    head * (-(-rate * (b - a)).exp_m1()) / rate
                }
            }
            LossDistribution::Uniform { upper } => {
                let lo = a.min(upper);
                let hi = b.min(upper);
                (hi - lo) * (1.0 - 0.5 * (hi + lo) / upper)
            }
            LossDistribution::LogNormal { mu_log, sigma_log } => {
                lognormal_layer(mu_log, sigma_log, a, b)
            }
            LossDistribution::Empirical { ref sample } => {
                let v = sample.values();
                let total: f64 = v.iter().map(|x| x.clamp(a, b) - a).sum();
                total / v.len() as f64
            }
        };
        ExtendedMoney::Finite(v.max(0.0))
    }

    /// Exact `(mean, variance)`, `PlusInfinity` where the moment diverges.
    pub fn moments(&self) -> (ExtendedMoney, ExtendedMoney) {
        use ExtendedMoney::{Finite, PlusInfinity};
        match *self {
            LossDistribution::Pareto { alpha } => {
                let mean = if alpha > 1.0 {
                    Finite(1.0 / (alpha - 1.0))
                } else {
                    PlusInfinity
                };
                let var = if alpha > 2.0 {
                    Finite(alpha / ((alpha - 1.0).powi(2) * (alpha - 2.0)))
                } else {
                    PlusInfinity
                };
                (mean, var)
            }
            LossDistribution::Exponential { rate } => (Finite(1.0 / rate), Finite(1.0 / (rate * rate))),
            LossDistribution::Uniform { upper } => (Finite(0.5 * upper), Finite(upper * upper / 12.0)),
            LossDistribution::LogNormal { mu_log, sigma_log } => {
                let s2 = sigma_log * sigma_log;
                (
                    ExtendedMoney::from_f64((mu_log + 0.5 * s2).exp()),
                    ExtendedMoney::from_f64(s2.exp_m1() * (2.0 * mu_log + s2).exp()),
                )
            }
            LossDistribution::Empirical { ref sample } => {
                let v = sample.values();
                let n = v.len() as f64;
                let mean = v.iter().sum::<f64>() / n;
                let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
                (Finite(mean), Finite(var))
            }
        }
    }

    pub fn mean(&self) -> ExtendedMoney {
        self.moments().0
    }

    /// Sorted inverse-transform sample, reproducible from `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        ensure_domain("n", n as f64, n >= 1, "[1, ∞)")?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out: Vec<f64> = (0..n)
            .map(|_| self.quantile_unchecked(rng.random::<f64>()))
            .collect();
        out.sort_by(f64::total_cmp);
        Ok(out)
    }
}

impl LossLaw for LossDistribution {
    fn cdf(&self, x: f64) -> f64 {
        self.cdf_unchecked(x)
    }

    fn value_at_risk(&self, level: f64) -> f64 {
        self.quantile_unchecked(level)
    }
}

/// Smallest rank `k ∈ [1, n]` with `k / n ≥ u`, using the same floating
/// division as the ECDF so that quantile and CDF agree exactly.
pub(crate) fn empirical_rank(u: f64, n: usize) -> usize {
    let nf = n as f64;
    let mut k = ((u * nf).ceil() as usize).clamp(1, n);
    while k > 1 && (k - 1) as f64 / nf >= u {
        k -= 1;
    }
    while k < n && (k as f64) / nf < u {
        k += 1;
    }
    k
}

fn standard_normal() -> Normal {
    Normal::standard()
}

/// `Φ⁻¹(u)` polished by Newton steps on the tail that keeps precision.
fn normal_quantile(u: f64) -> f64 {
    let n = standard_normal();
    let mut z = n.inverse_cdf(u);
    if !z.is_finite() {
        return z;
    }
    for _ in 0..3 {
        let r = if z > 0.0 { (1.0 - u) - n.sf(z) } else { n.cdf(z) - u };
        let p = n.pdf(z);
        if p <= 0.0 || r == 0.0 {
            break;
        }
        z -= r / p;
    }
    z
}

/// `∫_a^b S(t) dt = b S(b) − a S(a) + ∫_a^b t f(t) dt` for the lognormal.
fn lognormal_layer(mu: f64, sigma: f64, a: f64, b: f64) -> f64 {
    let n = standard_normal();
    let z = |x: f64| (x.ln() - mu) / sigma;
    let mean = (mu + 0.5 * sigma * sigma).exp();
    // Partial first moment on (a, b], computed from whichever tail keeps precision.
    let shifted = |x: f64| {
        if x == 0.0 {
            f64::NEG_INFINITY
        } else if x == f64::INFINITY {
            f64::INFINITY
        } else {
            z(x) - sigma
        }
    };
    let (za, zb) = (shifted(a), shifted(b));
    let partial = if za > 0.0 {
        n.sf(za) - n.sf(zb)
    } else {
        n.cdf(zb) - n.cdf(za)
    };
    let surv = |x: f64| if x == 0.0 { 1.0 } else { n.sf(z(x)) };
    let b_term = if b == f64::INFINITY { 0.0 } else { b * surv(b) };
    b_term - a * surv(a) + mean * partial
}
