//! Fixed instances shared by the benchmarks.

use lambdavar_core::{LambdaFunction, LossDistribution};

pub struct Fixture {
    pub name: &'static str,
    pub dist: LossDistribution,
    pub lambda: LambdaFunction,
    pub theta: f64,
}

pub fn fixtures() -> Vec<Fixture> {
    let two_level = LambdaFunction::two_level(0.9, 0.8, 1.0).unwrap();
    let exp_affine = LambdaFunction::exp_affine(0.09, 1.0, 0.9).unwrap();
    vec![
        Fixture {
            name: "pareto2_two_level",
            dist: LossDistribution::pareto(2.0).unwrap(),
            lambda: two_level.clone(),
            theta: 0.5,
        },
        Fixture {
            name: "exponential_two_level",
            dist: LossDistribution::exponential(1.0).unwrap(),
            lambda: two_level,
            theta: 0.5,
        },
        Fixture {
            name: "pareto1.5_exp_affine",
            dist: LossDistribution::pareto(1.5).unwrap(),
            lambda: exp_affine.clone(),
            theta: 0.25,
        },
        Fixture {
            name: "lognormal_exp_affine",
            dist: LossDistribution::lognormal(0.0, 1.0).unwrap(),
            lambda: exp_affine,
            theta: 0.25,
        },
    ]
}

/// Exponential draws for the empirical benchmarks.
pub fn sample(n: usize) -> Vec<f64> {
    let mut s = LossDistribution::exponential(1.0).unwrap().sample(n, 7).unwrap();
    s.sort_by(f64::total_cmp);
    s
}
