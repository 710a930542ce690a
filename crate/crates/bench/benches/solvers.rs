use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lambdavar_bench::{fixtures, sample};
use lambdavar_core::oracle::{discretize, grid_search_truncated_stoploss, random_indemnity_dominance};
use lambdavar_core::{
    empirical_lambda_var, lambda_var, lambda_var_rep, solve_expected_general, solve_expected_stoploss,
    solve_mixed_premium, LambdaFunction, PremiumRule,
};

fn risk(c: &mut Criterion) {
    let mut g = c.benchmark_group("lambda_var");
    for f in fixtures() {
        g.bench_with_input(BenchmarkId::new("direct", f.name), &f, |b, f| {
            b.iter(|| lambda_var(black_box(&f.dist), &f.lambda).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("representation", f.name), &f, |b, f| {
            b.iter(|| lambda_var_rep(black_box(&f.dist), &f.lambda).unwrap())
        });
    }
    let l = LambdaFunction::exp_affine(0.09, 1.0, 0.9).unwrap();
    for n in [1_000, 100_000] {
        let s = sample(n);
        g.bench_with_input(BenchmarkId::new("empirical", n), &s, |b, s| {
            b.iter(|| empirical_lambda_var(black_box(s), &l).unwrap())
        });
    }
    g.finish();
}

fn solvers(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve");
    for f in fixtures() {
        g.bench_with_input(BenchmarkId::new("expected_general", f.name), &f, |b, f| {
            b.iter(|| solve_expected_general(black_box(&f.dist), &f.lambda, f.theta).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("expected_stoploss", f.name), &f, |b, f| {
            b.iter(|| solve_expected_stoploss(black_box(&f.dist), &f.lambda, f.theta).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("mixed_premium", f.name), &f, |b, f| {
            b.iter(|| solve_mixed_premium(black_box(&f.dist), &f.lambda, &f.lambda, f.theta).unwrap())
        });
    }
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    let f = &fixtures()[0];
    let inst = discretize(&f.dist, 500).unwrap();
    let analytic = solve_expected_general(&f.dist, &f.lambda, f.theta).unwrap().contract;
    let rule = PremiumRule::ExpectedValue { theta: f.theta };
    g.bench_function("grid_search_200", |b| {
        b.iter(|| grid_search_truncated_stoploss(&inst, &f.lambda, f.theta, 200).unwrap())
    });
    g.bench_function("dominance_10000", |b| {
        b.iter(|| random_indemnity_dominance(&inst, &f.lambda, &rule, &analytic, 10_000, 1).unwrap())
    });
    g.finish();
}

criterion_group!(benches, risk, solvers, oracle);
criterion_main!(benches);
