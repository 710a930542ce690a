use lambdavar_core::oracle::quadrature::integrate;
use lambdavar_core::{ExtendedMoney, LossDistribution};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn families() -> Vec<LossDistribution> {
    vec![
        LossDistribution::pareto(2.5).unwrap(),
        LossDistribution::pareto(1.2).unwrap(),
        LossDistribution::exponential(0.7).unwrap(),
        LossDistribution::uniform(4.0).unwrap(),
        LossDistribution::lognormal(0.3, 0.8).unwrap(),
    ]
}

fn survival(d: &LossDistribution, t: f64) -> f64 {
    d.cdf_survival(t).unwrap().1
}

#[test]
fn layer_matches_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for d in families() {
        let top = d.quantile(0.999).unwrap();
        for _ in 0..200 {
            let a = rng.random::<f64>() * top;
            let b = a + rng.random::<f64>() * top;
            let closed = d.layer_expectation(a, ExtendedMoney::Finite(b)).unwrap().to_f64();
            // smooth up to the support end, zero beyond
            let numeric = integrate(|t| survival(&d, t), a.min(d.ess_sup()), b.min(d.ess_sup()), 1e-13, 1e-12).unwrap();
            assert!(
                (closed - numeric).abs() <= 1e-9 * (1.0 + numeric),
                "{d:?} [{a}, {b}]: {closed} vs {numeric}"
            );
        }
    }
}

#[test]
fn unbounded_layer_matches_quadrature() {
    for d in families().into_iter().filter(|d| !matches!(d, LossDistribution::Pareto { alpha } if *alpha < 2.0)) {
        let closed = d.layer_expectation(0.5, ExtendedMoney::PlusInfinity).unwrap().to_f64();
        let numeric = integrate(|t| survival(&d, t), 0.5, f64::INFINITY, 1e-12, 1e-10).unwrap();
        assert!((closed - numeric).abs() <= 1e-7 * (1.0 + numeric), "{d:?}: {closed} vs {numeric}");
    }
    let heavy = LossDistribution::pareto(1.0).unwrap();
    assert_eq!(heavy.layer_expectation(0.0, ExtendedMoney::PlusInfinity).unwrap(), ExtendedMoney::PlusInfinity);
    assert_eq!(heavy.mean(), ExtendedMoney::PlusInfinity);
}

#[test]
fn mean_is_the_full_layer() {
    for d in families() {
        let layer = d.layer_expectation(0.0, ExtendedMoney::PlusInfinity).unwrap();
        let m = d.mean().to_f64();
        assert!((layer.to_f64() - m).abs() <= 1e-12 * m, "{d:?}");
    }
}

#[test]
fn samples_are_reproducible_and_centred() {
    let d = LossDistribution::exponential(2.0).unwrap();
    let a = d.sample(50_000, 9).unwrap();
    assert_eq!(a, d.sample(50_000, 9).unwrap());
    assert_ne!(a, d.sample(50_000, 10).unwrap());
    let mean = a.iter().sum::<f64>() / a.len() as f64;
    assert!((mean - 0.5).abs() < 0.01, "{mean}");
}

#[test]
fn json_specs_round_trip() {
    for d in families().into_iter().chain([LossDistribution::empirical(vec![0.0, 1.0, 2.5]).unwrap()]) {
        let text = serde_json::to_string(&d).unwrap();
        let back: LossDistribution = serde_json::from_str(&text).unwrap();
        assert_eq!(back, d);
    }
    let d: LossDistribution = serde_json::from_str(r#"{"family": "pareto", "alpha": 2.0}"#).unwrap();
    assert_eq!(d, LossDistribution::pareto(2.0).unwrap());
    assert!(serde_json::from_str::<LossDistribution>(r#"{"family": "pareto", "alpha": -1.0}"#).is_err());
    assert!(serde_json::from_str::<LossDistribution>(r#"{"family": "gamma", "shape": 1.0}"#).is_err());
}

fn any_dist() -> impl Strategy<Value = LossDistribution> {
    prop_oneof![
        (0.5..5.0f64).prop_map(|a| LossDistribution::pareto(a).unwrap()),
        (0.1..5.0f64).prop_map(|r| LossDistribution::exponential(r).unwrap()),
        (0.1..20.0f64).prop_map(|b| LossDistribution::uniform(b).unwrap()),
        (-2.0..2.0f64, 0.1..2.0f64).prop_map(|(m, s)| LossDistribution::lognormal(m, s).unwrap()),
        prop::collection::vec(0.0..10.0f64, 1..50).prop_map(|v| LossDistribution::empirical(v).unwrap()),
    ]
}

proptest! {
    #[test]
    fn quantile_is_a_left_inverse(d in any_dist(), u in 0.0..1.0f64) {
        let q = d.quantile(u).unwrap();
        prop_assert!(d.cdf_survival(q).unwrap().0 >= u - 1e-12);
        if q > 0.0 {
            let below = q - 1e-9 * (1.0 + q);
            prop_assert!(d.cdf_survival(below).unwrap().0 <= u + 1e-9);
        }
    }

    #[test]
    fn cdf_and_survival_are_complementary(d in any_dist(), x in 0.0..50.0f64) {
        let (f, s) = d.cdf_survival(x).unwrap();
        prop_assert!((0.0..=1.0).contains(&f) && (0.0..=1.0).contains(&s));
        prop_assert!((f + s - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn quantile_is_monotone(d in any_dist(), u in 0.0..1.0f64, v in 0.0..1.0f64) {
        let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
        prop_assert!(d.quantile(lo).unwrap() <= d.quantile(hi).unwrap());
    }

    #[test]
    fn layers_are_additive(d in any_dist(), a in 0.0..5.0f64, w1 in 0.0..5.0f64, w2 in 0.0..5.0f64) {
        let layer = |x: f64, y: f64| d.layer_expectation(x, ExtendedMoney::Finite(y)).unwrap().to_f64();
        let (b, c) = (a + w1, a + w1 + w2);
        let whole = layer(a, c);
        prop_assert!((whole - layer(a, b) - layer(b, c)).abs() <= 1e-10 * (1.0 + whole));
        prop_assert!(layer(a, b) <= w1 + 1e-12);
        prop_assert_eq!(layer(a, a), 0.0);
    }
}
