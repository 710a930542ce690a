use lambdavar_core::{LambdaFunction, LambdaInvariant};
use proptest::prelude::*;

fn any_lambda() -> impl Strategy<Value = LambdaFunction> {
    prop_oneof![
        (0.01..1.0f64).prop_map(|l| LambdaFunction::constant(l).unwrap()),
        (0.01..1.0f64, 0.01..1.0f64, 0.0..5.0f64)
            .prop_map(|(h, f, t)| LambdaFunction::two_level(h, h * f, t).unwrap()),
        (0.0..0.5f64, 0.01..3.0f64, 0.01..0.5f64).prop_map(|(a, k, c)| LambdaFunction::exp_affine(a, k, c).unwrap()),
        (prop::collection::vec(0.05..2.0f64, 1..5), 0.1..1.0f64, 0.05..1.0f64).prop_map(|(gaps, top, shrink)| {
            let mut b = 0.0;
            let breaks: Vec<f64> = gaps.iter().map(|g| { b += g; b }).collect();
            let mut l = top;
            let levels = (0..=breaks.len()).map(|_| { let out = l; l *= shrink; out }).collect();
            LambdaFunction::piecewise_constant(breaks, levels).unwrap()
        }),
    ]
}

proptest! {
    #[test]
    fn levels_are_decreasing_and_bounded(l in any_lambda(), x in 0.0..10.0f64, dx in 0.0..10.0f64) {
        let (a, b) = (l.at(x), l.at(x + dx));
        prop_assert!(b <= a);
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(l.inf_level() <= b && a <= l.sup_level());
        prop_assert!(l.left_limit(x) >= a);
    }

    #[test]
    fn distortion_is_identity_at_one(l in any_lambda()) {
        prop_assert_eq!(l.lr_distort(1.0).unwrap(), l);
    }

    #[test]
    fn distortion_raises_levels(l in any_lambda(), beta in 0.01..1.0f64, x in 0.0..10.0f64) {
        let d = l.lr_distort(beta).unwrap();
        prop_assert!(d.validate().is_ok());
        let expect = beta * l.at(x) + 1.0 - beta;
        prop_assert!((d.at(x) - expect).abs() <= 1e-15);
        prop_assert!(d.at(x) >= l.at(x) - 1e-15);
        prop_assert_eq!(d.breakpoints(), l.breakpoints());
    }

    #[test]
    fn smaller_beta_never_lowers_levels(l in any_lambda(), b1 in 0.01..1.0f64, b2 in 0.01..1.0f64, x in 0.0..10.0f64) {
        let (lo, hi) = if b1 <= b2 { (b1, b2) } else { (b2, b1) };
        prop_assert!(l.lr_distort(lo).unwrap().at(x) >= l.lr_distort(hi).unwrap().at(x) - 1e-15);
    }

    #[test]
    fn specs_round_trip(l in any_lambda()) {
        let text = serde_json::to_string(&l).unwrap();
        prop_assert_eq!(serde_json::from_str::<LambdaFunction>(&text).unwrap(), l);
    }
}

#[test]
fn malformed_specs_name_the_invariant() {
    let cases = [
        (LambdaFunction::two_level(0.8, 0.9, 1.0), LambdaInvariant::Monotonicity),
        (LambdaFunction::constant(1.2), LambdaInvariant::Range),
        (LambdaFunction::constant(0.0), LambdaInvariant::IdenticallyZero),
        (LambdaFunction::piecewise_constant(vec![1.0, 0.5], vec![0.9, 0.8, 0.7]), LambdaInvariant::Shape),
        (LambdaFunction::piecewise_constant(vec![1.0], vec![0.9]), LambdaInvariant::Shape),
        (LambdaFunction::exp_affine(0.5, 1.0, 0.7), LambdaInvariant::Range),
    ];
    for (spec, want) in cases {
        match spec {
            Err(lambdavar_core::Error::InvalidLambda(v)) => assert_eq!(v.invariant, want, "{v}"),
            other => panic!("expected {want:?}, got {other:?}"),
        }
    }
    let parsed: Result<LambdaFunction, _> =
        serde_json::from_str(r#"{"kind": "two_level", "high": 0.5, "low": 0.9, "threshold": 1.0}"#);
    assert!(parsed.unwrap_err().to_string().contains("onoton"));
}
