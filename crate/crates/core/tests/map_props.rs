mod common;

use common::*;
use conejsr_core::{check_properties, Activation, Asymptotic, Degree, MapExpr, PointVec};
use proptest::prelude::*;

const N: usize = 3;

fn activation() -> impl Strategy<Value = Activation> {
    proptest::sample::select(Activation::ALL.to_vec())
}

fn ann() -> impl Strategy<Value = MapExpr> {
    (any::<u64>(), activation(), any::<bool>())
        .prop_map(|(seed, act, bias)| random_ann(&mut rng(seed), N, act, bias))
}

fn point() -> impl Strategy<Value = PointVec> {
    any::<u64>().prop_map(|seed| random_point(&mut rng(seed), N))
}

fn scale() -> impl Strategy<Value = f64> {
    (-3.0f64..3.0).prop_map(|e| 10f64.powf(e))
}

/// `lo <= hi` coordinatewise with relative slack.
fn below(lo: &PointVec, hi: &PointVec) -> bool {
    lo.le_cone(hi, 1e-10)
}

fn max_rel_gap(a: &PointVec, b: &PointVec) -> f64 {
    a.coords()
        .iter()
        .zip(b.coords())
        .map(|(p, q)| (p - q).abs() / p.abs().max(q.abs()).max(1.0))
        .fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn monotone_scaling(f in ann(), x in point(), c1 in scale(), ratio in 1.0f64..100.0) {
        let c2 = c1 * ratio;
        let a = f.evaluate(&x.scaled(c2).unwrap()).unwrap().scaled(1.0 / c2).unwrap();
        let b = f.evaluate(&x.scaled(c1).unwrap()).unwrap().scaled(1.0 / c1).unwrap();
        prop_assert!(below(&a, &b));
    }

    #[test]
    fn sandwich(f in ann(), x in point()) {
        let fx = f.evaluate(&x).unwrap();
        let inf = f.asymptotic_infinity(N).unwrap().evaluate(&x).unwrap();
        prop_assert!(below(&inf, &fx));
        if let Asymptotic::Map(zero) = f.asymptotic_zero(N).unwrap() {
            prop_assert!(below(&fx, &zero.evaluate(&x).unwrap()));
        }
    }

    /// Symbolic limits against the numerical quotient `f(cx)/c`.
    #[test]
    fn limits_match_numerical_quotients(f in ann(), x in point()) {
        let c = 1e9;
        let num = f.evaluate(&x.scaled(c).unwrap()).unwrap().scaled(1.0 / c).unwrap();
        let sym = f.asymptotic_infinity(N).unwrap().evaluate(&x).unwrap();
        prop_assert!(max_rel_gap(&num, &sym) < 1e-7, "{num:?} vs {sym:?}");
        if let Asymptotic::Map(zero) = f.asymptotic_zero(N).unwrap() {
            let c = 1e-7;
            let num = f.evaluate(&x.scaled(c).unwrap()).unwrap().scaled(1.0 / c).unwrap();
            let sym = zero.evaluate(&x).unwrap();
            // The quotient converges linearly in c near zero.
            prop_assert!(max_rel_gap(&num, &sym) < 1e-5 * (1.0 + x.max_coord()), "{num:?} vs {sym:?}");
        }
    }

    #[test]
    fn composition_limits(f in ann(), g in ann(), x in point()) {
        let fg = MapExpr::compose(f.clone(), g.clone());
        let whole = fg.asymptotic_infinity(N).unwrap().evaluate(&x).unwrap();
        let parts = MapExpr::compose(f.asymptotic_infinity(N).unwrap(), g.asymptotic_infinity(N).unwrap())
            .evaluate(&x)
            .unwrap();
        prop_assert!(max_rel_gap(&whole, &parts) <= 1e-8);
        let zeros = (fg.asymptotic_zero(N).unwrap(), f.asymptotic_zero(N).unwrap(), g.asymptotic_zero(N).unwrap());
        if let (Asymptotic::Map(w), Asymptotic::Map(f0), Asymptotic::Map(g0)) = zeros {
            let lhs = w.evaluate(&x).unwrap();
            let rhs = MapExpr::compose(f0, g0).evaluate(&x).unwrap();
            prop_assert!(max_rel_gap(&lhs, &rhs) <= 1e-8);
        }
    }

    #[test]
    fn declared_degree_matches_evaluation(seed in any::<u64>(), alpha in 0.2f64..3.0, x in point(), lambda in scale()) {
        let mut r = rng(seed);
        let f = MapExpr::power_mean(random_nonneg(&mut r, N, N, 0.2), random_nonneg(&mut r, N, N, 0.2), alpha).unwrap();
        prop_assert_eq!(f.degree(), Degree::Homogeneous(1.0));
        let lhs = f.evaluate(&x.scaled(lambda).unwrap()).unwrap();
        let rhs = f.evaluate(&x).unwrap().scaled(lambda).unwrap();
        prop_assert!(max_rel_gap(&lhs, &rhs) <= 1e-10 * (1.0 + lambda * x.max_coord()));
    }
}

#[test]
fn checked_properties_hold_across_the_catalog() {
    let mut r = rng(11);
    let mut maps = vec![
        MapExpr::Linear(random_nonneg(&mut r, N, N, 0.3)),
        MapExpr::power_mean(
            random_nonneg(&mut r, N, N, 0.1),
            random_nonneg(&mut r, N, N, 0.1),
            0.5,
        )
        .unwrap(),
        MapExpr::compose(
            MapExpr::Linear(random_nonneg(&mut r, N, N + 1, 0.1)),
            MapExpr::MinAugment(vec![0, 1]),
        ),
        MapExpr::Select(vec![2, 0, 1]),
    ];
    for act in Activation::ALL {
        maps.push(random_ann(&mut r, N, act, true));
    }
    for (k, f) in maps.iter().enumerate() {
        let report = check_properties(f, N, 500, k as u64).unwrap();
        assert!(report.passed(), "map {k}: {:?}", report.violations.first());
    }
}

#[test]
fn expression_tree_matches_hand_evaluation() {
    let a = mat(&[&[0.8, 0.1], &[0.1, 0.8]]);
    let b = mat(&[&[0.8, 0.2], &[0.0, 0.8]]);
    let f = MapExpr::power_mean(a, b, 0.3).unwrap();
    let x = [0.7, 2.3];
    let ax = [0.8 * x[0] + 0.1 * x[1], 0.1 * x[0] + 0.8 * x[1]];
    let p: Vec<f64> = ax.iter().map(|v: &f64| v.powf(0.3)).collect();
    let expect = [
        (0.8 * p[0] + 0.2 * p[1]).powf(1.0 / 0.3),
        (0.8 * p[1]).powf(1.0 / 0.3),
    ];
    let got = f.evaluate(&pt(&x)).unwrap();
    for (g, e) in got.coords().iter().zip(expect) {
        assert!((g - e).abs() <= 1e-14 * e);
    }
}
