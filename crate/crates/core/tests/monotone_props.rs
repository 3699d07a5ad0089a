use dimcurse::algorithms::{DiagonalBisection, LatticeMean, RandomMean};
use dimcurse::monotone::{
    build_pair, error_lower_bound_mon, simplex_product_max, threshold_value, union_box_volume,
    union_box_volume_mc, BoxMode,
};
use dimcurse::oracles::{FnOracle, ThresholdOracle};
use dimcurse::{
    ratio, run_algorithm, AdaptiveCubature, BigRational, ExactPoint, FunctionClass, Point,
    RandomStream,
};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..=1.0f64, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fooling_pair_is_monotone_and_consistent(
        pts in prop::collection::vec(point(), 0..6),
        x in point(),
        bump in prop::collection::vec(0.0..=1.0f64, 3),
    ) {
        let pts: Vec<Point> = pts.into_iter().map(|c| Point::new(c).unwrap()).collect();
        let pair = build_pair(&pts, 3).unwrap();
        let y: Vec<f64> = x.iter().zip(&bump).map(|(a, b)| a + b * (1.0 - a)).collect();
        let (x, y) = (Point::new(x).unwrap(), Point::new(y).unwrap());
        prop_assert!(pair.f_plus(&x) <= pair.f_plus(&y));
        prop_assert!(pair.f_minus(&x) <= pair.f_minus(&y));
        prop_assert!(pair.f_minus(&x) <= pair.f_plus(&x));
        for p in &pts {
            let v = threshold_value(p);
            prop_assert_eq!(pair.f_plus(p), v);
            prop_assert_eq!(pair.f_minus(p), v);
        }
        prop_assert!(pair.exact_gap + 1e-12 >= pair.guaranteed_gap);
    }
}

#[test]
fn union_volume_agrees_with_sampling_fallback() {
    let mut rng = RandomStream::new(11).rng();
    for i in 0..10 {
        let d = 2 + i % 4;
        let corners: Vec<Point> = (0..6)
            .map(|_| {
                Point::new((0..d).map(|_| rand::Rng::random::<f64>(&mut rng)).collect()).unwrap()
            })
            .collect();
        for mode in [BoxMode::Lower, BoxMode::Upper] {
            let exact = union_box_volume(&corners, mode).unwrap().value;
            let mc =
                union_box_volume_mc(&corners, mode, 200_000, &RandomStream::new(i as u64)).unwrap();
            assert!(
                (exact - mc.estimate).abs() <= 4.0 * mc.std_error + 1e-12,
                "{exact} vs {mc:?}"
            );
        }
    }
}

#[test]
fn more_than_twenty_corners_use_reported_estimate() {
    let corners: Vec<Point> = (0..24)
        .map(|i| Point::new(vec![i as f64 / 24.0, 1.0 - i as f64 / 24.0]).unwrap())
        .collect();
    let v = union_box_volume(&corners, BoxMode::Lower).unwrap();
    assert!(!v.is_exact());
    // staircase area under the anti-diagonal corners
    let exact: f64 = (1..24).map(|i| (1.0 - i as f64 / 24.0) / 24.0).sum();
    assert!((v.value - exact).abs() < 4.0 * v.std_error.unwrap());
}

#[test]
fn exact_rational_pair() {
    let p = |a: i64, b: i64| ExactPoint::new(vec![ratio(a, 4), ratio(b, 4)]).unwrap();
    let pair = build_pair(&[p(1, 1), p(3, 3)], 2).unwrap();
    // (1 − 1/16) − 1/16
    assert_eq!(pair.exact_gap, ratio(7, 8));
    assert_eq!(pair.guaranteed_gap, ratio(1, 2));
    assert_eq!(
        error_lower_bound_mon::<BigRational>(1, 10),
        ratio(1023, 2048)
    );
}

#[test]
fn bound_is_monotone_in_n_and_d() {
    for d in 1..12 {
        for n in 0..(1usize << d) {
            let b: f64 = error_lower_bound_mon(n, d);
            assert!(b <= error_lower_bound_mon::<f64>(n.saturating_sub(1), d));
            assert!(b <= error_lower_bound_mon::<f64>(n, d + 1));
        }
    }
}

type MakeAlg = Box<dyn Fn() -> Box<dyn AdaptiveCubature<f64>>>;

/// Every algorithm returns the same output on `f⁺` and `f⁻`, so one of them
/// is missed by at least half the gap.
#[test]
fn fooling_principle_and_replay() {
    let d = 4;
    let budget = 9;
    let stream = RandomStream::new(3);
    let algs: Vec<MakeAlg> = vec![
        Box::new(move || Box::new(LatticeMean::new(d, budget))),
        Box::new(move || Box::new(RandomMean::new(d, budget, &stream))),
        Box::new(move || Box::new(DiagonalBisection::new(d, budget))),
    ];
    for make in &algs {
        let run = run_algorithm(make().as_mut(), &ThresholdOracle::new(d), budget).unwrap();
        let pts: Vec<Point> = run.transcript.points().cloned().collect();
        let pair = build_pair(&pts, d).unwrap();
        let plus = FnOracle::new(d, FunctionClass::Monotone, |x: &Point| pair.f_plus(x));
        let minus = FnOracle::new(d, FunctionClass::Monotone, |x: &Point| pair.f_minus(x));
        let on_plus = run_algorithm(make().as_mut(), &plus, budget).unwrap();
        let on_minus = run_algorithm(make().as_mut(), &minus, budget).unwrap();
        assert_eq!(on_plus.transcript, run.transcript);
        assert_eq!(on_minus.transcript, run.transcript);
        assert_eq!(on_plus.output, run.output);
        assert_eq!(on_minus.output, run.output);

        let int_plus = 1.0 - union_box_volume(&pair.lower, BoxMode::Lower).unwrap().value;
        let int_minus = union_box_volume(&pair.upper, BoxMode::Upper).unwrap().value;
        let worst = (run.output - int_plus)
            .abs()
            .max((run.output - int_minus).abs());
        assert!(worst + 1e-12 >= pair.error_lower_bound());
        assert!(pair.error_lower_bound() + 1e-12 >= error_lower_bound_mon::<f64>(pts.len(), d));
    }
}

#[test]
fn product_max_matches_grid_search() {
    let d = 6;
    let r = simplex_product_max::<f64>(d).unwrap();
    // exhaustive search over a 1/10 lattice of the feasible set
    let k = 10usize;
    let mut best = 0.0f64;
    let mut idx = vec![1usize; d];
    loop {
        let sum: usize = idx.iter().sum();
        if 2 * sum <= d * k {
            best = best.max(idx.iter().map(|&i| i as f64 / k as f64).product());
        }
        let mut j = 0;
        while j < d && idx[j] == k {
            idx[j] = 1;
            j += 1;
        }
        if j == d {
            break;
        }
        idx[j] += 1;
    }
    assert!(best <= r.value + 1e-12);
    assert!((r.value - 0.5f64.powi(d as i32)).abs() < 1e-9);
    assert!((best - 0.5f64.powi(d as i32)).abs() < 1e-12);
    assert!(r.maximizer.iter().all(|y| (y - 0.5).abs() < 1e-4));
}
