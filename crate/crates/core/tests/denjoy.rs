use carleson_core::denjoy::*;
use proptest::prelude::*;

/// Clipped lengths summed interval by interval.
fn measure_oracle(ivs: &[(f64, f64)], x: f64, t: f64) -> f64 {
    ivs.iter()
        .map(|&(a, b)| (b.min(x + t) - a.max(x - t)).max(0.0))
        .sum()
}

fn union_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-10.0..10.0f64, 0.0..2.0f64), 1..12)
        .prop_map(|v| v.into_iter().map(|(a, w)| (a, a + w)).collect())
}

#[test]
fn unit_interval_is_exactly_homogeneous() {
    let e = IntervalUnion::new(vec![(0.0, 1.0)]).unwrap();
    let h = homogeneity_constant(&e, &HomogeneityOptions::default()).unwrap();
    assert_eq!(h.constant, 1.0);
}

#[test]
fn cantor_lengths() {
    for levels in [0, 1, 3, 7, 12] {
        for fraction in [1.0 / 3.0, 0.5, 0.1] {
            let c = cantor_set(levels, fraction).unwrap();
            assert_eq!(c.len(), 1 << levels);
            assert!((c.total_length() - (1.0 - fraction).powi(levels as i32)).abs() < 1e-12);
        }
    }
    let c3 = cantor_set(3, 1.0 / 3.0).unwrap();
    assert!(c3
        .intervals()
        .iter()
        .all(|(a, b)| (b - a - 1.0 / 27.0).abs() < 1e-15));
}

#[test]
fn cantor_homogeneity_matches_endpoint_closed_form() {
    // At an outer endpoint, t = 2/3 · 3^{-k} just covers 2^{levels-k-1}
    // intervals of length 3^{-levels}, giving (3/4)(2/3)^{levels-k}.
    let c = cantor_set(8, 1.0 / 3.0).unwrap();
    let xs = [0.0];
    let ts = [2.0 / 3.0];
    let h = homogeneity_on(&c, &xs, &ts).unwrap();
    assert!((h.constant - 0.75 * (2.0f64 / 3.0).powi(8)).abs() < 1e-12);
}

#[test]
fn uniform_sample_cover_is_nearly_homogeneous() {
    let pts: Vec<f64> = (0..=200).map(|k| k as f64 / 200.0).collect();
    let h = limit_set_homogeneity(&pts, 1.0 / 200.0, &HomogeneityOptions::default()).unwrap();
    assert!((h.constant - 1.0).abs() < 1e-9, "{h:?}");
}

#[test]
fn two_cluster_cover_degenerates() {
    let mut last = f64::INFINITY;
    for eps in [1e-2, 1e-3, 1e-4] {
        let h = limit_set_homogeneity(&[0.0, 1.0], eps, &HomogeneityOptions::default()).unwrap();
        assert!(h.constant < last);
        last = h.constant;
    }
    assert!(last < 1e-3);
}

#[test]
fn puncture_set_cover_degenerates() {
    let mut prev = f64::INFINITY;
    for eps in [1e-2, 1e-3, 1e-4] {
        let h =
            limit_set_homogeneity(&puncture_set(6), eps, &HomogeneityOptions::default()).unwrap();
        assert!(h.constant < prev, "eps {eps}: {h:?}");
        prev = h.constant;
    }
}

proptest! {
    #[test]
    fn measure_agrees_with_clipping(ivs in union_strategy(), x in -12.0..12.0f64, t in 1e-3..15.0f64) {
        let e = IntervalUnion::new(ivs).unwrap();
        let m = e.measure_near(x, t);
        prop_assert!((m - measure_oracle(e.intervals(), x, t)).abs() < 1e-12);
        prop_assert!(m <= 2.0 * t + 1e-12);
    }

    #[test]
    fn scale_equivariance(ivs in union_strategy(), a in 0.1..10.0f64, b in -5.0..5.0f64) {
        let opts = HomogeneityOptions { points_per_decade: 8, decades: 3, uniform_x: 32 };
        let e = IntervalUnion::new(ivs).unwrap();
        let h = homogeneity_constant(&e, &opts).unwrap();
        let h2 = homogeneity_constant(&e.affine(a, b).unwrap(), &opts).unwrap();
        prop_assert!((h.constant - h2.constant).abs() < 1e-9, "{:?} vs {:?}", h, h2);
    }

    #[test]
    fn monotone_in_the_set(ivs in union_strategy(), extra in union_strategy()) {
        let e = IntervalUnion::new(ivs.clone()).unwrap();
        let bigger = IntervalUnion::new(ivs.into_iter().chain(extra).collect()).unwrap();
        let opts = HomogeneityOptions { points_per_decade: 8, decades: 3, uniform_x: 32 };
        let xs = opts.x_samples(&e);
        let ts = opts.t_grid(e.diameter().max(1e-3));
        let small = homogeneity_on(&e, &xs, &ts).unwrap();
        let big = homogeneity_on(&bigger, &xs, &ts).unwrap();
        prop_assert!(small.constant <= big.constant + 1e-12);
    }
}
