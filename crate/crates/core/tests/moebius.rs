use carleson_core::moebius::{
    cayley, cayley_inv, disk_automorphism, disk_distance, halfplane_distance, Classification,
    Model, MoebiusMap, Orientation, C64,
};
use proptest::prelude::*;

const CASES: u32 = 1000;
const TOL: f64 = 1e-8;

fn disk_point(max: f64) -> impl Strategy<Value = C64> {
    (0.0..max, -std::f64::consts::PI..std::f64::consts::PI).prop_map(|(r, t)| C64::from_polar(r, t))
}

fn upper_point() -> impl Strategy<Value = C64> {
    (-3.0..3.0f64, 0.05..3.0f64).prop_map(|(x, y)| C64::new(x, y))
}

/// Disk automorphisms, optionally followed by complex conjugation.
fn disk_map() -> impl Strategy<Value = MoebiusMap> {
    (-3.2..3.2f64, disk_point(0.8), any::<bool>()).prop_map(|(t, p, flip)| {
        let g = disk_automorphism(t, p);
        if flip {
            let conj = MoebiusMap::new(
                1.0.into(),
                0.0.into(),
                0.0.into(),
                1.0.into(),
                Orientation::Anticonformal,
                Model::Disk,
            )
            .unwrap();
            conj.compose(&g).unwrap()
        } else {
            g
        }
    })
}

/// `SL(2,R)` elements with moderate entries.
fn real_map() -> impl Strategy<Value = MoebiusMap> {
    (0.3..3.0f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b, c)| {
        // d chosen so that ad - bc = 1.
        MoebiusMap::real(a, b, c, (1.0 + b * c) / a, Model::Halfplane).unwrap()
    })
}

fn close(a: C64, b: C64) -> bool {
    (a - b).norm() <= TOL * (1.0 + b.norm())
}

/// Direct evaluation of `(a z + b)/(c z + d)`, conjugating first when anticonformal.
fn lft(m: &MoebiusMap, z: C64) -> C64 {
    let w = if m.orientation == Orientation::Anticonformal {
        z.conj()
    } else {
        z
    };
    (m.a * w + m.b) / (m.c * w + m.d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn composition_is_associative(f in disk_map(), g in disk_map(), h in disk_map(), z in disk_point(0.95)) {
        let left = f.compose(&g).unwrap().compose(&h).unwrap();
        let right = f.compose(&g.compose(&h).unwrap()).unwrap();
        prop_assert!(left.distance(&right) < TOL * 10.0);
        prop_assert!(close(left.apply(z).unwrap(), right.apply(z).unwrap()));
        // Oracle: evaluate the three maps one after another.
        prop_assert!(close(left.apply(z).unwrap(), lft(&f, lft(&g, lft(&h, z)))));
    }

    #[test]
    fn inverse_undoes_the_map(f in disk_map(), z in disk_point(0.95)) {
        let id = f.compose(&f.inverse()).unwrap();
        prop_assert_eq!(id.classify(), Classification::Identity);
        prop_assert!(close(f.inverse().apply(f.apply(z).unwrap()).unwrap(), z));
        prop_assert!(close(f.apply(f.inverse().apply(z).unwrap()).unwrap(), z));
    }

    #[test]
    fn real_inverse_undoes_the_map(f in real_map(), z in upper_point()) {
        prop_assert!(close(f.inverse().apply(f.apply(z).unwrap()).unwrap(), z));
    }

    #[test]
    fn derivative_matches_central_differences(t in -3.2..3.2f64, p in disk_point(0.8), z in disk_point(0.9)) {
        let f = disk_automorphism(t, p);
        let h = 1e-5;
        let fd = (f.apply(z + h).unwrap() - f.apply(z - h).unwrap()) / (2.0 * h);
        let fdi = (f.apply(z + C64::new(0.0, h)).unwrap() - f.apply(z - C64::new(0.0, h)).unwrap()) / C64::new(0.0, 2.0 * h);
        let d = f.derivative(z).unwrap();
        // Truncation error of the stencil is h^2 |f'''| / 6, well below the bound here.
        prop_assert!((d - fd).norm() <= TOL * (1.0 + d.norm()), "d={d} fd={fd}");
        prop_assert!((d - fdi).norm() <= TOL * (1.0 + d.norm()));
        prop_assert!((f.derivative_modulus(z) - d.norm()).abs() <= TOL * (1.0 + d.norm()));
    }

    #[test]
    fn chain_rule(t1 in -3.2..3.2f64, p1 in disk_point(0.8), t2 in -3.2..3.2f64, p2 in disk_point(0.8), z in disk_point(0.9)) {
        let f = disk_automorphism(t1, p1);
        let g = disk_automorphism(t2, p2);
        let fg = f.compose(&g).unwrap();
        let expected = f.derivative(g.apply(z).unwrap()).unwrap() * g.derivative(z).unwrap();
        prop_assert!(close(fg.derivative(z).unwrap(), expected));
    }

    #[test]
    fn disk_maps_are_isometries(f in disk_map(), z in disk_point(0.95), w in disk_point(0.95)) {
        let before = disk_distance(z, w);
        let after = disk_distance(f.apply(z).unwrap(), f.apply(w).unwrap());
        prop_assert!((before - after).abs() <= TOL * (1.0 + before), "{before} vs {after}");
    }

    #[test]
    fn real_maps_are_isometries(f in real_map(), z in upper_point(), w in upper_point()) {
        let before = halfplane_distance(z, w);
        let after = halfplane_distance(f.apply(z).unwrap(), f.apply(w).unwrap());
        prop_assert!((before - after).abs() <= TOL * (1.0 + before));
    }

    #[test]
    fn cayley_transform_is_an_isometry(z in upper_point(), w in upper_point()) {
        let dh = halfplane_distance(z, w);
        let dd = disk_distance(cayley(z).unwrap(), cayley(w).unwrap());
        prop_assert!((dh - dd).abs() <= TOL * (1.0 + dh));
        prop_assert!(close(cayley_inv(cayley(z).unwrap()).unwrap(), z));
    }

    #[test]
    fn conjugation_to_the_disk_commutes_with_evaluation(f in real_map(), z in upper_point()) {
        let g = f.halfplane_to_disk();
        prop_assert!(close(g.apply(cayley(z).unwrap()).unwrap(), cayley(f.apply(z).unwrap()).unwrap()));
        prop_assert!(g.disk_to_halfplane().distance(&f) < TOL);
    }
}

#[test]
fn metric_convention_at_the_origin() {
    // rho(0, r) = atanh r with the density 1/(1-|z|^2).
    for r in [0.1, 0.5, 0.9, 0.999] {
        let d = disk_distance(C64::new(0.0, 0.0), C64::new(r, 0.0));
        assert!((d - 0.5 * ((1.0 + r) / (1.0 - r)).ln()).abs() < 1e-12);
    }
    // Half-plane: rho(i, i y) = |ln y| / 2.
    for y in [0.01, 0.5, 2.0, 100.0] {
        let d = halfplane_distance(C64::new(0.0, 1.0), C64::new(0.0, y));
        assert!((d - 0.5 * y.ln().abs()).abs() < 1e-12);
    }
}

#[test]
fn classification_by_trace() {
    let parabolic = MoebiusMap::real(1.0, 2.0, 0.0, 1.0, Model::Halfplane).unwrap();
    let hyperbolic = MoebiusMap::real(2.0, 0.0, 0.0, 0.5, Model::Halfplane).unwrap();
    let (c, s) = (0.3f64.cos(), 0.3f64.sin());
    let elliptic = MoebiusMap::real(c, -s, s, c, Model::Halfplane).unwrap();
    assert_eq!(parabolic.classify(), Classification::Parabolic);
    assert_eq!(hyperbolic.classify(), Classification::Hyperbolic);
    assert_eq!(elliptic.classify(), Classification::Elliptic);
    assert_eq!(
        MoebiusMap::identity(Model::Disk).classify(),
        Classification::Identity
    );
    assert_eq!(parabolic.fixed_points(), vec![None]);
}

#[test]
fn anticonformal_maps_have_no_complex_derivative() {
    let tau = MoebiusMap::tau(Model::Halfplane);
    assert!(tau.derivative(C64::new(0.0, 1.0)).is_err());
    assert!(close(
        tau.apply(C64::new(1.0, 2.0)).unwrap(),
        C64::new(-1.0, 2.0)
    ));
    assert_eq!(
        tau.compose(&tau).unwrap().classify(),
        Classification::Identity
    );
}

#[test]
fn models_do_not_mix() {
    let d = MoebiusMap::identity(Model::Disk);
    let h = MoebiusMap::identity(Model::Halfplane);
    assert!(d.compose(&h).is_err());
}
