use carleson_core::group::{
    dilation_generators, enumerate, limit_set_sample, poincare_partial_sums, rubel_ryff_generators,
    schottky_pair_generators, AxisCircle, EnumerationOptions, GeneratorSet, Letter,
};
use carleson_core::moebius::{Classification, Model, MoebiusMap, C64};
use proptest::prelude::*;

/// Real 2x2 matrix, projectively.
type Mat = [f64; 4];

fn mul(p: Mat, q: Mat) -> Mat {
    [
        p[0] * q[0] + p[1] * q[2],
        p[0] * q[1] + p[1] * q[3],
        p[2] * q[0] + p[3] * q[2],
        p[2] * q[1] + p[3] * q[3],
    ]
}

fn inv(p: Mat) -> Mat {
    [p[3], -p[1], -p[2], p[0]]
}

fn same(p: Mat, q: Mat) -> bool {
    let scale = p.iter().chain(q.iter()).fold(1.0f64, |m, x| m.max(x.abs()));
    let plus = p.iter().zip(&q).all(|(a, b)| (a - b).abs() < 1e-9 * scale);
    let minus = p.iter().zip(&q).all(|(a, b)| (a + b).abs() < 1e-9 * scale);
    plus || minus
}

/// `τ ∘ σ_n` worked out by hand: `σ_n` reflects in the circle of center
/// `c` and radius `r` on the real axis, `τ(z) = -conj z`.
fn rubel_ryff_matrix(n: u32) -> Mat {
    if n == 1 {
        // z -> z / (1 - z)
        [1.0, 0.0, -1.0, 1.0]
    } else {
        let r = 2f64.powi(n as i32 - 2);
        // z -> (-3 z + 8 r) / (z / r - 3)
        [-3.0, 8.0 * r, 1.0 / r, -3.0]
    }
}

/// Distinct elements per minimal word length, by exhaustive products of
/// generator matrices.
fn brute_force_counts(gens: &[Mat], depth: usize) -> Vec<usize> {
    let letters: Vec<Mat> = gens.iter().flat_map(|g| [*g, inv(*g)]).collect();
    let mut seen: Vec<Mat> = vec![[1.0, 0.0, 0.0, 1.0]];
    let mut counts = vec![1];
    let mut layer: Vec<Mat> = seen.clone();
    for _ in 0..depth {
        let mut next = Vec::new();
        for w in &layer {
            for l in &letters {
                let m = mul(*w, *l);
                if !seen.iter().any(|s| same(*s, m)) {
                    seen.push(m);
                    next.push(m);
                }
            }
        }
        counts.push(next.len());
        layer = next;
    }
    counts
}

fn as_mat(m: &MoebiusMap) -> Mat {
    assert!(m.a.im == 0.0 && m.b.im == 0.0 && m.c.im == 0.0 && m.d.im == 0.0);
    [m.a.re, m.b.re, m.c.re, m.d.re]
}

#[test]
fn rubel_ryff_generators_match_hand_derivation() {
    let gens = rubel_ryff_generators(5).unwrap();
    for n in 1..=5u32 {
        assert!(
            same(
                as_mat(&gens.generators[n as usize - 1]),
                rubel_ryff_matrix(n)
            ),
            "g{n}"
        );
    }
    let g1 = gens.generators[0];
    assert_eq!(g1.classify(), Classification::Parabolic);
    assert!((g1.trace().re.abs() - 2.0).abs() < 1e-12);
    assert!(g1.apply(C64::new(0.0, 0.0)).unwrap().norm() < 1e-15);
    assert_eq!(gens.generators[1].classify(), Classification::Hyperbolic);
}

#[test]
fn rubel_ryff_three_depth_four_counts() {
    let gens = rubel_ryff_generators(3).unwrap();
    let table = enumerate(&gens, EnumerationOptions::depth(4));
    let oracle = brute_force_counts(&(1..=3).map(rubel_ryff_matrix).collect::<Vec<_>>(), 4);
    assert_eq!(table.counts_by_length(), oracle);
    // Free group on three generators.
    assert_eq!(oracle, vec![1, 6, 30, 150, 750]);
    assert!(!table.budget_exceeded);
}

#[test]
fn trivial_group_has_one_element() {
    let t = enumerate(
        &GeneratorSet::trivial(Model::Disk),
        EnumerationOptions::depth(6),
    );
    assert_eq!(t.len(), 1);
    assert_eq!(t.entries[0].word, Vec::<Letter>::new());
    assert!((t.entries[0].height - 1.0).abs() < 1e-15);
}

#[test]
fn cyclic_groups_grow_linearly() {
    let pair = (
        AxisCircle {
            center: -2.0,
            radius: 1.0,
        },
        AxisCircle {
            center: 2.0,
            radius: 1.0,
        },
    );
    for gens in [
        schottky_pair_generators(&[pair]).unwrap(),
        dilation_generators(4.0).unwrap(),
    ] {
        let t = enumerate(&gens, EnumerationOptions::depth(7));
        assert_eq!(t.counts_by_length(), vec![1, 2, 2, 2, 2, 2, 2, 2]);
    }
}

#[test]
fn schottky_two_pairs_is_free() {
    let pairs = [
        (
            AxisCircle {
                center: -2.0,
                radius: 1.0,
            },
            AxisCircle {
                center: 2.0,
                radius: 1.0,
            },
        ),
        (
            AxisCircle {
                center: -5.0,
                radius: 1.0,
            },
            AxisCircle {
                center: 5.0,
                radius: 1.0,
            },
        ),
    ];
    let gens = schottky_pair_generators(&pairs).unwrap();
    let t = enumerate(&gens, EnumerationOptions::depth(4));
    assert_eq!(t.counts_by_length(), vec![1, 4, 12, 36, 108]);
    let mats: Vec<Mat> = gens.generators.iter().map(as_mat).collect();
    assert_eq!(brute_force_counts(&mats, 4), t.counts_by_length());
}

#[test]
fn schottky_generator_pairs_circles() {
    let (c1, c2) = (
        AxisCircle {
            center: -3.0,
            radius: 0.5,
        },
        AxisCircle {
            center: 4.0,
            radius: 2.0,
        },
    );
    let g = schottky_pair_generators(&[(c1, c2)]).unwrap().generators[0];
    // The circle of the first pair member lands on the second.
    for t in [0.3, 1.1, 2.0, 2.9] {
        let z = C64::new(c1.center, 0.0) + C64::from_polar(c1.radius, t);
        let w = g.apply(z).unwrap();
        assert!(((w - C64::new(c2.center, 0.0)).norm() - c2.radius).abs() < 1e-12);
    }
    assert!(schottky_pair_generators(&[(
        c1,
        AxisCircle {
            center: -2.8,
            radius: 1.0
        }
    )])
    .is_err());
}

#[test]
fn poincare_sums_are_cumulative() {
    let t = enumerate(
        &rubel_ryff_generators(2).unwrap(),
        EnumerationOptions::depth(5),
    );
    let p = poincare_partial_sums(&t, 1.0);
    let direct: f64 = t.entries.iter().map(|e| e.height).sum();
    assert!((p.height_sums.last().unwrap() - direct).abs() < 1e-12 * direct);
    assert!(p.height_sums.windows(2).all(|w| w[1] >= w[0]));
    for (h, x) in p.height_sums.iter().zip(&p.exp_sums) {
        assert!(x <= h && *x >= 0.5 * h);
    }
}

#[test]
fn limit_set_sample_lies_on_the_boundary() {
    let t = enumerate(
        &rubel_ryff_generators(3).unwrap(),
        EnumerationOptions::depth(4),
    );
    let pts = limit_set_sample(&t, &[C64::new(0.5, 0.0)]);
    assert!(pts.len() > 10);
    assert!(pts.iter().all(|p| p.im == 0.0));
    assert!(pts.windows(2).all(|w| w[0].re < w[1].re));
}

#[test]
fn budget_truncation_is_reported() {
    let gens = rubel_ryff_generators(3).unwrap();
    let t = enumerate(
        &gens,
        EnumerationOptions {
            budget: 20,
            ..EnumerationOptions::depth(4)
        },
    );
    assert!(t.budget_exceeded);
    assert_eq!(t.len(), 20);
    assert!(t.require_complete().is_err());
}

fn word_strategy() -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec(
        prop_oneof![Just(1), Just(-1), Just(2), Just(-2), Just(3), Just(-3)],
        0..5,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn entries_match_their_words(k in 0usize..200) {
        let gens = rubel_ryff_generators(3).unwrap();
        let t = enumerate(&gens, EnumerationOptions::depth(3));
        let e = &t.entries[k % t.len()];
        prop_assert!(gens.evaluate_word(&e.word).distance(&e.map) < 1e-9);
        prop_assert!(gens.to_disk_map(&e.map).distance(&e.disk_map) < 1e-9);
        let g0 = e.disk_map.apply(C64::new(0.0, 0.0)).unwrap();
        prop_assert!((e.height - (1.0 - g0.norm())).abs() < 1e-12);
    }

    #[test]
    fn every_short_word_is_enumerated(word in word_strategy()) {
        let gens = rubel_ryff_generators(3).unwrap();
        let t = enumerate(&gens, EnumerationOptions::depth(4));
        let m = gens.to_disk_map(&gens.evaluate_word(&word));
        prop_assert!(t.find_disk(&m.project_su11()).is_some());
    }
}

#[test]
fn heights_are_sorted() {
    let t = enumerate(
        &rubel_ryff_generators(3).unwrap(),
        EnumerationOptions::depth(4),
    );
    assert_eq!(t.identity_index(), 0);
    assert!(t.entries.windows(2).all(|w| w[0].height >= w[1].height));
}
