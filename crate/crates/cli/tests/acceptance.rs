//! Acceptance suite. Prints one PASS/FAIL line per criterion; run with
//! `cargo test -p carleson-cli --test acceptance -- --nocapture` to see them.

use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use carleson_core::beltrami::{compatibility_residual, locate, BeltramiField, ExtensionMode};
use carleson_core::denjoy::{
    cantor_set, homogeneity_constant, limit_set_homogeneity, puncture_set, HomogeneityOptions,
    IntervalUnion,
};
use carleson_core::fundomain::FundamentalDomainView;
use carleson_core::geometry::Circle;
use carleson_core::group::{
    enumerate, rubel_ryff_generators, schottky_pair_generators, AxisCircle, EnumerationOptions,
};
use carleson_core::moebius::{
    disk_automorphism, disk_distance, Classification, Model, MoebiusMap, Orientation, C64,
};
use carleson_core::quadrature::{
    box_integral, carleson_norm_estimate, cusp_sector_integral, dyadic_radii, inner_integral,
    orbit_decomposition_check, CarlesonQuery, Restriction,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

/// Outcome of one criterion: whether it must hold, and the detail line.
struct Outcome {
    pass: bool,
    asserted: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Outcome {
    Outcome {
        pass,
        asserted: true,
        detail,
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn disk_point(r: &mut ChaCha8Rng, max: f64) -> C64 {
    C64::from_polar(max * r.gen::<f64>().sqrt(), r.gen_range(-PI..PI))
}

fn random_disk_map(r: &mut ChaCha8Rng) -> MoebiusMap {
    let g = disk_automorphism(r.gen_range(-PI..PI), disk_point(r, 0.8));
    if r.gen::<bool>() {
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
}

/// `(a w + b)/(c w + d)`, with `w = conj z` for anticonformal maps.
fn lft(m: &MoebiusMap, z: C64) -> C64 {
    let w = if m.orientation == Orientation::Anticonformal {
        z.conj()
    } else {
        z
    };
    (m.a * w + m.b) / (m.c * w + m.d)
}

/// `atanh` of the pseudo-hyperbolic distance.
fn rho(z: C64, w: C64) -> f64 {
    ((z - w) / (C64::new(1.0, 0.0) - w.conj() * z))
        .norm()
        .atanh()
}

fn moebius_suite() -> Outcome {
    const N: usize = 1000;
    const TOL: f64 = 1e-8;
    let start = Instant::now();
    let mut r = rng(1);
    let mut worst = [0.0f64; 4];
    for _ in 0..N {
        let (f, g, h) = (
            random_disk_map(&mut r),
            random_disk_map(&mut r),
            random_disk_map(&mut r),
        );
        let z = disk_point(&mut r, 0.95);
        let left = f.compose(&g).unwrap().compose(&h).unwrap();
        let right = f.compose(&g.compose(&h).unwrap()).unwrap();
        let direct = lft(&f, lft(&g, lft(&h, z)));
        let scale = 1.0 + direct.norm();
        let e = (left.apply(z).unwrap() - direct)
            .norm()
            .max((right.apply(z).unwrap() - direct).norm())
            / scale;
        worst[0] = worst[0].max(e);

        let back = f.inverse().apply(f.apply(z).unwrap()).unwrap();
        let fwd = f.apply(f.inverse().apply(z).unwrap()).unwrap();
        worst[1] = worst[1].max((back - z).norm().max((fwd - z).norm()) / (1.0 + z.norm()));

        // Conformal composite against a central difference of the composite.
        let p = disk_automorphism(r.gen_range(-PI..PI), disk_point(&mut r, 0.8));
        let q = disk_automorphism(r.gen_range(-PI..PI), disk_point(&mut r, 0.8));
        let w = disk_point(&mut r, 0.9);
        let pq = |u: C64| lft(&p, lft(&q, u));
        let hh = 1e-5;
        let fd = (pq(w + hh) - pq(w - hh)) / (2.0 * hh);
        let chain = p.derivative(q.apply(w).unwrap()).unwrap() * q.derivative(w).unwrap();
        let composed = p.compose(&q).unwrap().derivative(w).unwrap();
        let e = (chain - fd).norm().max((composed - fd).norm()) / (1.0 + fd.norm());
        worst[2] = worst[2].max(e);

        let (a, b) = (disk_point(&mut r, 0.95), disk_point(&mut r, 0.95));
        let before = rho(a, b);
        let after = rho(lft(&f, a), lft(&f, b));
        let lib = disk_distance(f.apply(a).unwrap(), f.apply(b).unwrap());
        worst[3] = worst[3].max((before - after).abs().max((lib - before).abs()) / (1.0 + before));
    }
    let elapsed = start.elapsed();
    let pass = worst.iter().all(|e| *e < TOL) && elapsed < Duration::from_secs(10);
    check(
        pass,
        format!(
            "{N} cases each; max errors assoc {:.1e} inverse {:.1e} chain {:.1e} isometry {:.1e}; {:.2} s",
            worst[0],
            worst[1],
            worst[2],
            worst[3],
            elapsed.as_secs_f64()
        ),
    )
}

/// Composite 5-point Gauss–Legendre on a uniform mesh.
fn gl5(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    const X: [f64; 3] = [0.0, 0.538_469_310_105_683_1, 0.906_179_845_938_664];
    const W: [f64; 3] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
    ];
    let h = (b - a) / n as f64;
    (0..n)
        .map(|i| {
            let c = a + (i as f64 + 0.5) * h;
            let s = W[0] * f(c)
                + (1..3)
                    .map(|k| W[k] * (f(c + 0.5 * h * X[k]) + f(c - 0.5 * h * X[k])))
                    .sum::<f64>();
            0.5 * h * s
        })
        .sum()
}

/// Area of `{|z| < R, Im z > 0}` outside the circles through 0 centred at
/// `-r_a` and `r_b`, in the measure `dx dy / (4 y²)`, row by row.
fn sector_oracle(ra: f64, rb: f64, big_r: f64) -> f64 {
    gl5(
        |y: f64| {
            let xr = (big_r * big_r - y * y).sqrt();
            let chord = |r: f64| {
                if y >= r {
                    return (0.0, 0.0);
                }
                let q = (r * r - y * y).sqrt();
                (y * y / (r + q), r + q)
            };
            let (a0, a1) = chord(ra);
            let (b0, b1) = chord(rb);
            let covered = (a1.min(xr) - a0).max(0.0) + (b1.min(xr) - b0).max(0.0);
            (2.0 * xr - covered) / (4.0 * y * y)
        },
        0.0,
        big_r,
        20_000,
    )
}

fn cusp_closed_form() -> Outcome {
    let mut r = rng(2);
    let mut worst_limit = 0.0f64;
    for _ in 0..10 {
        let (ra, rb) = (r.gen_range(0.05..20.0f64), r.gen_range(0.05..20.0f64));
        let limit = (1.0 / ra + 1.0 / rb) / 8.0;
        worst_limit = worst_limit.max((inner_integral(1e-6, ra, rb).unwrap() / limit - 1.0).abs());
    }
    let mut worst_sector = 0.0f64;
    for _ in 0..5 {
        let (ra, rb) = (r.gen_range(0.2..5.0f64), r.gen_range(0.2..5.0f64));
        let big_r = r.gen_range(0.1..1.9) * ra.min(rb);
        let closed = cusp_sector_integral(ra, rb, big_r).unwrap();
        worst_sector = worst_sector.max((closed / sector_oracle(ra, rb, big_r) - 1.0).abs());
    }
    check(
        worst_limit < 1e-6 && worst_sector < 1e-5,
        format!("limit rel err {worst_limit:.1e} (10 pairs), sector vs 2-D quadrature rel err {worst_sector:.1e}"),
    )
}

fn schottky_pairs() -> [(AxisCircle, AxisCircle); 2] {
    [
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
    ]
}

fn schottky_domain(depth: usize) -> Arc<FundamentalDomainView> {
    let gens = schottky_pair_generators(&schottky_pairs())
        .unwrap()
        .to_disk_model();
    Arc::new(FundamentalDomainView::new(Arc::new(enumerate(
        &gens,
        EnumerationOptions::depth(depth),
    ))))
}

fn orbit_change_of_variables() -> Outcome {
    let start = Instant::now();
    let fd = schottky_domain(6);
    let ball = Circle::new(C64::new(0.0, 0.0), 0.3);
    let base = BeltramiField::bump(C64::new(0.5, 0.0), ball, Model::Disk).unwrap();
    let ext = BeltramiField::invariant_extension(base, fd, ExtensionMode::Transported).unwrap();
    let tol = 1e-6;
    let mut worst = 0.0f64;
    let mut ok = true;
    for (theta, r) in [
        (0.0, 0.5),
        (0.0, 1.0),
        (1.0, 1.0),
        (2.5, 1.0),
        (PI / 2.0, 0.8),
    ] {
        let d = orbit_decomposition_check(&ext, &CarlesonQuery::disk(theta, r), tol).unwrap();
        ok &= d.lhs.value > 0.0 && !d.lhs.diverged;
        worst = worst.max(d.residual);
    }
    let elapsed = start.elapsed();
    check(
        ok && worst < 5.0 * tol && elapsed < Duration::from_secs(120),
        format!(
            "depth 6, 5 caps, max |lhs - rhs| {worst:.1e} (limit {:.0e}); {:.1} s",
            5.0 * tol,
            elapsed.as_secs_f64()
        ),
    )
}

fn compatibility() -> Outcome {
    const FLOOR: f64 = 1e-4;
    let fd = schottky_domain(5);
    let base = BeltramiField::bump(
        C64::new(0.4, 0.2),
        Circle::new(C64::new(0.1, 0.05), 0.35),
        Model::Disk,
    )
    .unwrap();
    let ext =
        BeltramiField::invariant_extension(base, fd.clone(), ExtensionMode::Transported).unwrap();
    let table = fd.table().clone();
    let mut r = rng(4);
    let (mut worst, mut n) = (0.0f64, 0);
    let inside = |w: C64| matches!(locate(&fd, w), (Some(_), false));
    while n < 1000 {
        let z = disk_point(&mut r, 0.98);
        let e = &table.entries[r.gen_range(0..table.len())];
        let gz = e.map.apply(z).unwrap();
        // Pairs with a tiny |g'| only measure rounding in g(z).
        if !(inside(z) && inside(gz)) || e.disk_map.derivative_modulus(z) < FLOOR {
            continue;
        }
        worst = worst.max(compatibility_residual(&ext, &e.map, z).unwrap());
        n += 1;
    }
    check(worst < 1e-9, format!("{n} pairs, max residual {worst:.1e}"))
}

fn divergence() -> Outcome {
    let constant = BeltramiField::constant(C64::new(0.3, 0.0), Model::Disk).unwrap();
    let mut caps = 0;
    let mut flagged = 0;
    for k in 0..8 {
        for r in [1.5, 1.0, 0.5, 0.125] {
            caps += 1;
            let res = box_integral(
                &constant,
                &CarlesonQuery::disk(TAU * k as f64 / 8.0 + 0.1, r),
                1e-6,
            )
            .unwrap();
            flagged += usize::from(res.diverged);
        }
    }
    let c = 0.5;
    let decay = BeltramiField::power_decay(C64::new(c, 0.0), 0.5).unwrap();
    let xis: Vec<C64> = (0..8)
        .map(|k| C64::from_polar(1.0, TAU * k as f64 / 8.0 + 0.1))
        .collect();
    let rep =
        carleson_norm_estimate(&decay, &xis, &dyadic_radii(6), Restriction::None, 1e-6).unwrap();
    let bound = TAU * c * c;
    check(
        flagged == caps && !rep.any_diverged && rep.sup_ratio <= bound,
        format!(
            "constant flagged on {flagged}/{caps} caps; power decay flagged {} of {} queries, sup ratio {:.4} <= {bound:.4}",
            rep.entries.iter().filter(|e| e.diverged).count(),
            rep.entries.len(),
            rep.sup_ratio
        ),
    )
}

fn run_binary(dir: &Path, config: &str, args: &[&str]) -> (Option<i32>, Vec<u8>) {
    let cfg = dir.join("acceptance.toml");
    std::fs::write(&cfg, config).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_carleson"))
        .current_dir(dir)
        .arg("verify-sec4")
        .arg("--config")
        .arg(&cfg)
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code(), out.stdout)
}

fn records<'a>(report: &'a Value, name: &str) -> Vec<&'a Value> {
    report["records"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["name"] == name)
        .collect()
}

/// `τ ∘ σ_n` as a real matrix, derived by hand from the reflection circles.
fn rubel_ryff_matrix(n: u32) -> [f64; 4] {
    if n == 1 {
        [1.0, 0.0, -1.0, 1.0]
    } else {
        let r = 2f64.powi(n as i32 - 2);
        [-3.0, 8.0 * r, 1.0 / r, -3.0]
    }
}

fn matrices_match(m: &MoebiusMap, want: [f64; 4]) -> bool {
    let got = [m.a, m.b, m.c, m.d];
    let scale = want.iter().fold(1.0f64, |s, x| s.max(x.abs()));
    [1.0, -1.0].iter().any(|sign| {
        got.iter()
            .zip(want)
            .all(|(g, w)| (*g - sign * w).norm() < 1e-12 * scale)
    })
}

const SEC4: &str = "[sec4]\nn_max = 7\nglobal_xi_count = 0\n";

fn construction(report: &Value) -> Outcome {
    let gens = rubel_ryff_generators(7).unwrap();
    let g1 = gens.generators[0];
    let derived =
        (1..=7).all(|n| matrices_match(&gens.generators[n as usize - 1], rubel_ryff_matrix(n)));
    let g1_ok = g1.classify() == Classification::Parabolic
        && (g1.trace().re.abs() - 2.0).abs() < 1e-12
        && g1.apply(C64::new(0.0, 0.0)).unwrap().norm() < 1e-15;
    let g2_ok = gens.generators[1].classify() == Classification::Hyperbolic;
    let json_gens = records(report, "generators");
    let json_ok = json_gens.len() == 1
        && json_gens[0]["values"]["g1"]["classification"] == "parabolic"
        && json_gens[0]["values"]["g2"]["classification"] == "hyperbolic";

    let areas = records(report, "cusp_area");
    let areas_ok = areas.len() == 13
        && areas.iter().all(|a| {
            let area = a["values"]["area"].as_f64().unwrap();
            let sector = a["values"]["sector_closed_form"].as_f64().unwrap();
            area <= a["bound"].as_f64().unwrap() && (area / sector - 1.0).abs() < 1e-6
        });
    let sums = records(report, "cusp_area_sums");
    let inc: Vec<f64> = sums[0]["values"]["pair_increments"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let q = inc.windows(2).map(|w| w[1] / w[0]).fold(0.0f64, f64::max);
    let geometric = inc.len() >= 6 && q < 1.0 && inc.iter().all(|x| *x > 0.0);
    check(
        derived && g1_ok && g2_ok && json_ok && areas_ok && geometric,
        format!(
            "generators match derived matrices: {derived}; {} cusp areas within bound: {areas_ok}; {} increments, max ratio {q:.3}",
            areas.len(),
            inc.len()
        ),
    )
}

fn refinement(report: &Value) -> Outcome {
    let recs = records(report, "cusp_carleson_refinement");
    let Some(r) = recs.first() else {
        return check(false, "no refinement record".into());
    };
    let sups: Vec<f64> = r["values"]["sup_ratios"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let change = (sups[1] - sups[0]).abs() / sups[0];
    let finite = sups.iter().all(|s| s.is_finite() && *s > 0.0);
    let diverged = records(report, "cusp_carleson")[0]["values"]["diverged_queries"]
        .as_u64()
        .unwrap();
    check(
        finite && diverged == 0 && change < 0.1,
        format!(
            "sup ratios {:.5} -> {:.5} at depths {}, change {:.1}%",
            sups[0],
            sups[1],
            r["values"]["depths"],
            100.0 * change
        ),
    )
}

fn denjoy() -> Vec<Outcome> {
    let opts = HomogeneityOptions::default();
    let unit = homogeneity_constant(&IntervalUnion::new(vec![(0.0, 1.0)]).unwrap(), &opts)
        .unwrap()
        .constant;
    let h8 = homogeneity_constant(&cantor_set(8, 1.0 / 3.0).unwrap(), &opts)
        .unwrap()
        .constant;
    let h12 = homogeneity_constant(&cantor_set(12, 1.0 / 3.0).unwrap(), &opts)
        .unwrap()
        .constant;
    let change = (h12 - h8).abs() / h8;
    let eps = [1e-2, 1e-3, 1e-4];
    let punct: Vec<f64> = eps
        .iter()
        .map(|e| {
            limit_set_homogeneity(&puncture_set(7), *e, &opts)
                .unwrap()
                .constant
        })
        .collect();
    let decreasing = punct.windows(2).all(|w| w[1] < w[0]);
    vec![
        check(unit == 1.0, format!("homogeneity([0,1]) = {unit}")),
        Outcome {
            pass: change < 0.05,
            asserted: false,
            detail: format!(
                "Cantor level 8 {h8:.5}, level 12 {h12:.5}, change {:.0}% (not asserted)",
                100.0 * change
            ),
        },
        check(
            decreasing,
            format!("puncture set at eps {eps:?}: {punct:?}"),
        ),
    ]
}

fn determinism(dir: &Path) -> Outcome {
    let cfg = "[sec4]\nglobal_xi_count = 1\ntrend_depths = [2, 3, 4]\n";
    let (c1, one) = run_binary(dir, cfg, &["--workers", "1"]);
    let (c8, eight) = run_binary(dir, cfg, &["--workers", "8"]);
    check(
        c1 == c8 && !one.is_empty() && one == eight,
        format!(
            "exit codes {c1:?}/{c8:?}, {} vs {} bytes, identical: {}",
            one.len(),
            eight.len(),
            one == eight
        ),
    )
}

#[test]
fn acceptance() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout) = run_binary(dir.path(), SEC4, &[]);
    let sec4: Value = serde_json::from_slice(&stdout).expect("verify-sec4 writes JSON");
    let sec4_ok = code == Some(0);

    let mut results: Vec<(String, Outcome)> = vec![
        ("1 moebius".into(), moebius_suite()),
        ("2 cusp closed form".into(), cusp_closed_form()),
        (
            "3 orbit change of variables".into(),
            orbit_change_of_variables(),
        ),
        ("4 compatibility".into(), compatibility()),
        ("5 divergence".into(), divergence()),
    ];
    let mut c6 = construction(&sec4);
    c6.pass &= sec4_ok;
    results.push(("6 construction".into(), c6));
    results.push(("7 restricted sup ratio".into(), refinement(&sec4)));
    for (k, o) in denjoy().into_iter().enumerate() {
        results.push((format!("8{} denjoy", ['a', 'b', 'c'][k]), o));
    }
    results.push(("9 determinism".into(), determinism(dir.path())));

    for (name, o) in &results {
        println!(
            "{} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    let failed: Vec<&str> = results
        .iter()
        .filter(|(_, o)| o.asserted && !o.pass)
        .map(|(n, _)| n.as_str())
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
