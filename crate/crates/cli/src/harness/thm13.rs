use std::f64::consts::TAU;
use std::path::Path;

use carleson_core::beltrami::{compatibility_residual, locate, BeltramiField, ExtensionMode};
use carleson_core::group::enumerate;
use carleson_core::moebius::{Model, C64};
use carleson_core::quadrature::{
    carleson_norm_estimate, orbit_decomposition_check, CarlesonQuery, Restriction,
};
use rand::Rng;

use super::{domain_of, nums, rng};
use crate::config::{ConfigResult, RunConfig};
use crate::report::{num, Record, Report, Status};

/// A frontier contribution above this share of the orbit sum flags the
/// depth as too shallow.
const FRONTIER_SHARE: f64 = 0.01;
/// Compatibility residual accepted as exact.
const COMPATIBILITY_TOL: f64 = 1e-9;
/// Pairs with `|g'(z)|` below this are skipped: rounding in `g(z)` is
/// amplified by `1/|g'(z)|` when the tile of `g(z)` is pulled back.
pub const CONDITIONING_FLOOR: f64 = 1e-4;

/// Computable ingredients of the mechanism that turns a domain-restricted
/// Carleson bound into a bound for the invariant extension, all in the disk.
pub fn verify_thm13(cfg: &RunConfig, base_dir: &Path) -> ConfigResult<Report> {
    let depth = cfg.depth.word_length;
    let d = Some(depth);
    let tol = cfg.tolerance.quadrature;
    let mut report = Report::new("verify-thm13", cfg.seed, d);
    let gens = cfg.group.generators()?;
    let gens = if gens.model == Model::Halfplane {
        gens.to_disk_model()
    } else {
        gens
    };
    let fd = domain_of(enumerate(&gens, cfg.depth.options(depth)), &mut report);
    let base = cfg.field.base(Model::Disk, base_dir)?;
    // A half-plane field is carried to the disk along with the group.
    let base = if base.model == Model::Halfplane {
        BeltramiField::cayley_pullback(base)?
    } else {
        base
    };
    let radii = cfg.query.radii();

    // (a) Carleson bound for the field restricted to F, at points of F(∞).
    let ib = fd.infinite_boundary(cfg.tolerance.resolution)?;
    let n = cfg.thm13.arc_samples.max(1);
    let mut xis: Vec<C64> = ib
        .arcs
        .iter()
        .flat_map(|&(a, b)| {
            (0..n).map(move |k| C64::from_polar(1.0, a + (b - a) * (k as f64 + 0.5) / n as f64))
        })
        .collect();
    xis.extend(ib.cusps.iter().map(|c| c.point));
    let hypothesis = if xis.is_empty() {
        report.push(
            Record::new(
                "restricted_carleson_bound",
                "fundamental_domain_restricted_carleson_bound",
                d,
                Status::Pass,
            )
            .value("c_hat", 0.0)
            .message("F(∞) is empty"),
        );
        Some(0.0)
    } else {
        let est =
            carleson_norm_estimate(&base, &xis, &radii, Restriction::Domain(fd.clone()), tol)?;
        let ok = !est.any_diverged;
        let mut rec = Record::new(
            "restricted_carleson_bound",
            "fundamental_domain_restricted_carleson_bound",
            d,
            Status::from_check(ok),
        )
        .value("c_hat", num(est.sup_ratio))
        .value("boundary_points", xis.len())
        .value("free_arcs", ib.arcs.len())
        .value("cusps", ib.cusps.len())
        .value("radii", nums(&radii))
        .value(
            "diverged_queries",
            est.entries.iter().filter(|e| e.diverged).count(),
        );
        if !ok {
            rec = rec.message(
                "hypothesis violated: the restricted integral diverges at a point of F(∞)",
            );
        }
        report.push(rec);
        ok.then_some(est.sup_ratio)
    };

    let ext =
        BeltramiField::invariant_extension(base.clone(), fd.clone(), ExtensionMode::Transported)?;

    // Compatibility law on random pairs inside enumerated tiles.
    let mut r = rng(cfg);
    let table = fd.table();
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    let mut attempts = 0;
    let mut ill_conditioned = 0;
    let wanted = cfg.thm13.compatibility_samples;
    while checked < wanted && attempts < 50 * wanted.max(1) {
        attempts += 1;
        let z = C64::from_polar(0.98 * r.gen::<f64>().sqrt(), r.gen_range(0.0..TAU));
        let g = table.entries[r.gen_range(0..table.len())].disk_map;
        let Ok(gz) = g.apply(z) else { continue };
        let inside = |w: C64| matches!(locate(&fd, w), (Some(_), false));
        if !(inside(z) && inside(gz)) {
            continue;
        }
        if g.derivative_modulus(z) < CONDITIONING_FLOOR {
            ill_conditioned += 1;
            continue;
        }
        worst = worst.max(compatibility_residual(&ext, &g, z)?);
        checked += 1;
    }
    let ok = checked > 0 && worst < COMPATIBILITY_TOL;
    report.push(
        Record::new(
            "compatibility",
            "compatibility_law",
            d,
            Status::from_check(ok),
        )
        .bound(COMPATIBILITY_TOL)
        .value("max_residual", num(worst))
        .value("pairs", checked)
        .value("ill_conditioned_skipped", ill_conditioned)
        .value("conditioning_floor", CONDITIONING_FLOOR),
    );

    // (b) Orbit change of variables on caps.
    if hypothesis.is_none() {
        report.push(
            Record::new(
                "orbit_decomposition",
                "orbit_change_of_variables",
                d,
                Status::Skipped,
            )
            .message("restricted bound failed"),
        );
    } else {
        for cap in &cfg.thm13.caps {
            let q = CarlesonQuery::disk(cap[0], cap[1]);
            let rec = Record::new(
                "orbit_decomposition",
                "orbit_change_of_variables",
                d,
                Status::Pass,
            )
            .value("theta", cap[0])
            .value("r", cap[1]);
            match orbit_decomposition_check(&ext, &q, tol) {
                Ok(o) => {
                    let ok = o.residual < 5.0 * tol && !o.lhs.diverged;
                    if o.frontier_increment > FRONTIER_SHARE * o.rhs.abs()
                        && o.frontier_increment > tol
                    {
                        report.flag(format!(
                            "orbit sum at cap ({}, {}) still gains {:.3e} from the longest words",
                            cap[0], cap[1], o.frontier_increment
                        ));
                    }
                    let mut rec = rec
                        .bound(5.0 * tol)
                        .value("lhs", num(o.lhs.value))
                        .value("rhs", num(o.rhs))
                        .value("residual", num(o.residual))
                        .value("frontier_increment", num(o.frontier_increment))
                        .value("terms", o.terms);
                    rec.status = Status::from_check(ok);
                    report.push(rec);
                }
                Err(e) => {
                    let mut rec = rec.message(format!("not applicable: {e}"));
                    rec.status = Status::Skipped;
                    report.push(rec);
                }
            }
        }
    }

    // (c) Boundary length sums by word length.
    let sums = fd.length_sum_partials(depth, cfg.tolerance.length);
    let incs: Vec<f64> = sums.iter().map(|s| s.increment).collect();
    let ratios: Vec<f64> = incs.windows(2).skip(1).map(|w| w[1] / w[0]).collect();
    let decaying = ratios.iter().all(|q| *q < 1.0);
    report.push(
        Record::new(
            "length_sums",
            "tile_boundary_length_sums",
            d,
            Status::from_check(decaying),
        )
        .value("increments", nums(&incs))
        .value(
            "cumulative",
            nums(&sums.iter().map(|s| s.cumulative).collect::<Vec<_>>()),
        )
        .value("increment_ratios", nums(&ratios))
        .value("max_ratio", num(ratios.iter().copied().fold(0.0, f64::max))),
    );

    // (d) Global estimate of the extension, diagnostic.
    match hypothesis {
        Some(c_hat) => {
            let m = cfg.thm13.global_xi_count.max(1);
            let xis: Vec<C64> = (0..m)
                .map(|k| C64::from_polar(1.0, TAU * k as f64 / m as f64))
                .collect();
            let est = carleson_norm_estimate(&ext, &xis, &radii, Restriction::None, tol)?;
            report.push(
                Record::new(
                    "global_estimate",
                    "global_carleson_estimate",
                    d,
                    Status::Diagnostic,
                )
                .value("sup_ratio", num(est.sup_ratio))
                .value("c_hat", num(c_hat))
                .value(
                    "ratio_to_c_hat",
                    num(if c_hat > 0.0 {
                        est.sup_ratio / c_hat
                    } else {
                        0.0
                    }),
                )
                .value("any_diverged", est.any_diverged)
                .value("truncation_events", ext.truncation_events()),
            );
        }
        None => report.push(
            Record::new(
                "global_estimate",
                "global_carleson_estimate",
                d,
                Status::Skipped,
            )
            .message("restricted bound failed"),
        ),
    }
    report.finish();
    Ok(report)
}
