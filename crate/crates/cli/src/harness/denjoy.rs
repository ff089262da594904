use carleson_core::denjoy::{
    cantor_set, homogeneity_constant, limit_set_homogeneity, puncture_set, HomogeneityOptions,
    IntervalUnion,
};
use carleson_core::group::limit_set_sample;
use carleson_core::moebius::{Model, C64};
use serde_json::json;

use super::{boundary_coord, nums};
use crate::config::{ConfigError, ConfigResult, DenjoySet, RunConfig};
use crate::report::{num, Record, Report, Status};

const PROVENANCE: &str = "homogeneity_condition";

/// Homogeneity constants of the configured set. All records are
/// diagnostic; the trends are reported, not asserted.
pub fn denjoy_homogeneity(cfg: &RunConfig) -> ConfigResult<Report> {
    let s = &cfg.denjoy;
    let opts = HomogeneityOptions {
        points_per_decade: s.points_per_decade,
        decades: s.decades,
        uniform_x: s.uniform_x,
    };
    if opts.points_per_decade == 0 || opts.decades == 0 {
        return Err(ConfigError(
            "denjoy grid needs points_per_decade and decades".into(),
        ));
    }
    let depth = matches!(s.set, DenjoySet::LimitSet).then_some(cfg.depth.word_length);
    let mut report = Report::new("denjoy-homogeneity", cfg.seed, depth);
    match s.set {
        DenjoySet::Intervals => {
            let e = IntervalUnion::new(s.intervals.iter().map(|i| (i[0], i[1])).collect())?;
            let h = homogeneity_constant(&e, &opts)?;
            report.push(
                Record::new("homogeneity", PROVENANCE, None, Status::Diagnostic)
                    .value("intervals", e.len())
                    .value("constant", num(h.constant))
                    .value("x", num(h.x))
                    .value("t", num(h.t)),
            );
        }
        DenjoySet::Cantor => {
            let mut values = Vec::new();
            for &l in &s.levels {
                let h = homogeneity_constant(&cantor_set(l, s.fraction)?, &opts)?;
                values.push(h.constant);
                report.push(
                    Record::new("homogeneity", PROVENANCE, None, Status::Diagnostic)
                        .value("levels", l)
                        .value("fraction", s.fraction)
                        .value("constant", num(h.constant))
                        .value("x", num(h.x))
                        .value("t", num(h.t)),
                );
            }
            let changes: Vec<f64> = values
                .windows(2)
                .map(|w| (w[1] - w[0]).abs() / w[0].abs().max(f64::MIN_POSITIVE))
                .collect();
            report.push(
                Record::new("level_stability", PROVENANCE, None, Status::Diagnostic)
                    .value("levels", &s.levels)
                    .value("relative_changes", nums(&changes)),
            );
        }
        DenjoySet::LimitSet | DenjoySet::Punctures => {
            let points: Vec<f64> = if s.set == DenjoySet::Punctures {
                puncture_set(s.n_max)
            } else {
                let table = cfg.table()?;
                if table.budget_exceeded {
                    report.truncation.budget_exceeded = true;
                }
                let model = table.model();
                let seeds: Vec<C64> = cfg
                    .group
                    .seeds
                    .iter()
                    .map(|&t| {
                        if model == Model::Disk {
                            C64::from_polar(1.0, t)
                        } else {
                            C64::new(t, 0.0)
                        }
                    })
                    .collect();
                limit_set_sample(&table, &seeds)
                    .into_iter()
                    .map(|z| boundary_coord(z, model))
                    .collect()
            };
            let mut values = Vec::new();
            for &eps in &s.eps {
                let h = limit_set_homogeneity(&points, eps, &opts)?;
                values.push(h.constant);
                report.push(
                    Record::new("homogeneity", PROVENANCE, depth, Status::Diagnostic)
                        .value("eps", eps)
                        .value("points", points.len())
                        .value("constant", num(h.constant))
                        .value("x", num(h.x))
                        .value("t", num(h.t)),
                );
            }
            let decreasing = values.windows(2).all(|w| w[1] < w[0]);
            report.push(
                Record::new("coarsening_trend", PROVENANCE, depth, Status::Diagnostic)
                    .value("eps", &s.eps)
                    .value("constants", nums(&values))
                    .value("strictly_decreasing", decreasing)
                    .value(
                        "set",
                        json!(if s.set == DenjoySet::Punctures {
                            "punctures"
                        } else {
                            "limit_set"
                        }),
                    ),
            );
        }
    }
    report.finish();
    Ok(report)
}
