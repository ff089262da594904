use carleson_core::group::{limit_set_sample, poincare_partial_sums};
use carleson_core::moebius::{Model, C64};
use serde_json::json;

use super::{boundary_coord, domain_of, nums, subsample};
use crate::config::{ConfigResult, RunConfig};
use crate::render;
use crate::report::{num, Record, Report, Status};

/// Orbit table summary, Poincaré partial sums, limit-set sample and the
/// domain's boundary at infinity. Returns the tiling SVG when requested.
pub fn group_build(cfg: &RunConfig) -> ConfigResult<(Report, Option<String>)> {
    let depth = cfg.depth.word_length;
    let mut report = Report::new("group-build", cfg.seed, Some(depth));
    let table = cfg.table()?;
    let model = table.model();
    let counts = table.counts_by_length();
    let min_height = table
        .entries
        .iter()
        .map(|e| e.height)
        .fold(f64::INFINITY, f64::min);
    report.push(
        Record::new(
            "orbit_table",
            "word_enumeration",
            Some(depth),
            Status::Diagnostic,
        )
        .value("model", model)
        .value("generators", &table.generators.labels)
        .value("entries", table.len())
        .value("counts_by_length", &counts)
        .value("min_height", num(min_height))
        .value("budget_exceeded", table.budget_exceeded),
    );

    let sums = poincare_partial_sums(&table, 1.0);
    let last_inc = match sums.height_sums.len() {
        n if n >= 2 => sums.height_sums[n - 1] - sums.height_sums[n - 2],
        _ => 0.0,
    };
    report.push(
        Record::new(
            "poincare_sums",
            "poincare_series_partial_sums",
            Some(depth),
            Status::Diagnostic,
        )
        .value("exponent", sums.exponent)
        .value("height_sums", nums(&sums.height_sums))
        .value("exp_sums", nums(&sums.exp_sums))
        .value("last_increment", num(last_inc)),
    );

    let seeds: Vec<C64> = cfg
        .group
        .seeds
        .iter()
        .map(|&t| match model {
            Model::Disk => C64::from_polar(1.0, t),
            _ => C64::new(t, 0.0),
        })
        .collect();
    let sample = limit_set_sample(&table, &seeds);
    let coords: Vec<f64> = sample.iter().map(|&z| boundary_coord(z, model)).collect();
    report.push(
        Record::new(
            "limit_set_sample",
            "orbit_of_boundary_seeds",
            Some(depth),
            Status::Diagnostic,
        )
        .value("count", sample.len())
        .value(
            "coordinate",
            if model == Model::Disk {
                "angle"
            } else {
                "abscissa"
            },
        )
        .value(
            "points",
            nums(&subsample(&coords, cfg.output.max_points.or(Some(1000)))),
        ),
    );

    let fd = domain_of(table, &mut report);
    let ib = fd.infinite_boundary(cfg.tolerance.resolution)?;
    let defect = fd
        .sides()
        .iter()
        .map(|s| s.orthogonality_defect())
        .fold(0.0, f64::max);
    let cusps: Vec<serde_json::Value> = ib
        .cusps
        .iter()
        .map(|c| {
            let mut v = json!({ "angle": num(c.angle), "disk_radii": [num(c.disk_radii.0), num(c.disk_radii.1)] });
            if let Some(h) = c.halfplane {
                v["zeta"] = num(h.zeta);
                v["radii"] = json!([num(h.r_left), num(h.r_right)]);
            }
            v
        })
        .collect();
    report.push(
        Record::new(
            "fundamental_domain",
            "dirichlet_domain_boundary_at_infinity",
            Some(depth),
            Status::Diagnostic,
        )
        .value("sides", fd.sides().len())
        .value("max_orthogonality_defect", num(defect))
        .value("free_arcs", ib.arcs.len())
        .value("arc_measure", num(ib.arc_measure))
        .value(
            "arcs",
            ib.arcs
                .iter()
                .map(|a| [num(a.0), num(a.1)])
                .collect::<Vec<_>>(),
        )
        .value("cusps", cusps)
        .value("unmatched_contacts", ib.unmatched_contacts),
    );
    let svg = cfg.output.svg.then(|| render::tiles_svg(&fd, &cfg.render));
    report.finish();
    Ok((report, svg))
}
