use std::path::Path;

use carleson_core::quadrature::{carleson_norm_estimate, Restriction};
use serde_json::json;

use super::{boundary_coord, domain_of, rng};
use crate::config::{ConfigResult, RestrictionName, RunConfig, Support};
use crate::report::{num, Record, Report, Status};

/// Box integrals over the configured `(ξ, r)` grid. A diverged query is a
/// failed check.
pub fn carleson(cfg: &RunConfig, base_dir: &Path) -> ConfigResult<Report> {
    let depth = cfg.depth.word_length;
    let needs_group =
        cfg.query.restriction == RestrictionName::Domain || cfg.field.support != Support::Whole;
    let mut report = Report::new("carleson", cfg.seed, needs_group.then_some(depth));
    let gens = cfg.group.generators()?;
    let model = cfg.field.model.map(Into::into).unwrap_or(gens.model);
    let domain = if needs_group {
        Some(domain_of(cfg.table()?, &mut report))
    } else {
        None
    };
    let field = cfg.field.build(domain.as_ref(), model, base_dir)?;
    let restriction = match (&cfg.query.restriction, &domain) {
        (RestrictionName::Domain, Some(d)) => Restriction::Domain(d.clone()),
        _ => Restriction::None,
    };
    let xis = cfg.query.boundary_points(field.model, &mut rng(cfg));
    let radii = cfg.query.radii();
    let est = carleson_norm_estimate(&field, &xis, &radii, restriction, cfg.tolerance.quadrature)?;
    let rec_depth = report.depth;
    for e in &est.entries {
        report.push(
            Record::new(
                "box_integral",
                "carleson_box_condition",
                rec_depth,
                Status::from_check(!e.diverged),
            )
            .value("xi", boundary_coord(e.xi, field.model))
            .value("r", e.r)
            .value("value", num(e.value))
            .value("ratio", num(e.ratio))
            .value("error_estimate", num(e.error_estimate))
            .value("levels", e.levels)
            .value("growth_per_level", num(e.growth_per_level))
            .value("diverged", e.diverged),
        );
    }
    let argmax = est.argmax.map(|i| {
        let e = &est.entries[i];
        json!({ "xi": boundary_coord(e.xi, field.model), "r": e.r })
    });
    report.push(
        Record::new(
            "carleson_norm",
            "carleson_norm_sup_ratio",
            rec_depth,
            Status::Diagnostic,
        )
        .value("sup_ratio", num(est.sup_ratio))
        .value("argmax", argmax)
        .value("any_diverged", est.any_diverged)
        .value("weight", est.weight)
        .value("restriction", &est.restriction)
        .value("queries", est.entries.len())
        .value("truncation_events", field.truncation_events()),
    );
    report.finish();
    Ok(report)
}
