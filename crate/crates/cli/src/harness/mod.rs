//! Subcommand implementations. Each returns a finished [`Report`].

mod carleson;
mod denjoy;
mod group_build;
mod sec4;
mod thm13;

use std::path::Path;
use std::sync::Arc;

use carleson_core::fundomain::FundamentalDomainView;
use carleson_core::group::OrbitTable;
use carleson_core::moebius::{Model, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use carleson::carleson;
pub use denjoy::denjoy_homogeneity;
pub use group_build::group_build;
pub use sec4::verify_sec4;
pub use thm13::verify_thm13;

use crate::config::{ConfigResult, RunConfig};
use crate::report::{num, Report};

pub fn rng(cfg: &RunConfig) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed)
}

/// Table and domain view for a table, flagging an exhausted budget.
pub(crate) fn domain_of(table: OrbitTable, report: &mut Report) -> Arc<FundamentalDomainView> {
    if table.budget_exceeded {
        report.truncation.budget_exceeded = true;
    }
    Arc::new(FundamentalDomainView::new(Arc::new(table)))
}

/// Boundary coordinate of a point: the polar angle on the disk, the
/// abscissa on the half-plane.
pub(crate) fn boundary_coord(z: C64, model: Model) -> f64 {
    match model {
        Model::Disk => carleson_core::geometry::normalize_angle(z.arg()),
        _ => z.re,
    }
}

/// At most `max` evenly spaced elements, endpoints included.
pub(crate) fn subsample<T: Clone>(v: &[T], max: Option<usize>) -> Vec<T> {
    match max {
        Some(m) if v.len() > m && m >= 2 => (0..m)
            .map(|k| v[k * (v.len() - 1) / (m - 1)].clone())
            .collect(),
        Some(m) if v.len() > m => v[..m].to_vec(),
        _ => v.to_vec(),
    }
}

pub(crate) fn nums(v: &[f64]) -> Vec<serde_json::Value> {
    v.iter().map(|&x| num(x)).collect()
}

/// Runs a command by name.
pub fn run(command: &str, cfg: &RunConfig, base_dir: &Path) -> ConfigResult<Report> {
    cfg.validate()?;
    match command {
        "group-build" => group_build(cfg).map(|(r, _)| r),
        "carleson" => carleson(cfg, base_dir),
        "verify-thm13" => verify_thm13(cfg, base_dir),
        "verify-sec4" => verify_sec4(cfg),
        "denjoy-homogeneity" => denjoy_homogeneity(cfg),
        other => Err(crate::config::ConfigError(format!(
            "unknown command {other}"
        ))),
    }
}
