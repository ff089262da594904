//! Carleson-norm estimates: the largest ratio `I(ξ, r) / r` over a grid.

use rayon::prelude::*;
use serde::Serialize;

use super::boxes::{box_integral, CarlesonQuery, Restriction, Weight};
use crate::beltrami::BeltramiField;
use crate::error::Result;
use crate::moebius::{Model, C64};

#[derive(Debug, Clone, Serialize)]
pub struct CarlesonEntry {
    pub xi: C64,
    pub r: f64,
    pub value: f64,
    pub ratio: f64,
    pub error_estimate: f64,
    pub levels: usize,
    pub diverged: bool,
    pub growth_per_level: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CarlesonReport {
    pub entries: Vec<CarlesonEntry>,
    pub sup_ratio: f64,
    pub argmax: Option<usize>,
    pub any_diverged: bool,
    pub weight: Weight,
    pub restriction: String,
    pub depth: Option<usize>,
}

/// Dyadic radii `2^0, 2^-1, …, 2^-(levels-1)`.
pub fn dyadic_radii(levels: usize) -> Vec<f64> {
    (0..levels).map(|k| 0.5f64.powi(k as i32)).collect()
}

/// Evaluates `I(ξ, r)` over `ξ_samples × r_grid` (in parallel, results in
/// grid order). The weight is the Carleson weight of the field's model.
pub fn carleson_norm_estimate(
    field: &BeltramiField,
    xi_samples: &[C64],
    r_grid: &[f64],
    restriction: Restriction,
    tol: f64,
) -> Result<CarlesonReport> {
    let weight = match field.model {
        Model::Disk => Weight::DiskCarleson,
        _ => Weight::HalfplaneCarleson,
    };
    let queries: Vec<CarlesonQuery> = xi_samples
        .iter()
        .flat_map(|&xi| {
            let restriction = restriction.clone();
            r_grid.iter().map(move |&r| CarlesonQuery {
                xi,
                r,
                weight,
                restriction: restriction.clone(),
                window: None,
            })
        })
        .collect();
    let results: Vec<Result<CarlesonEntry>> = queries
        .par_iter()
        .map(|q| {
            let res = box_integral(field, q, tol)?;
            Ok(CarlesonEntry {
                xi: q.xi,
                r: q.r,
                value: res.value,
                ratio: res.value / q.r,
                error_estimate: res.error_estimate,
                levels: res.refinement_levels,
                diverged: res.diverged,
                growth_per_level: res.growth_per_level,
            })
        })
        .collect();
    let entries = results.into_iter().collect::<Result<Vec<_>>>()?;
    let mut argmax = None;
    let mut sup_ratio = 0.0;
    for (i, e) in entries.iter().enumerate() {
        if argmax.is_none() || e.ratio > sup_ratio {
            sup_ratio = e.ratio;
            argmax = Some(i);
        }
    }
    Ok(CarlesonReport {
        any_diverged: entries.iter().any(|e| e.diverged),
        sup_ratio,
        argmax,
        weight,
        depth: restriction.depth(),
        restriction: restriction.describe(),
        entries,
    })
}
