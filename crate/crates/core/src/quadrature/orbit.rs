//! Change of variables over the orbit of the fundamental domain.
//!
//! For a group-compatible field, the cap integral splits over tiles, and
//! each tile term pulls back to `F`:
//! `∬_{B} |μ|²/(1-|w|²) = Σ_g ∬_{g⁻¹(B) ∩ F} |μ(z)|² |g'(z)| / (1-|z|²)`.
//! The left side is computed by [`box_integral`], the right side term by term
//! in polar coordinates around each support ball of the field on `F`.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::Serialize;

use super::boxes::{box_integral, CarlesonQuery, IntegralResult, Restriction};
use super::gk::integrate;
use crate::beltrami::{BeltramiField, ExtensionMode};
use crate::error::{Error, Result};
use crate::geometry::{Circle, GenCircle};
use crate::moebius::{Model, MoebiusMap, C64};

#[derive(Debug, Clone, Serialize)]
pub struct OrbitDecomposition {
    pub lhs: IntegralResult,
    pub rhs: f64,
    pub residual: f64,
    /// Contribution of the longest words to the right side.
    pub frontier_increment: f64,
    /// Table entries whose tile meets the cap.
    pub terms: usize,
    pub depth: usize,
}

/// `∬_{K ∩ g⁻¹(B)} |μ|² |g'| / (1-|z|²)` over one support ball `K ⊂ F`.
fn tile_term(base: &BeltramiField, g: &MoebiusMap, ball: &Circle, cap: &Circle, tol: f64) -> f64 {
    let image = match GenCircle::Circle(*ball).image(g) {
        Some(GenCircle::Circle(c)) => c,
        _ => return 0.0,
    };
    if !image.overlaps(cap) {
        return 0.0;
    }
    let whole = cap.contains_circle(&image);
    let cut = if whole {
        None
    } else {
        GenCircle::Circle(*cap).image(&g.inverse())
    };
    let inside_cap = |z: C64| whole || g.apply(z).map_or(false, |w| cap.contains(w));
    let integrand =
        |z: C64| base.evaluate(z).norm_sqr() * g.derivative_modulus(z) / (1.0 - z.norm_sqr());
    let radial = |phi: f64| {
        let dir = C64::from_polar(1.0, phi);
        let mut cuts = vec![0.0, ball.radius];
        if let Some(c) = &cut {
            cuts.extend(
                c.crossings_with_ray(ball.center, dir)
                    .into_iter()
                    .filter(|t| *t > 0.0 && *t < ball.radius),
            );
        }
        cuts.sort_by(f64::total_cmp);
        let mut acc = 0.0;
        for w in cuts.windows(2) {
            let mid = ball.center + dir * (0.5 * (w[0] + w[1]));
            if w[1] > w[0] && inside_cap(mid) {
                let r = integrate(
                    |t| integrand(ball.center + dir * t) * t,
                    w[0],
                    w[1],
                    tol / (10.0 * TAU),
                    200,
                );
                acc += r.value;
            }
        }
        acc
    };
    let pieces = 8;
    (0..pieces)
        .map(|k| {
            let a = TAU * k as f64 / pieces as f64;
            let b = TAU * (k + 1) as f64 / pieces as f64;
            integrate(radial, a, b, tol / pieces as f64, 400).value
        })
        .sum()
}

/// Compares both sides of the orbit change of variables for an invariant
/// extension on the disk.
pub fn orbit_decomposition_check(
    field: &BeltramiField,
    query: &CarlesonQuery,
    tol: f64,
) -> Result<OrbitDecomposition> {
    let (base, domain, mode) = field.extension_parts().ok_or_else(|| {
        Error::InvalidArgument("orbit decomposition needs an invariant extension".into())
    })?;
    if mode != ExtensionMode::Transported {
        return Err(Error::InvalidArgument(
            "the literal extension is not group-compatible".into(),
        ));
    }
    if field.model != Model::Disk || query.model() != Model::Disk {
        return Err(Error::ModelMismatch(field.model, Model::Disk));
    }
    if !matches!(query.restriction, Restriction::None) {
        return Err(Error::InvalidArgument(
            "orbit decomposition integrates the unrestricted field".into(),
        ));
    }
    let balls = base.support_balls().ok_or_else(|| {
        Error::InvalidArgument("field on the domain needs compact support in balls".into())
    })?;
    for (i, b) in balls.iter().enumerate() {
        if !domain.contains_ball_disk(b) {
            return Err(Error::InvalidArgument(format!(
                "support ball {i} is not inside the domain"
            )));
        }
        if balls[..i].iter().any(|o| o.overlaps(b)) {
            return Err(Error::InvalidArgument("support balls overlap".into()));
        }
    }

    let lhs = box_integral(field, query, tol)?;
    let table = domain.table();
    let cap = Circle::new(query.xi, query.r);
    let hits: Vec<usize> = (0..table.len())
        .filter(|&i| {
            balls.iter().any(
                |b| match GenCircle::Circle(*b).image(&table.entries[i].disk_map) {
                    Some(GenCircle::Circle(c)) => c.overlaps(&cap),
                    _ => false,
                },
            )
        })
        .collect();
    let term_tol = tol / (4.0 * hits.len().max(1) as f64 * balls.len().max(1) as f64);
    let terms: Vec<f64> = hits
        .par_iter()
        .map(|&i| {
            balls
                .iter()
                .map(|b| tile_term(base, &table.entries[i].disk_map, b, &cap, term_tol))
                .sum()
        })
        .collect();
    let rhs: f64 = terms.iter().sum();
    let max_len = table.max_len();
    let frontier_increment = hits
        .iter()
        .zip(&terms)
        .filter(|(&i, _)| table.entries[i].word_len() == max_len && max_len > 0)
        .map(|(_, t)| t)
        .sum();
    Ok(OrbitDecomposition {
        residual: (lhs.value - rhs).abs(),
        lhs,
        rhs,
        frontier_increment,
        terms: hits.len(),
        depth: domain.depth(),
    })
}
