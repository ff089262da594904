//! Integrals of `|μ|² · weight` over boundary caps `B(ξ, r)`.
//!
//! The cap is sliced by curves at constant distance `s` from the model
//! boundary: circles `|z| = 1 - s` in the disk, lines `Im z = s` in the
//! half-plane. Each slice meets the cap in an exact parameter interval, and
//! every known discontinuity of the integrand (field supports, domain sides)
//! is cut out analytically, so the inner integrals are smooth. The `s`
//! direction is split into dyadic layers toward the boundary; layer
//! increments that stop decaying signal a non-integrable singularity.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use super::gk::{integrate, GkResult};
use crate::beltrami::{BeltramiField, FieldKind, LocalField};
use crate::error::{Error, Result};
use crate::fundomain::FundamentalDomainView;
use crate::geometry::{cap_half_angle, wrap_from, Circle, GenCircle};
use crate::moebius::{Model, C64};

/// A layer whose increment is at least this fraction of the previous one
/// counts as non-decaying.
pub const DIVERGENCE_THRESHOLD: f64 = 0.75;
/// Consecutive non-decaying layers needed to declare divergence.
pub const DIVERGENCE_RUN: usize = 4;
const MIN_LEVELS: usize = 6;
const MAX_LEVELS: usize = 44;
const OUTER_PANELS: usize = 400;
const INNER_PANELS: usize = 200;
/// Above this many curves, pairwise crossings are not used as breakpoints.
const PAIRWISE_LIMIT: usize = 400;
/// Inward margin of domain membership, relative to the point's scale: a
/// few ulps, the accuracy of side circles built from exact matrices.
const RESTRICTION_MARGIN: f64 = 8.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Weight {
    /// `1 / (1 - |z|²)` on the disk.
    DiskCarleson,
    /// `1 / Im z` on the half-plane.
    HalfplaneCarleson,
    /// `1 / (4 (Im z)²)`, the hyperbolic area density on the half-plane.
    HalfplaneArea,
}

impl Weight {
    pub fn model(self) -> Model {
        match self {
            Weight::DiskCarleson => Model::Disk,
            _ => Model::Halfplane,
        }
    }

    /// Weight times the slice Jacobian, as a function of the slice depth.
    fn density(self, s: f64) -> f64 {
        match self {
            Weight::DiskCarleson => (1.0 - s) / (s * (2.0 - s)),
            Weight::HalfplaneCarleson => 1.0 / s,
            Weight::HalfplaneArea => 0.25 / (s * s),
        }
    }
}

/// Optional indicator multiplied into the integrand.
#[derive(Debug, Clone)]
pub enum Restriction {
    None,
    /// The fundamental domain `F` (in the query's model).
    Domain(Arc<FundamentalDomainView>),
    /// The tile `γ(F)` of one table entry.
    Tile {
        domain: Arc<FundamentalDomainView>,
        entry: usize,
    },
}

impl Restriction {
    pub fn describe(&self) -> String {
        match self {
            Restriction::None => "none".into(),
            Restriction::Domain(_) => "fundamental_domain".into(),
            Restriction::Tile { domain, entry } => {
                format!(
                    "tile:{}",
                    domain
                        .table()
                        .generators
                        .word_label(&domain.table().entries[*entry].word)
                )
            }
        }
    }

    pub fn depth(&self) -> Option<usize> {
        match self {
            Restriction::None => None,
            Restriction::Domain(d) | Restriction::Tile { domain: d, .. } => Some(d.depth()),
        }
    }

    fn check_model(&self, model: Model) -> Result<()> {
        match self {
            Restriction::Domain(d) | Restriction::Tile { domain: d, .. }
                if model == Model::Halfplane && d.model() != Model::Halfplane =>
            {
                Err(Error::ModelMismatch(model, d.model()))
            }
            _ => Ok(()),
        }
    }

    /// Membership with a small inward margin: a slice piece narrower than
    /// rounding noise between two tangent sides counts as outside, so a
    /// cusp never leaks a spurious gap toward the boundary.
    fn contains(&self, model: Model, z: C64) -> bool {
        let inside = |d: &FundamentalDomainView, w: C64| match model {
            Model::Disk => d.margin_disk(w) > 2.0 * RESTRICTION_MARGIN,
            _ => d.margin(w) > RESTRICTION_MARGIN * (1.0 + w.norm()),
        };
        match self {
            Restriction::None => true,
            Restriction::Domain(d) => inside(d, z),
            Restriction::Tile { domain, entry } => {
                let e = &domain.table().entries[*entry];
                let m = if model == Model::Disk {
                    e.disk_map
                } else {
                    e.map
                };
                m.inverse().apply(z).map_or(false, |w| inside(domain, w))
            }
        }
    }

    fn curves(&self, model: Model) -> Vec<GenCircle> {
        let sides = |d: &FundamentalDomainView| -> Vec<GenCircle> {
            match model {
                Model::Disk => d
                    .sides()
                    .iter()
                    .map(|s| GenCircle::Circle(s.circle))
                    .collect(),
                _ => d.native_side_index().items().to_vec(),
            }
        };
        match self {
            Restriction::None => Vec::new(),
            Restriction::Domain(d) => sides(d),
            Restriction::Tile { domain, entry } => {
                let e = &domain.table().entries[*entry];
                let m = if model == Model::Disk {
                    e.disk_map
                } else {
                    e.map
                };
                sides(domain).iter().filter_map(|c| c.image(&m)).collect()
            }
        }
    }
}

/// The cap `B(ξ, r)` together with weight, restriction and an optional
/// window on the slice parameter (angle offset from `arg ξ` in the disk,
/// abscissa offset from `ξ` in the half-plane).
#[derive(Debug, Clone)]
pub struct CarlesonQuery {
    pub xi: C64,
    pub r: f64,
    pub weight: Weight,
    pub restriction: Restriction,
    pub window: Option<(f64, f64)>,
}

impl CarlesonQuery {
    pub fn disk(theta: f64, r: f64) -> Self {
        Self {
            xi: C64::from_polar(1.0, theta),
            r,
            weight: Weight::DiskCarleson,
            restriction: Restriction::None,
            window: None,
        }
    }

    pub fn halfplane(x: f64, r: f64, weight: Weight) -> Self {
        Self {
            xi: C64::new(x, 0.0),
            r,
            weight,
            restriction: Restriction::None,
            window: None,
        }
    }

    pub fn restricted(mut self, restriction: Restriction) -> Self {
        self.restriction = restriction;
        self
    }

    pub fn windowed(mut self, lo: f64, hi: f64) -> Self {
        self.window = Some((lo, hi));
        self
    }

    pub fn model(&self) -> Model {
        self.weight.model()
    }

    pub fn validate(&self) -> Result<()> {
        match self.model() {
            Model::Disk => {
                if (self.xi.norm() - 1.0).abs() > 1e-10 {
                    return Err(Error::InvalidArgument(format!(
                        "ξ = {} is not on the unit circle",
                        self.xi
                    )));
                }
                if !(self.r > 0.0 && self.r < 2.0) {
                    return Err(Error::InvalidArgument(format!(
                        "cap radius {} outside (0, 2)",
                        self.r
                    )));
                }
            }
            _ => {
                if self.xi.im.abs() > 1e-10 || !self.xi.re.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "ξ = {} is not on the real axis",
                        self.xi
                    )));
                }
                if !(self.r > 0.0 && self.r <= 1.0) {
                    return Err(Error::InvalidArgument(format!(
                        "cap radius {} outside (0, 1]",
                        self.r
                    )));
                }
            }
        }
        self.restriction.check_model(self.model())
    }

    /// Deepest slice meeting the cap.
    fn s_top(&self) -> f64 {
        match self.model() {
            Model::Disk => self.r.min(1.0),
            _ => self.r,
        }
    }

    /// Parameter interval of the slice at depth `s` inside the cap and window.
    fn slice_range(&self, s: f64) -> Option<(f64, f64)> {
        let h = match self.model() {
            Model::Disk => cap_half_angle(s, self.r)?,
            _ => {
                let q = self.r * self.r - s * s;
                if q <= 0.0 {
                    return None;
                }
                q.sqrt()
            }
        };
        let (mut lo, mut hi) = (-h, h);
        if let Some((a, b)) = self.window {
            lo = lo.max(a);
            hi = hi.min(b);
        }
        (hi > lo).then_some((lo, hi))
    }

    fn point(&self, s: f64, t: f64) -> C64 {
        match self.model() {
            Model::Disk => C64::from_polar(1.0 - s, self.xi.arg() + t),
            _ => C64::new(self.xi.re + t, s),
        }
    }

    fn crossings(&self, curve: &GenCircle, s: f64, out: &mut Vec<f64>) {
        match self.model() {
            Model::Disk => {
                let th0 = self.xi.arg();
                out.extend(
                    curve
                        .crossings_with_origin_circle(1.0 - s)
                        .into_iter()
                        .map(|a| wrap_from(a - th0, -PI)),
                )
            }
            _ => out.extend(
                curve
                    .crossings_with_horizontal(s)
                    .into_iter()
                    .map(|x| x - self.xi.re),
            ),
        }
    }

    /// Range of depths `s` swept by a curve.
    fn depth_range(&self, curve: &GenCircle) -> (f64, f64) {
        match (self.model(), curve) {
            (Model::Disk, GenCircle::Circle(c)) => {
                let d = c.center.norm();
                let hi = if d <= c.radius {
                    1.0
                } else {
                    1.0 - (d - c.radius)
                };
                (1.0 - d - c.radius, hi)
            }
            (_, GenCircle::Circle(c)) => (c.center.im - c.radius, c.center.im + c.radius),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    fn depth_of(&self, z: C64) -> f64 {
        match self.model() {
            Model::Disk => 1.0 - z.norm(),
            _ => z.im,
        }
    }

    fn bbox_meets(&self, curve: &GenCircle) -> bool {
        let (x0, x1, y0, y1) = curve.bbox();
        x1 >= self.xi.re - self.r
            && x0 <= self.xi.re + self.r
            && y1 >= self.xi.im - self.r
            && y0 <= self.xi.im + self.r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    /// Number of dyadic layers evaluated.
    pub refinement_levels: usize,
    pub diverged: bool,
    /// Ratio of the last layer increment to the one before it.
    pub growth_per_level: f64,
    pub increments: Vec<f64>,
}

impl IntegralResult {
    pub fn zero() -> Self {
        Self {
            value: 0.0,
            error_estimate: 0.0,
            refinement_levels: 0,
            diverged: false,
            growth_per_level: 0.0,
            increments: Vec::new(),
        }
    }
}

struct Prepared<'a> {
    field: &'a BeltramiField,
    query: &'a CarlesonQuery,
    /// Curves with their depth ranges.
    curves: Vec<(GenCircle, f64, f64)>,
    /// Split slices into pieces about one slice depth wide.
    presplit: bool,
    /// Evaluate each piece through a single tile lookup.
    local: bool,
    /// `|μ|²` is constant on each piece between cuts.
    flat: bool,
}

impl Prepared<'_> {
    fn active(&self, z: C64) -> bool {
        self.field.may_be_nonzero(z) && self.query.restriction.contains(self.query.model(), z)
    }

    /// Weighted slice integral at depth `s`, using curves in `live`.
    fn slice(&self, s: f64, live: &[usize], tol: f64) -> GkResult {
        let Some((lo, hi)) = self.query.slice_range(s) else {
            return GkResult::ZERO;
        };
        let dens = self.query.weight.density(s);
        if !(dens > 0.0) || !dens.is_finite() {
            return GkResult::ZERO;
        }
        let mut cuts = vec![lo, hi];
        for &i in live {
            self.query.crossings(&self.curves[i].0, s, &mut cuts);
        }
        cuts.retain(|t| *t >= lo && *t <= hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * (1.0 + b.abs()));
        let inner_tol = tol / dens;
        let len = hi - lo;
        let mut acc = GkResult::ZERO;
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            let mid = self.query.point(s, 0.5 * (a + b));
            if self.flat {
                if self.query.restriction.contains(self.query.model(), mid) {
                    let v = self.field.evaluate(mid).norm_sqr();
                    acc = acc.add(GkResult {
                        value: v * (b - a),
                        ..GkResult::ZERO
                    });
                }
                continue;
            }
            if !self.active(mid) {
                continue;
            }
            // With compact support each piece lies in a single tile.
            let local = if self.local {
                self.field.localize(mid)
            } else {
                LocalField::Global(self.field)
            };
            let pieces = if self.presplit {
                ((b - a) / s.max(1e-12)).ceil().clamp(1.0, 64.0) as usize
            } else {
                1
            };
            let step = (b - a) / pieces as f64;
            for k in 0..pieces {
                let (pa, pb) = (
                    a + k as f64 * step,
                    if k + 1 == pieces {
                        b
                    } else {
                        a + (k + 1) as f64 * step
                    },
                );
                let share = inner_tol * (pb - pa) / len;
                let r = integrate(
                    |t| local.evaluate(self.query.point(s, t)).norm_sqr(),
                    pa,
                    pb,
                    share,
                    INNER_PANELS,
                );

                acc = acc.add(r);
            }
        }
        GkResult {
            value: acc.value * dens,
            error: acc.error * dens,
            ..acc
        }
    }
}

/// `∬_{B(ξ,r)} |μ|² · weight` (times the restriction indicator).
pub fn box_integral(
    field: &BeltramiField,
    query: &CarlesonQuery,
    tol: f64,
) -> Result<IntegralResult> {
    query.validate()?;
    if field.model != query.model() {
        return Err(Error::ModelMismatch(field.model, query.model()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if field.is_zero() {
        return Ok(IntegralResult::zero());
    }
    let model = query.model();
    let mut raw = field.discontinuities();
    raw.extend(query.restriction.curves(model));
    let curves: Vec<(GenCircle, f64, f64)> = raw
        .into_iter()
        .filter(|c| query.bbox_meets(c))
        .map(|c| {
            let (a, b) = query.depth_range(&c);
            (c, a, b)
        })
        .collect();
    let presplit = matches!(field.kind, FieldKind::InvariantExtension { .. })
        && field.support_balls().is_none();

    // Smallest depth reached by the field's support inside the cap. A
    // support bounded away from the model boundary gives a finite integral,
    // so layers must reach it before stopping and divergence is impossible.
    let s_floor = field.support_balls().map(|balls| {
        balls
            .iter()
            .map(|b| GenCircle::Circle(*b))
            .filter(|c| query.bbox_meets(c))
            .map(|c| query.depth_range(&c).0)
            .fold(f64::INFINITY, f64::min)
    });
    let compact = s_floor.map_or(false, |f| f > 0.0);
    let stop_floor = if compact {
        s_floor.unwrap_or(f64::INFINITY)
    } else {
        f64::INFINITY
    };

    // Depths where the slice topology changes: curves meeting the cap
    // boundary or each other, and the extreme depths of each curve.
    let cap = GenCircle::Circle(Circle::new(query.xi, query.r));
    let mut s_breaks: Vec<f64> = Vec::new();
    for (i, (c, lo, hi)) in curves.iter().enumerate() {
        s_breaks.extend([*lo, *hi]);
        s_breaks.extend(c.intersections(&cap).into_iter().map(|z| query.depth_of(z)));
        if curves.len() <= PAIRWISE_LIMIT {
            for (d, _, _) in &curves[..i] {
                s_breaks.extend(
                    c.intersections(d)
                        .into_iter()
                        .filter(|z| (z - query.xi).norm() < query.r)
                        .map(|z| query.depth_of(z)),
                );
            }
        }
    }
    s_breaks.retain(|s| s.is_finite() && *s > 0.0);
    s_breaks.sort_by(f64::total_cmp);
    s_breaks.dedup();

    let local = matches!(field.kind, FieldKind::InvariantExtension { .. }) && compact;
    let flat = field.piecewise_constant_modulus();
    let prep = Prepared {
        field,
        query,
        curves,
        presplit,
        local,
        flat,
    };
    let s_top = query.s_top();
    let layer_tol = tol / 64.0;
    let mut increments: Vec<f64> = Vec::new();
    let mut error = 0.0;
    let mut diverged = false;
    let mut tail: f64 = 0.0;
    let mut zero_run = 0;
    for k in 0..MAX_LEVELS {
        let s_hi = s_top * 0.5f64.powi(k as i32);
        let s_lo = 0.5 * s_hi;
        let live: Vec<usize> = (0..prep.curves.len())
            .filter(|&i| prep.curves[i].1 <= s_hi && prep.curves[i].2 >= s_lo)
            .collect();
        let slice_tol = 0.1 * layer_tol / (s_hi - s_lo);
        let lo_i = s_breaks.partition_point(|&b| b <= s_lo);
        let hi_i = s_breaks.partition_point(|&b| b < s_hi);
        let mut knots = vec![s_lo];
        knots.extend_from_slice(&s_breaks[lo_i..hi_i]);
        knots.push(s_hi);
        let mut r = GkResult::ZERO;
        let span = s_hi - s_lo;
        for w in knots.windows(2) {
            let share = layer_tol * (w[1] - w[0]) / span;
            r = r.add(integrate(
                |s| prep.slice(s, &live, slice_tol).value,
                w[0],
                w[1],
                share,
                OUTER_PANELS,
            ));
        }
        increments.push(r.value);
        error += r.error;

        let n = increments.len();
        let ratio = |j: usize| {
            if increments[j - 1] > 0.0 {
                increments[j] / increments[j - 1]
            } else if increments[j] > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        };
        if r.value == 0.0 {
            zero_run += 1;
        } else {
            zero_run = 0;
        }
        if !compact
            && n >= MIN_LEVELS
            && (n - DIVERGENCE_RUN..n).all(|j| ratio(j) >= DIVERGENCE_THRESHOLD)
        {
            diverged = true;
            break;
        }
        if n >= MIN_LEVELS && s_lo <= stop_floor {
            if zero_run >= 3 {
                tail = 0.0;
                break;
            }
            let q = ratio(n - 1).max(ratio(n - 2));
            if r.value > 0.0 && q < DIVERGENCE_THRESHOLD {
                tail = r.value * q / (1.0 - q);
                if tail < tol / 4.0 {
                    break;
                }
            }
        }
    }
    let n = increments.len();
    let growth = if n >= 2 && increments[n - 2] > 0.0 {
        increments[n - 1] / increments[n - 2]
    } else {
        0.0
    };
    let value: f64 = increments.iter().sum();
    Ok(IntegralResult {
        value: value + tail,
        error_estimate: error + tail.abs(),
        refinement_levels: n,
        diverged,
        growth_per_level: growth,
        increments,
    })
}

/// [`box_integral`] with the domain (or tile) indicator required.
pub fn restricted_integral(
    field: &BeltramiField,
    query: &CarlesonQuery,
    tol: f64,
) -> Result<IntegralResult> {
    if matches!(query.restriction, Restriction::None) {
        return Err(Error::InvalidArgument(
            "restricted integral needs a domain or tile restriction".into(),
        ));
    }
    box_integral(field, query, tol)
}
