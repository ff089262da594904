//! Euclidean circles and lines, their Möbius images, and crossings with the
//! slice curves used by the quadrature (circles `|z| = ρ` in the disk and
//! horizontal lines `Im z = s` in the half-plane).

use std::f64::consts::{PI, TAU};

use crate::moebius::{MoebiusMap, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: C64,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: C64, radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn contains(&self, z: C64) -> bool {
        (z - self.center).norm() < self.radius
    }

    /// `|z - c| - r`: positive outside.
    pub fn side_offset(&self, z: C64) -> f64 {
        (z - self.center).norm() - self.radius
    }

    pub fn point(&self, angle: f64) -> C64 {
        self.center + C64::from_polar(self.radius, angle)
    }

    /// Whether the open disks overlap.
    pub fn overlaps(&self, other: &Circle) -> bool {
        (self.center - other.center).norm() < self.radius + other.radius
    }

    /// Whether `other` (closed) lies inside this open disk.
    pub fn contains_circle(&self, other: &Circle) -> bool {
        (self.center - other.center).norm() + other.radius < self.radius
    }
}

/// A circle or a straight line of the extended plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GenCircle {
    Circle(Circle),
    /// Line through `point` with unit direction `dir`.
    Line {
        point: C64,
        dir: C64,
    },
}

impl GenCircle {
    /// Circle (or line) through three distinct points.
    pub fn through(p: C64, q: C64, r: C64) -> GenCircle {
        let (ax, ay) = (p.re, p.im);
        let (bx, by) = (q.re, q.im);
        let (cx, cy) = (r.re, r.im);
        let d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
        let scale = (q - p).norm().max((r - p).norm()).max((r - q).norm());
        if d.abs() <= 1e-12 * scale * scale {
            let dir = if (q - p).norm() > (r - p).norm() {
                q - p
            } else {
                r - p
            };
            return GenCircle::Line {
                point: p,
                dir: dir / dir.norm(),
            };
        }
        let (a2, b2, c2) = (ax * ax + ay * ay, bx * bx + by * by, cx * cx + cy * cy);
        let ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
        let uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
        let center = C64::new(ux, uy);
        GenCircle::Circle(Circle::new(center, (p - center).norm()))
    }

    /// Image under a Möbius map; `None` if the image degenerates.
    pub fn image(&self, map: &MoebiusMap) -> Option<GenCircle> {
        if let GenCircle::Circle(c) = self {
            let z0 = if map.is_conformal() {
                c.center
            } else {
                c.center.conj()
            };
            let q = map.c * z0 + map.d;
            let cr2 = map.c.norm_sqr() * c.radius * c.radius;
            let den = q.norm_sqr() - cr2;
            if den.abs() > 1e-9 * q.norm_sqr().max(cr2) {
                let center = ((map.a * z0 + map.b) * q.conj()
                    - map.a * map.c.conj() * c.radius * c.radius)
                    / den;
                let radius = c.radius * map.det().norm() / den.abs();
                return Some(GenCircle::Circle(Circle::new(center, radius)));
            }
        }
        let pts: Vec<C64> = match self {
            GenCircle::Circle(c) => (0..3)
                .map(|k| c.point(0.3 + k as f64 * TAU / 3.0))
                .collect(),
            GenCircle::Line { point, dir } => {
                (0..3).map(|k| point + dir * (k as f64 - 1.0)).collect()
            }
        };
        // Avoid the pole by nudging sample angles if needed.
        let mut imgs = Vec::with_capacity(3);
        for (k, p) in pts.iter().enumerate() {
            match map.apply(*p) {
                Ok(w) if w.norm() < 1e12 => imgs.push(w),
                _ => {
                    let alt = match self {
                        GenCircle::Circle(c) => c.point(1.7 + k as f64),
                        GenCircle::Line { point, dir } => point + dir * (2.5 + k as f64),
                    };
                    imgs.push(map.apply(alt).ok()?);
                }
            }
        }
        Some(GenCircle::through(imgs[0], imgs[1], imgs[2]))
    }

    /// Signed offset: negative inside a circle / to the left of a line.
    pub fn side(&self, z: C64) -> f64 {
        match self {
            GenCircle::Circle(c) => (z - c.center).norm() - c.radius,
            GenCircle::Line { point, dir } => {
                let v = z - point;
                -(dir.re * v.im - dir.im * v.re)
            }
        }
    }

    /// Euclidean bounding box `(xmin, xmax, ymin, ymax)`; lines are unbounded.
    pub fn bbox(&self) -> (f64, f64, f64, f64) {
        match self {
            GenCircle::Circle(c) => (
                c.center.re - c.radius,
                c.center.re + c.radius,
                c.center.im - c.radius,
                c.center.im + c.radius,
            ),
            GenCircle::Line { .. } => (
                f64::NEG_INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::INFINITY,
            ),
        }
    }

    /// Angles `θ` (unnormalized) where the circle `|z| = rho` meets this curve.
    pub fn crossings_with_origin_circle(&self, rho: f64) -> Vec<f64> {
        match self {
            GenCircle::Circle(c) => {
                let d = c.center.norm();
                if d == 0.0 || d > rho + c.radius || d < (rho - c.radius).abs() {
                    return Vec::new();
                }
                let cosv =
                    ((rho * rho + d * d - c.radius * c.radius) / (2.0 * rho * d)).clamp(-1.0, 1.0);
                let off = cosv.acos();
                let base = c.center.arg();
                vec![base - off, base + off]
            }
            GenCircle::Line { point, dir } => {
                // |p + t u|^2 = rho^2
                let b = point.re * dir.re + point.im * dir.im;
                let cc = point.norm_sqr() - rho * rho;
                let disc = b * b - cc;
                if disc < 0.0 {
                    return Vec::new();
                }
                let sq = disc.sqrt();
                [-b - sq, -b + sq]
                    .iter()
                    .map(|t| (point + dir * *t).arg())
                    .collect()
            }
        }
    }

    /// Abscissae where the horizontal line `Im z = s` meets this curve.
    pub fn crossings_with_horizontal(&self, s: f64) -> Vec<f64> {
        match self {
            GenCircle::Circle(c) => {
                let dy = s - c.center.im;
                let h = c.radius * c.radius - dy * dy;
                if h < 0.0 {
                    return Vec::new();
                }
                let h = h.sqrt();
                vec![c.center.re - h, c.center.re + h]
            }
            GenCircle::Line { point, dir } => {
                if dir.im.abs() < 1e-15 {
                    return Vec::new();
                }
                let t = (s - point.im) / dir.im;
                vec![point.re + t * dir.re]
            }
        }
    }

    /// Intersection points with another generalized circle.
    pub fn intersections(&self, other: &GenCircle) -> Vec<C64> {
        match (self, other) {
            (GenCircle::Circle(a), GenCircle::Circle(b)) => {
                let d = (b.center - a.center).norm();
                if d == 0.0 || d > a.radius + b.radius || d < (a.radius - b.radius).abs() {
                    return Vec::new();
                }
                let x = (d * d + a.radius * a.radius - b.radius * b.radius) / (2.0 * d);
                let h = (a.radius * a.radius - x * x).max(0.0).sqrt();
                let u = (b.center - a.center) / d;
                let base = a.center + u * x;
                let n = u * C64::new(0.0, 1.0);
                vec![base + n * h, base - n * h]
            }
            (GenCircle::Line { point, dir }, c @ GenCircle::Circle(_))
            | (c @ GenCircle::Circle(_), GenCircle::Line { point, dir }) => c
                .crossings_with_ray(*point, *dir)
                .into_iter()
                .map(|t| point + dir * t)
                .collect(),
            (GenCircle::Line { point, dir }, l @ GenCircle::Line { .. }) => l
                .crossings_with_ray(*point, *dir)
                .into_iter()
                .map(|t| point + dir * t)
                .collect(),
        }
    }

    /// Parameters `t` where the ray `origin + t·dir` (unit dir) meets this curve.
    pub fn crossings_with_ray(&self, origin: C64, dir: C64) -> Vec<f64> {
        match self {
            GenCircle::Circle(c) => {
                let v = origin - c.center;
                let b = v.re * dir.re + v.im * dir.im;
                let cc = v.norm_sqr() - c.radius * c.radius;
                let disc = b * b - cc;
                if disc < 0.0 {
                    return Vec::new();
                }
                let sq = disc.sqrt();
                vec![-b - sq, -b + sq]
            }
            GenCircle::Line { point, dir: u } => {
                let den = dir.re * u.im - dir.im * u.re;
                if den.abs() < 1e-15 {
                    return Vec::new();
                }
                let w = point - origin;
                vec![(w.re * u.im - w.im * u.re) / den]
            }
        }
    }
}

/// Wraps `theta` into `[lo, lo + 2π)`.
pub fn wrap_from(theta: f64, lo: f64) -> f64 {
    let mut t = (theta - lo).rem_euclid(TAU) + lo;
    if t >= lo + TAU {
        t -= TAU;
    }
    t
}

pub fn normalize_angle(theta: f64) -> f64 {
    wrap_from(theta, 0.0)
}

/// Angular interval `[start, end]` (end may exceed 2π) seen from the origin
/// that contains the closed disk; `None` if the disk contains the origin.
pub fn angular_extent(c: &Circle) -> Option<(f64, f64)> {
    let d = c.center.norm();
    if d <= c.radius {
        return None;
    }
    let half = (c.radius / d).asin();
    let mid = normalize_angle(c.center.arg());
    Some((mid - half, mid + half))
}

/// Bucketed spatial index of generalized circles by polar angle (disk model)
/// or abscissa (half-plane model).
#[derive(Debug, Clone)]
pub struct CircleIndex {
    items: Vec<GenCircle>,
    key_lo: f64,
    key_hi: f64,
    bins: Vec<Vec<u32>>,
    global: Vec<u32>,
    polar: bool,
}

const INDEX_BINS: usize = 2048;
const MAX_BINS_PER_ITEM: usize = 64;

impl CircleIndex {
    /// Index keyed by polar angle around the origin.
    pub fn polar(items: Vec<GenCircle>) -> Self {
        let mut idx = Self {
            items,
            key_lo: 0.0,
            key_hi: TAU,
            bins: vec![Vec::new(); INDEX_BINS],
            global: Vec::new(),
            polar: true,
        };
        for i in 0..idx.items.len() {
            let ext = match idx.items[i] {
                GenCircle::Circle(c) => angular_extent(&c),
                GenCircle::Line { .. } => None,
            };
            idx.insert(i, ext);
        }
        idx
    }

    /// Index keyed by the real part.
    pub fn horizontal(items: Vec<GenCircle>) -> Self {
        let finite: Vec<(f64, f64)> = items
            .iter()
            .filter_map(|g| match g {
                GenCircle::Circle(c) => Some((c.center.re - c.radius, c.center.re + c.radius)),
                _ => None,
            })
            .collect();
        let lo = finite.iter().map(|e| e.0).fold(f64::INFINITY, f64::min);
        let hi = finite.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = if lo.is_finite() && hi > lo {
            (lo, hi)
        } else {
            (0.0, 1.0)
        };
        let mut idx = Self {
            items,
            key_lo: lo,
            key_hi: hi,
            bins: vec![Vec::new(); INDEX_BINS],
            global: Vec::new(),
            polar: false,
        };
        for i in 0..idx.items.len() {
            let ext = match idx.items[i] {
                GenCircle::Circle(c) => Some((c.center.re - c.radius, c.center.re + c.radius)),
                GenCircle::Line { .. } => None,
            };
            idx.insert(i, ext);
        }
        idx
    }

    fn bin_of(&self, key: f64) -> i64 {
        let t = (key - self.key_lo) / (self.key_hi - self.key_lo);
        (t * INDEX_BINS as f64).floor() as i64
    }

    fn insert(&mut self, i: usize, ext: Option<(f64, f64)>) {
        let Some((a, b)) = ext else {
            self.global.push(i as u32);
            return;
        };
        let (ba, bb) = (self.bin_of(a), self.bin_of(b));
        if (bb - ba) as usize >= MAX_BINS_PER_ITEM {
            self.global.push(i as u32);
            return;
        }
        for k in ba..=bb {
            let slot = if self.polar {
                k.rem_euclid(INDEX_BINS as i64) as usize
            } else {
                k.clamp(0, INDEX_BINS as i64 - 1) as usize
            };
            self.bins[slot].push(i as u32);
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[GenCircle] {
        &self.items
    }

    /// Items whose key extent may meet `[a, b]`.
    pub fn query(&self, a: f64, b: f64) -> Vec<GenCircle> {
        let mut ids: Vec<u32> = self.global.clone();
        if self.polar && b - a >= TAU {
            ids.extend(self.bins.iter().flatten());
        } else {
            let (ba, bb) = (self.bin_of(a), self.bin_of(b));
            for k in ba..=bb {
                let slot = if self.polar {
                    k.rem_euclid(INDEX_BINS as i64) as usize
                } else {
                    if k < 0 || k >= INDEX_BINS as i64 {
                        continue;
                    }
                    k as usize
                };
                ids.extend_from_slice(&self.bins[slot]);
            }
            if !self.polar {
                // Items clamped into the edge bins.
                if ba < 0 {
                    ids.extend_from_slice(&self.bins[0]);
                }
                if bb >= INDEX_BINS as i64 {
                    ids.extend_from_slice(&self.bins[INDEX_BINS - 1]);
                }
            }
        }
        ids.sort_unstable();
        ids.dedup();
        ids.into_iter().map(|i| self.items[i as usize]).collect()
    }
}

/// Half-width of the polar-angle window of the cap `B(ξ, r)` at the circle
/// `|z| = 1 - s`, for `ξ` on the unit circle. `None` when empty; `π` when the
/// whole circle lies in the cap.
pub fn cap_half_angle(s: f64, r: f64) -> Option<f64> {
    let rho = 1.0 - s;
    if rho <= 0.0 {
        return if r > 1.0 { Some(PI) } else { None };
    }
    let x = (rho * rho + 1.0 - r * r) / (2.0 * rho);
    if x >= 1.0 {
        None
    } else if x <= -1.0 {
        Some(PI)
    } else {
        Some(x.acos())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::{Model, MoebiusMap};

    #[test]
    fn circle_through_three_points() {
        let g = GenCircle::through(C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0));
        match g {
            GenCircle::Circle(c) => {
                assert!(c.center.norm() < 1e-14);
                assert!((c.radius - 1.0).abs() < 1e-14);
            }
            _ => panic!("expected circle"),
        }
        let l = GenCircle::through(C64::new(0.0, 0.0), C64::new(1.0, 1.0), C64::new(2.0, 2.0));
        assert!(matches!(l, GenCircle::Line { .. }));
    }

    #[test]
    fn cayley_maps_unit_circle_to_real_line() {
        let k = MoebiusMap::cayley_inv();
        let unit = GenCircle::Circle(Circle::new(C64::new(0.0, 0.0), 1.0));
        match unit.image(&k).unwrap() {
            GenCircle::Line { point, dir } => {
                assert!(point.im.abs() < 1e-9);
                assert!(dir.im.abs() < 1e-9);
            }
            GenCircle::Circle(c) => panic!("expected line, got {c:?}"),
        }
        let _ = Model::Plane;
    }

    #[test]
    fn crossings() {
        let c = GenCircle::Circle(Circle::new(C64::new(2.0, 0.0), 1.0));
        let xs = c.crossings_with_horizontal(0.0);
        assert_eq!(xs, vec![1.0, 3.0]);
        let th = c.crossings_with_origin_circle(2.0);
        for t in th {
            let z = C64::from_polar(2.0, t);
            assert!(((z - C64::new(2.0, 0.0)).norm() - 1.0).abs() < 1e-12);
        }
        let ts = c.crossings_with_ray(C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        assert!((ts[0] - 1.0).abs() < 1e-14 && (ts[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn index_returns_overlapping() {
        let items: Vec<GenCircle> = (0..100)
            .map(|k| {
                let a = k as f64 * TAU / 100.0;
                GenCircle::Circle(Circle::new(C64::from_polar(1.1, a), 0.05))
            })
            .collect();
        let idx = CircleIndex::polar(items);
        let hits = idx.query(0.0, 0.1);
        assert!(hits.len() >= 2 && hits.len() < 10);
    }

    #[test]
    fn cap_window() {
        assert_eq!(cap_half_angle(0.5, 0.4), None);
        assert_eq!(cap_half_angle(0.9, 1.5), Some(PI));
        let h = cap_half_angle(0.01, 0.5).unwrap();
        let z = C64::from_polar(0.99, h);
        assert!(((z - 1.0).norm() - 0.5).abs() < 1e-12);
    }
}
