//! Dirichlet fundamental domains of a truncated group.
//!
//! All geometry happens in the disk with base point 0. For an enumerated
//! element `g` with `w = g(0)`, the points closer to `w` than to `0` form the
//! open disk `D_g` with center `w/|w|^2` and radius `sqrt(1/|w|^2 - 1)`;
//! the domain is the unit disk minus the union of these. A deeper table
//! can only remove more, so every view is an over-approximation of the
//! true domain.

use std::f64::consts::{PI, TAU};
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, wrap_from, Circle, CircleIndex, GenCircle};
use crate::group::{Letter, OrbitTable};
use crate::moebius::{cayley_inv, Classification, Model, ModelPoint, MoebiusMap, C64};

const TIE_TOL: f64 = 1e-12;
const CUSP_TOL: f64 = 1e-8;

/// A bisector supporting the boundary of the domain.
#[derive(Debug, Clone, Serialize)]
pub struct GeodesicSide {
    /// Table index of the element whose bisector this is.
    pub entry: usize,
    pub word: Vec<Letter>,
    /// Disk-model circle, orthogonal to the unit circle.
    #[serde(skip)]
    pub circle: Circle,
    /// Shadow on the unit circle: `(start, end)` with `start ∈ [0, 2π)`.
    pub shadow: (f64, f64),
    /// Sub-arcs of the geodesic lying on the domain boundary, as angles
    /// around the circle center.
    pub visible: Vec<(f64, f64)>,
}

impl GeodesicSide {
    /// Parameter range of the part of the circle inside the unit disk.
    pub fn arc_range(&self) -> (f64, f64) {
        geodesic_range(&self.circle)
    }

    /// `| |C|^2 - 1 - R^2 |`: zero for circles orthogonal to the unit circle.
    pub fn orthogonality_defect(&self) -> f64 {
        (self.circle.center.norm_sqr() - 1.0 - self.circle.radius * self.circle.radius).abs()
    }
}

fn geodesic_range(c: &Circle) -> (f64, f64) {
    let toward_origin = (-c.center).arg();
    let half = (1.0 / c.radius).atan();
    (toward_origin - half, toward_origin + half)
}

/// Bisector of `i` and `g(i)` in the half-plane, from a real matrix of
/// `g`. With `D = c^2 + d^2` it is the circle centered at `(ac + bd)/(D - 1)`
/// of radius `sqrt(a^2 + b^2 + D - 2)/|D - 1|`, or a vertical line when
/// `D = 1`. Dyadic entries give exact centers, so tangent sides stay tangent.
pub fn halfplane_bisector(g: &MoebiusMap) -> Option<GenCircle> {
    let e = [g.a, g.b, g.c, g.d];
    let re = e.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    let im = e.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let [mut a, b, mut c, d] = if re >= im {
        e.map(|z| z.re)
    } else {
        e.map(|z| z.im)
    };
    if re.min(im) > 1e-12 * re.max(im) {
        return None;
    }
    if !g.is_conformal() {
        // g(i) = M(-i) = M'(i) with M'(z) = M(-z).
        a = -a;
        c = -c;
    }
    let det = a * d - b * c;
    if !(det > 0.0) {
        return None;
    }
    let s = det.sqrt();
    let (a, b, c, d) = (a / s, b / s, c / s, d / s);
    let p = a * c + b * d;
    let dd = c * c + d * d;
    if (dd - 1.0).abs() <= 1e-14 {
        if p.abs() <= 1e-14 {
            return None;
        }
        let x = p / (2.0 * dd);
        return Some(GenCircle::Line {
            point: C64::new(x, 0.0),
            dir: C64::new(0.0, 1.0),
        });
    }
    let r2 = a * a + b * b + dd - 2.0;
    if !(r2 > 0.0) {
        return None;
    }
    Some(GenCircle::Circle(Circle::new(
        C64::new(p / (dd - 1.0), 0.0),
        r2.sqrt() / (dd - 1.0).abs(),
    )))
}

/// Bisector disk of 0 and `w`: the points hyperbolically closer to `w`.
pub fn bisector_circle(w: C64) -> Option<Circle> {
    let r = w.norm();
    if r < 1e-300 || r >= 1.0 {
        return None;
    }
    Some(Circle::new(w / (r * r), (1.0 / (r * r) - 1.0).sqrt()))
}

#[derive(Debug, Clone, Serialize)]
pub struct Cusp {
    /// Polar angle on the unit circle.
    pub angle: f64,
    #[serde(skip)]
    pub point: C64,
    /// Table entry of a parabolic element fixing the cusp.
    pub parabolic_entry: usize,
    /// Sides meeting at the cusp (indices into `sides()`), in angular order.
    pub sides: (usize, usize),
    /// Disk radii of the two side circles.
    pub disk_radii: (f64, f64),
    /// Half-plane location and adjacent side radii (left, right); infinite
    /// radius when a side is a vertical line. `None` for the cusp at infinity.
    pub halfplane: Option<HalfplaneCusp>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct HalfplaneCusp {
    pub zeta: f64,
    pub r_left: f64,
    pub r_right: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InfinityBoundary {
    /// Closed free arcs `(start, end)` of the unit circle, `end` may exceed 2π.
    pub arcs: Vec<(f64, f64)>,
    pub cusps: Vec<Cusp>,
    pub depth: usize,
    pub resolution: f64,
    /// Total angular measure of the free arcs.
    pub arc_measure: f64,
    /// Shadow contacts within resolution that are not parabolic fixed points.
    pub unmatched_contacts: usize,
}

/// Element locating a point: `γ` with `γ⁻¹(z)` in the domain.
#[derive(Debug, Clone, Copy)]
pub struct Located {
    /// Table index of `γ`, if enumerated.
    pub entry: Option<usize>,
    /// `γ` in the disk model.
    pub map: MoebiusMap,
    /// `γ⁻¹(z)` in the disk model.
    pub reduced: C64,
    /// `γ` sits on the table's depth frontier.
    pub frontier: bool,
}

impl Located {
    pub fn truncation_uncertain(&self) -> bool {
        self.frontier || self.entry.is_none()
    }
}

#[derive(Debug)]
pub struct FundamentalDomainView {
    table: Arc<OrbitTable>,
    sides: Vec<GeodesicSide>,
    max_shadow: f64,
    parabolic_angles: Vec<(f64, usize)>,
    native_sides: OnceLock<CircleIndex>,
    /// Native half-plane sides whose disk contains the base point.
    enclosing: OnceLock<Vec<GenCircle>>,
}

impl FundamentalDomainView {
    pub fn new(table: Arc<OrbitTable>) -> Self {
        let mut arcs: Vec<(f64, f64, usize, Circle)> = table
            .entries
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.word.is_empty())
            .filter_map(|(i, e)| {
                let c = bisector_circle(e.disk_base_image())?;
                let mid = normalize_angle(c.center.arg());
                let half = (1.0 / c.center.norm()).acos();
                Some((mid - half, mid + half, i, c))
            })
            .map(|(a, b, i, c)| {
                let a2 = normalize_angle(a);
                (a2, a2 + (b - a), i, c)
            })
            .collect();
        arcs.sort_by(|x, y| {
            x.0.total_cmp(&y.0)
                .then((y.1 - y.0).total_cmp(&(x.1 - x.0)))
                .then(x.2.cmp(&y.2))
        });

        // Drop shadows nested inside another one.
        let n = arcs.len();
        let mut nested = vec![false; n];
        let mut doubled: Vec<(f64, f64, usize)> = Vec::with_capacity(2 * n);
        for (k, a) in arcs.iter().enumerate() {
            doubled.push((a.0, a.1, k));
        }
        for (k, a) in arcs.iter().enumerate() {
            doubled.push((a.0 + TAU, a.1 + TAU, k));
        }
        let mut max_end = f64::NEG_INFINITY;
        for (j, &(start, end, k)) in doubled.iter().enumerate() {
            if end <= max_end + 1e-13 {
                nested[k] = true;
            }
            // A longer shadow starting a rounding error later also nests it.
            if doubled[j + 1..]
                .iter()
                .take_while(|o| o.0 <= start + 1e-13)
                .any(|o| o.1 > end + 1e-13)
            {
                nested[k] = true;
            }
            max_end = max_end.max(end);
        }
        let kept: Vec<(f64, f64, usize, Circle)> = arcs
            .into_iter()
            .zip(nested)
            .filter(|(_, n)| !n)
            .map(|(a, _)| a)
            .collect();

        let mut sides: Vec<GeodesicSide> = kept
            .iter()
            .map(|&(s, e, i, c)| GeodesicSide {
                entry: i,
                word: table.entries[i].word.clone(),
                circle: c,
                shadow: (s, e),
                visible: Vec::new(),
            })
            .collect();
        let max_shadow = sides
            .iter()
            .map(|s| s.shadow.1 - s.shadow.0)
            .fold(0.0, f64::max);

        let mut view = Self {
            table: table.clone(),
            sides: Vec::new(),
            max_shadow,
            parabolic_angles: Vec::new(),
            native_sides: OnceLock::new(),
            enclosing: OnceLock::new(),
        };
        // Clip each candidate against the others to find what is visible.
        let visible: Vec<Vec<(f64, f64)>> = (0..sides.len())
            .into_par_iter()
            .map(|k| clip_side(&sides, k, max_shadow))
            .collect();
        for (s, v) in sides.iter_mut().zip(visible) {
            s.visible = v;
        }
        sides.retain(|s| !s.visible.is_empty());
        view.max_shadow = sides
            .iter()
            .map(|s| s.shadow.1 - s.shadow.0)
            .fold(0.0, f64::max);
        view.sides = sides;

        let mut para: Vec<(f64, usize)> = table
            .entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.disk_map.classify() == Classification::Parabolic)
            .filter_map(|(i, e)| {
                let m = e.disk_map;
                if m.c.norm() < 1e-14 {
                    return None;
                }
                let p = (m.a - m.d) / (2.0 * m.c);
                Some((normalize_angle(p.arg()), i))
            })
            .collect();
        para.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        view.parabolic_angles = para;
        view
    }

    pub fn table(&self) -> &Arc<OrbitTable> {
        &self.table
    }

    pub fn model(&self) -> Model {
        self.table.model()
    }

    pub fn depth(&self) -> usize {
        self.table.options.max_word_len
    }

    pub fn sides(&self) -> &[GeodesicSide] {
        &self.sides
    }

    /// Indices of sides whose shadow contains the polar angle `theta`.
    fn sides_over(&self, theta: f64) -> impl Iterator<Item = usize> + '_ {
        let t = normalize_angle(theta);
        let w = self.max_shadow;
        let lo = self.sides.partition_point(|s| s.shadow.0 < t - w);
        let hi = self.sides.partition_point(|s| s.shadow.0 <= t);
        let wrap_lo = self.sides.partition_point(|s| s.shadow.0 < t + TAU - w);
        (lo..hi)
            .filter(move |&k| self.sides[k].shadow.1 > t)
            .chain((wrap_lo..self.sides.len()).filter(move |&k| self.sides[k].shadow.1 > t + TAU))
    }

    /// Dirichlet criterion in the disk; boundary points count as inside.
    pub fn contains_disk(&self, z: C64) -> bool {
        self.margin_disk(z) >= -TIE_TOL
    }

    /// Smallest offset of `z` from the sides it could cross, positive inside
    /// the domain (disk model).
    pub fn margin_disk(&self, z: C64) -> f64 {
        let edge = 1.0 - z.norm();
        if z.norm() < 1e-300 {
            return edge;
        }
        self.sides_over(z.arg())
            .map(|k| self.sides[k].circle.side_offset(z))
            .fold(edge, f64::min)
    }

    /// [`Self::margin_disk`] in the table's native model. Half-plane sides
    /// come from [`Self::native_side_index`], which is built from the native
    /// matrices and so keeps tangencies at cusps sharp.
    pub fn margin(&self, z: C64) -> f64 {
        match self.model() {
            Model::Halfplane => {
                if !(z.im >= 0.0) {
                    return z.im;
                }
                let base = C64::new(0.0, 1.0);
                let enclosing = self.enclosing.get_or_init(|| {
                    self.native_side_index()
                        .items()
                        .iter()
                        .filter(|c| matches!(c, GenCircle::Circle(_)) && c.side(base) < 0.0)
                        .copied()
                        .collect()
                });
                // Other circles only matter over their own abscissa range.
                self.native_side_index()
                    .query(z.re, z.re)
                    .iter()
                    .chain(enclosing)
                    .map(|c| c.side(z) * c.side(base).signum())
                    .fold(z.im, f64::min)
            }
            _ => self.margin_disk(z),
        }
    }

    /// Membership for a point in the table's native model.
    pub fn contains(&self, z: C64) -> bool {
        self.margin(z) >= -TIE_TOL
    }

    pub fn membership(&self, z: ModelPoint) -> Result<bool> {
        match (z.model, self.model()) {
            (Model::Disk, _) => Ok(self.contains_disk(z.value)),
            (Model::Halfplane, Model::Halfplane) => Ok(self.contains(z.value)),
            (a, b) => Err(Error::ModelMismatch(a, b)),
        }
    }

    /// Whether the closed Euclidean disk (disk model) lies inside the domain.
    pub fn contains_ball_disk(&self, ball: &Circle) -> bool {
        ball.center.norm() + ball.radius < 1.0
            && self
                .sides
                .iter()
                .all(|s| (ball.center - s.circle.center).norm() >= s.circle.radius + ball.radius)
    }

    /// Reduces `z` into the domain by repeatedly crossing the side whose
    /// element brings it closest to the base point.
    pub fn locate_disk(&self, z: C64) -> Located {
        let mut w = z;
        let mut gamma = MoebiusMap::identity(Model::Disk);
        for _ in 0..256 {
            let mut best: Option<(f64, usize)> = None;
            for k in self.sides_over(w.arg()) {
                let c = &self.sides[k].circle;
                if (w - c.center).norm() < c.radius - TIE_TOL {
                    let g = &self.table.entries[self.sides[k].entry].disk_map;
                    let r = g
                        .inverse()
                        .apply(w)
                        .map(|v| v.norm())
                        .unwrap_or(f64::INFINITY);
                    if best.map_or(true, |(b, _)| r < b) {
                        best = Some((r, k));
                    }
                }
            }
            let Some((_, k)) = best else { break };
            let g = self.table.entries[self.sides[k].entry].disk_map;
            w = g.inverse().apply(w).unwrap_or(w);
            gamma = gamma.compose_unchecked(&g).project_su11();
        }
        let entry = self.table.find_disk(&gamma);
        let frontier = entry.map_or(false, |i| {
            self.table.entries[i].word.len() >= self.table.options.max_word_len
        }) && self.table.options.max_word_len > 0;
        Located {
            entry,
            map: gamma,
            reduced: w,
            frontier,
        }
    }

    /// Brute-force locator: the table element minimizing `|γ⁻¹(z)|`.
    pub fn locate_brute_force(&self, z: C64) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (i, e) in self.table.entries.iter().enumerate() {
            let r = e
                .disk_map
                .inverse()
                .apply(z)
                .map(|v| v.norm())
                .unwrap_or(f64::INFINITY);
            if r < best.0 - 1e-15 {
                best = (r, i);
            }
        }
        best.1
    }

    /// Side circles in the native model, indexed for slice queries.
    pub fn native_side_index(&self) -> &CircleIndex {
        self.native_sides.get_or_init(|| match self.model() {
            Model::Halfplane => {
                let k = MoebiusMap::cayley_inv();
                CircleIndex::horizontal(
                    self.sides
                        .iter()
                        .filter_map(|s| {
                            halfplane_bisector(&self.table.entries[s.entry].map)
                                .or_else(|| GenCircle::Circle(s.circle).image(&k))
                        })
                        .collect(),
                )
            }
            _ => CircleIndex::polar(
                self.sides
                    .iter()
                    .map(|s| GenCircle::Circle(s.circle))
                    .collect(),
            ),
        })
    }

    pub fn infinite_boundary(&self, resolution: f64) -> Result<InfinityBoundary> {
        if !(resolution > 0.0) {
            return Err(Error::InvalidArgument("resolution must be positive".into()));
        }
        let depth = self.depth();
        if self.sides.is_empty() {
            return Ok(InfinityBoundary {
                arcs: vec![(0.0, TAU)],
                cusps: Vec::new(),
                depth,
                resolution,
                arc_measure: TAU,
                unmatched_contacts: 0,
            });
        }
        let mut items: Vec<(f64, f64, usize)> = Vec::with_capacity(3 * self.sides.len());
        for k in 0..3 {
            for (i, s) in self.sides.iter().enumerate() {
                items.push((s.shadow.0 + k as f64 * TAU, s.shadow.1 + k as f64 * TAU, i));
            }
        }
        items.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
        let mut arcs = Vec::new();
        let mut contacts = Vec::new();
        let (mut cur_end, mut cur_side) = (items[0].1, items[0].2);
        for &(a, b, i) in &items[1..] {
            let gap = a - cur_end;
            if gap > resolution {
                arcs.push((cur_end, a));
            } else if gap >= -resolution && b > cur_end {
                contacts.push((0.5 * (a + cur_end), cur_side, i));
            }
            if b > cur_end {
                cur_end = b;
                cur_side = i;
            }
        }
        let in_window = |p: f64| (TAU..2.0 * TAU).contains(&p);
        let arcs: Vec<(f64, f64)> = arcs
            .into_iter()
            .filter(|a| in_window(a.0))
            .map(|(a, b)| (a - TAU, b - TAU))
            .collect();
        let mut cusps = Vec::new();
        let mut unmatched = 0;
        for (p, left, right) in contacts.into_iter().filter(|c| in_window(c.0)) {
            let angle = p - TAU;
            match self.parabolic_near(angle) {
                Some(entry) => cusps.push(self.make_cusp(angle, entry, left, right)),
                None => unmatched += 1,
            }
        }
        let arc_measure = arcs.iter().map(|(a, b)| b - a).sum();
        Ok(InfinityBoundary {
            arcs,
            cusps,
            depth,
            resolution,
            arc_measure,
            unmatched_contacts: unmatched,
        })
    }

    fn parabolic_near(&self, angle: f64) -> Option<usize> {
        let t = normalize_angle(angle);
        let k = self
            .parabolic_angles
            .partition_point(|p| p.0 < t - CUSP_TOL);
        let cand = self
            .parabolic_angles
            .get(k)
            .filter(|p| (p.0 - t).abs() <= CUSP_TOL);
        let wrap = if t < CUSP_TOL {
            self.parabolic_angles
                .last()
                .filter(|p| (p.0 - TAU - t).abs() <= CUSP_TOL)
        } else if t > TAU - CUSP_TOL {
            self.parabolic_angles
                .first()
                .filter(|p| (p.0 + TAU - t).abs() <= CUSP_TOL)
        } else {
            None
        };
        cand.or(wrap).map(|p| p.1)
    }

    fn make_cusp(&self, angle: f64, entry: usize, left: usize, right: usize) -> Cusp {
        let point = C64::from_polar(1.0, angle);
        let halfplane = if self.model() == Model::Halfplane && (point - 1.0).norm() > 1e-12 {
            let k = MoebiusMap::cayley_inv();
            let native = |side: usize| {
                let s = &self.sides[side];
                match halfplane_bisector(&self.table.entries[s.entry].map)
                    .or_else(|| GenCircle::Circle(s.circle).image(&k))
                {
                    Some(GenCircle::Circle(h)) => Some(h),
                    _ => None,
                }
            };
            // Polar angle and abscissa increase together.
            let (hl, hr) = (native(left), native(right));
            let zeta = match (hl, hr) {
                (Some(a), Some(b)) => 0.5 * ((a.center.re + a.radius) + (b.center.re - b.radius)),
                (Some(a), None) => a.center.re + a.radius,
                (None, Some(b)) => b.center.re - b.radius,
                (None, None) => cayley_inv(point).map(|z| z.re).unwrap_or(f64::NAN),
            };
            Some(HalfplaneCusp {
                zeta,
                r_left: hl.map_or(f64::INFINITY, |c| c.radius),
                r_right: hr.map_or(f64::INFINITY, |c| c.radius),
            })
        } else {
            None
        };
        Cusp {
            angle: normalize_angle(angle),
            point,
            parabolic_entry: entry,
            sides: (left, right),
            disk_radii: (
                self.sides[left].circle.radius,
                self.sides[right].circle.radius,
            ),
            halfplane,
        }
    }

    /// Boundary pieces of the domain in the disk: visible side arcs and
    /// free arcs of the unit circle.
    pub fn boundary_pieces(&self) -> Vec<BoundaryPiece> {
        let mut out = Vec::new();
        for s in &self.sides {
            for &(a, b) in &s.visible {
                out.push(BoundaryPiece {
                    circle: s.circle,
                    start: a,
                    end: b,
                });
            }
        }
        let free = self
            .infinite_boundary(1e-12)
            .map(|ib| ib.arcs)
            .unwrap_or_default();
        for (a, b) in free {
            out.push(BoundaryPiece {
                circle: Circle::new(C64::new(0.0, 0.0), 1.0),
                start: a,
                end: b,
            });
        }
        out
    }

    pub fn tile(&self, entry: usize) -> Tile<'_> {
        Tile {
            domain: self,
            entry,
        }
    }

    /// Euclidean boundary length of the tile `γ(F)` by polylines of the
    /// images of the boundary pieces, with its error estimate.
    pub fn tile_boundary_length(&self, entry: usize, rel_tol: f64) -> (f64, f64) {
        let g = self.table.entries[entry].disk_map;
        self.boundary_pieces()
            .iter()
            .map(|p| {
                polyline_length(
                    |t| g.apply(p.circle.point(t)).unwrap_or(C64::new(0.0, 0.0)),
                    p.start,
                    p.end,
                    rel_tol,
                )
            })
            .fold((0.0, 0.0), |acc, x| (acc.0 + x.0, acc.1 + x.1))
    }

    /// Partial sums of tile boundary lengths by word length.
    pub fn length_sum_partials(&self, max_depth: usize, rel_tol: f64) -> Vec<LevelSum> {
        let order: Vec<usize> = self
            .table
            .by_word_length()
            .into_iter()
            .filter(|&i| self.table.entries[i].word.len() <= max_depth)
            .collect();
        let pieces = self.boundary_pieces();
        let lengths: Vec<f64> = order
            .par_iter()
            .map(|&i| {
                let g = self.table.entries[i].disk_map;
                pieces
                    .iter()
                    .map(|p| {
                        polyline_length(
                            |t| g.apply(p.circle.point(t)).unwrap_or(C64::new(0.0, 0.0)),
                            p.start,
                            p.end,
                            rel_tol,
                        )
                        .0
                    })
                    .sum()
            })
            .collect();
        let top = order
            .last()
            .map_or(0, |&i| self.table.entries[i].word.len());
        let mut incs = vec![0.0; top + 1];
        for (&i, l) in order.iter().zip(lengths) {
            incs[self.table.entries[i].word.len()] += l;
        }
        let mut cum = 0.0;
        incs.into_iter()
            .enumerate()
            .map(|(len, inc)| {
                cum += inc;
                LevelSum {
                    word_len: len,
                    increment: inc,
                    cumulative: cum,
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LevelSum {
    pub word_len: usize,
    pub increment: f64,
    pub cumulative: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct BoundaryPiece {
    pub circle: Circle,
    pub start: f64,
    pub end: f64,
}

/// A tile `γ(F)` of the tessellation.
pub struct Tile<'a> {
    domain: &'a FundamentalDomainView,
    entry: usize,
}

impl Tile<'_> {
    pub fn map(&self) -> MoebiusMap {
        self.domain.table.entries[self.entry].disk_map
    }

    pub fn contains_disk(&self, z: C64) -> bool {
        match self.map().inverse().apply(z) {
            Ok(w) => self.domain.contains_disk(w),
            Err(_) => false,
        }
    }

    /// Boundary circles of the tile: images of the domain's sides.
    pub fn side_circles(&self) -> Vec<GenCircle> {
        let g = self.map();
        self.domain
            .sides
            .iter()
            .filter_map(|s| GenCircle::Circle(s.circle).image(&g))
            .collect()
    }
}

/// Polyline length of a parametrized curve, doubling the point count until
/// consecutive estimates agree to `rel_tol`. Returns the Richardson-corrected
/// length and the error estimate.
pub fn polyline_length(f: impl Fn(f64) -> C64, a: f64, b: f64, rel_tol: f64) -> (f64, f64) {
    let poly = |n: usize| {
        let mut prev = f(a);
        let mut len = 0.0;
        for k in 1..=n {
            let p = f(a + (b - a) * k as f64 / n as f64);
            len += (p - prev).norm();
            prev = p;
        }
        len
    };
    let mut n = 64;
    let mut l1 = poly(n);
    loop {
        n *= 2;
        let l2 = poly(n);
        let err = (l2 - l1).abs() / 3.0;
        if err <= rel_tol * l2.abs() || n >= 1 << 16 {
            return (l2 + (l2 - l1) / 3.0, err);
        }
        l1 = l2;
    }
}

/// Visible parameter intervals of side `k` after clipping by its neighbors.
fn clip_side(sides: &[GeodesicSide], k: usize, max_shadow: f64) -> Vec<(f64, f64)> {
    let me = &sides[k];
    let (ps, pe) = geodesic_range(&me.circle);
    let (s0, s1) = me.shadow;
    let overlaps = |o: &GeodesicSide| {
        let (a, b) = o.shadow;
        [-TAU, 0.0, TAU].iter().any(|sh| a + sh < s1 && b + sh > s0)
    };
    let neighbors: Vec<&GeodesicSide> = sides
        .iter()
        .enumerate()
        .filter(|(j, o)| {
            *j != k && (o.shadow.0 - s0).abs() < max_shadow + (s1 - s0) + TAU && overlaps(o)
        })
        .map(|(_, o)| o)
        .collect();
    let mut cuts = vec![ps, pe];
    for o in &neighbors {
        let d = (o.circle.center - me.circle.center).norm();
        let (r1, r2) = (me.circle.radius, o.circle.radius);
        if d >= r1 + r2 || d <= (r1 - r2).abs() || d == 0.0 {
            continue;
        }
        let off = ((r1 * r1 + d * d - r2 * r2) / (2.0 * r1 * d))
            .clamp(-1.0, 1.0)
            .acos();
        let base = (o.circle.center - me.circle.center).arg();
        for t in [base - off, base + off] {
            let t = wrap_from(t, ps - PI);
            let t = if t < ps { t + TAU } else { t };
            if t > ps && t < pe {
                cuts.push(t);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    let mut out: Vec<(f64, f64)> = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a < 1e-13 {
            continue;
        }
        let mid = me.circle.point(0.5 * (a + b));
        let inside = neighbors
            .iter()
            .all(|o| (mid - o.circle.center).norm() - o.circle.radius >= -TIE_TOL);
        if inside {
            match out.last_mut() {
                Some(last) if (last.1 - a).abs() < 1e-13 => last.1 = b,
                _ => out.push((a, b)),
            }
        }
    }
    out
}
