//! Closed subsets of the real line given as finite unions of intervals, and
//! the homogeneity condition `|E ∩ (x-t, x+t)| ≥ C t`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Gaps at most this wide are closed when building a union.
pub const MERGE_TOL: f64 = 1e-12;

/// Sorted, pairwise disjoint closed intervals. Degenerate intervals
/// (points) are allowed and have zero length.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalUnion {
    intervals: Vec<(f64, f64)>,
    /// `prefix[i]` is the total length of the first `i` intervals.
    #[serde(skip)]
    prefix: Vec<f64>,
}

impl IntervalUnion {
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        for &(a, b) in &intervals {
            if !(a.is_finite() && b.is_finite() && a <= b) {
                return Err(Error::InvalidArgument(format!("bad interval [{a}, {b}]")));
            }
        }
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for (a, b) in intervals {
            match merged.last_mut() {
                Some(last) if a <= last.1 + MERGE_TOL => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        let mut prefix = Vec::with_capacity(merged.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for &(a, b) in &merged {
            acc += b - a;
            prefix.push(acc);
        }
        Ok(Self {
            intervals: merged,
            prefix,
        })
    }

    /// Closed `ε`-neighborhood of a finite point set.
    pub fn cover(points: &[f64], eps: f64) -> Result<Self> {
        if !(eps >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "coarsening {eps} must be nonnegative"
            )));
        }
        Self::new(points.iter().map(|&p| (p - eps, p + eps)).collect())
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        *self.prefix.last().unwrap_or(&0.0)
    }

    pub fn diameter(&self) -> f64 {
        match (self.intervals.first(), self.intervals.last()) {
            (Some(f), Some(l)) => l.1 - f.0,
            _ => 0.0,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let i = self.intervals.partition_point(|iv| iv.1 < x);
        i < self.intervals.len() && self.intervals[i].0 <= x
    }

    /// `a E + b` for `a > 0`.
    pub fn affine(&self, a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::InvalidArgument("scale must be positive".into()));
        }
        Self::new(
            self.intervals
                .iter()
                .map(|&(l, r)| (a * l + b, a * r + b))
                .collect(),
        )
    }

    /// `|E ∩ (x - t, x + t)|`. The partial end intervals are measured
    /// relative to `x`, which keeps the result exact when `x` is an endpoint.
    pub fn measure_near(&self, x: f64, t: f64) -> f64 {
        let (lo, hi) = (x - t, x + t);
        let i0 = self.intervals.partition_point(|iv| iv.1 <= lo);
        let i1 = self.intervals.partition_point(|iv| iv.0 < hi);
        if i0 >= i1 {
            return 0.0;
        }
        let part = |(a, b): (f64, f64)| (b - x).clamp(-t, t) - (a - x).clamp(-t, t);
        if i1 - i0 == 1 {
            return part(self.intervals[i0]);
        }
        part(self.intervals[i0])
            + (self.prefix[i1 - 1] - self.prefix[i0 + 1])
            + part(self.intervals[i1 - 1])
    }
}

/// `2^levels` intervals obtained from `[0, 1]` by removing the open middle
/// `fraction` of every interval, `levels` times.
pub fn cantor_set(levels: u32, fraction: f64) -> Result<IntervalUnion> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "removed fraction {fraction} outside (0, 1)"
        )));
    }
    if levels > 24 {
        return Err(Error::InvalidArgument(format!(
            "{levels} levels is too many"
        )));
    }
    let keep = 0.5 * (1.0 - fraction);
    let mut ivs = vec![(0.0, 1.0)];
    for _ in 0..levels {
        ivs = ivs
            .into_iter()
            .flat_map(|(a, b): (f64, f64)| {
                let w = (b - a) * keep;
                [(a, a + w), (b - w, b)]
            })
            .collect();
    }
    IntervalUnion::new(ivs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HomogeneityOptions {
    /// Logarithmic `t` samples per decade.
    pub points_per_decade: usize,
    /// Decades below `diam E` covered by the `t` grid.
    pub decades: usize,
    /// Uniform `x` samples across the hull of `E`; only those in `E` are used.
    pub uniform_x: usize,
}

impl Default for HomogeneityOptions {
    fn default() -> Self {
        Self {
            points_per_decade: 64,
            decades: 6,
            uniform_x: 256,
        }
    }
}

impl HomogeneityOptions {
    /// `diam · 10^{-k / points_per_decade}` for `k = 0 ..= decades · points_per_decade`.
    pub fn t_grid(&self, diam: f64) -> Vec<f64> {
        let n = self.decades * self.points_per_decade;
        (0..=n)
            .map(|k| diam * 10f64.powf(-(k as f64) / self.points_per_decade as f64))
            .collect()
    }

    /// Interval endpoints plus the uniform samples that fall in `E`.
    pub fn x_samples(&self, e: &IntervalUnion) -> Vec<f64> {
        let mut xs: Vec<f64> = e.intervals().iter().flat_map(|&(a, b)| [a, b]).collect();
        if let (Some(first), Some(last)) = (e.intervals().first(), e.intervals().last()) {
            let (lo, hi) = (first.0, last.1);
            for k in 0..self.uniform_x {
                let x = lo + (hi - lo) * (k as f64 + 0.5) / self.uniform_x as f64;
                if e.contains(x) {
                    xs.push(x);
                }
            }
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs
    }
}

/// Smallest sampled ratio and where it occurs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Homogeneity {
    pub constant: f64,
    pub x: f64,
    pub t: f64,
}

/// `min |E ∩ (x-t, x+t)| / t` over the given samples, with the smallest
/// `(x, t)` pair reported on ties.
pub fn homogeneity_on(e: &IntervalUnion, xs: &[f64], ts: &[f64]) -> Result<Homogeneity> {
    if e.is_empty() {
        return Err(Error::InvalidArgument("empty set".into()));
    }
    if xs.is_empty() || ts.is_empty() || ts.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidArgument(
            "homogeneity needs samples and positive radii".into(),
        ));
    }
    let best = xs
        .par_iter()
        .map(|&x| {
            ts.iter()
                .map(|&t| Homogeneity {
                    constant: e.measure_near(x, t) / t,
                    x,
                    t,
                })
                .reduce(|p, q| if q.constant < p.constant { q } else { p })
                .expect("nonempty t grid")
        })
        .collect::<Vec<_>>()
        .into_iter()
        .reduce(|p, q| if q.constant < p.constant { q } else { p })
        .expect("nonempty x grid");
    Ok(best)
}

/// Homogeneity constant of `E` over `x ∈ E` and `t ∈ (0, diam E]`, on the
/// sampling described by `opts`. A single point has constant zero.
pub fn homogeneity_constant(e: &IntervalUnion, opts: &HomogeneityOptions) -> Result<Homogeneity> {
    if e.is_empty() {
        return Err(Error::InvalidArgument("empty set".into()));
    }
    let diam = e.diameter();
    if diam == 0.0 {
        let x = e.intervals()[0].0;
        return Ok(Homogeneity {
            constant: 0.0,
            x,
            t: 0.0,
        });
    }
    homogeneity_on(e, &opts.x_samples(e), &opts.t_grid(diam))
}

/// Homogeneity of the `ε`-neighborhood of a sampled boundary set.
pub fn limit_set_homogeneity(
    points: &[f64],
    eps: f64,
    opts: &HomogeneityOptions,
) -> Result<Homogeneity> {
    let pts: Vec<f64> = points.iter().copied().filter(|p| p.is_finite()).collect();
    if pts.is_empty() {
        return Err(Error::InvalidArgument("no finite boundary points".into()));
    }
    homogeneity_constant(&IntervalUnion::cover(&pts, eps)?, opts)
}

/// `{0} ∪ {±2^n : 1 ≤ n ≤ n_max}`, the punctures of the dyadic construction.
pub fn puncture_set(n_max: u32) -> Vec<f64> {
    let mut pts = vec![0.0];
    for n in 1..=n_max as i32 {
        pts.push(2f64.powi(n));
        pts.push(-(2f64.powi(n)));
    }
    pts.sort_by(f64::total_cmp);
    pts
}
