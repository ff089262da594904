//! Generator sets, breadth-first word enumeration with deduplication, and
//! the concrete groups used by the harnesses.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::moebius::{cayley, Classification, Model, MoebiusMap, C64};

/// Signed generator index: `k + 1` for generator `k`, `-(k + 1)` for its inverse.
pub type Letter = i32;

#[derive(Debug, Clone)]
pub struct GeneratorSet {
    pub generators: Vec<MoebiusMap>,
    pub labels: Vec<String>,
    pub model: Model,
}

impl GeneratorSet {
    pub fn new(generators: Vec<MoebiusMap>, labels: Vec<String>, model: Model) -> Result<Self> {
        if generators.len() != labels.len() {
            return Err(Error::InvalidArgument("one label per generator".into()));
        }
        for (g, l) in generators.iter().zip(&labels) {
            if !g.is_conformal() {
                return Err(Error::InvalidArgument(format!(
                    "generator {l} is anticonformal"
                )));
            }
            if g.model != model {
                return Err(Error::ModelMismatch(g.model, model));
            }
            if !g.is_normalized() {
                return Err(Error::InvalidArgument(format!(
                    "generator {l} has det != 1"
                )));
            }
            if g.classify() == Classification::Identity {
                return Err(Error::InvalidArgument(format!(
                    "generator {l} is the identity"
                )));
            }
        }
        for i in 0..generators.len() {
            for j in 0..i {
                if generators[i].distance(&generators[j]) < 1e-9 {
                    return Err(Error::InvalidArgument(format!(
                        "generators {} and {} coincide",
                        labels[j], labels[i]
                    )));
                }
            }
        }
        Ok(Self {
            generators,
            labels,
            model,
        })
    }

    pub fn trivial(model: Model) -> Self {
        Self {
            generators: Vec::new(),
            labels: Vec::new(),
            model,
        }
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Generator or inverse for a signed letter, in the native model.
    pub fn letter(&self, l: Letter) -> MoebiusMap {
        let g = self.generators[(l.unsigned_abs() - 1) as usize];
        if l > 0 {
            g
        } else {
            g.inverse()
        }
    }

    pub fn to_disk_map(&self, g: &MoebiusMap) -> MoebiusMap {
        match self.model {
            Model::Disk => *g,
            Model::Halfplane => g.halfplane_to_disk(),
            Model::Plane => g.with_model(Model::Disk),
        }
    }

    pub fn from_disk_map(&self, g: &MoebiusMap) -> MoebiusMap {
        match self.model {
            Model::Disk => *g,
            Model::Halfplane => g.disk_to_halfplane(),
            Model::Plane => g.with_model(Model::Plane),
        }
    }

    /// The same group conjugated into the disk model.
    pub fn to_disk_model(&self) -> GeneratorSet {
        let generators = self
            .generators
            .iter()
            .map(|g| self.to_disk_map(g))
            .collect();
        GeneratorSet {
            generators,
            labels: self.labels.clone(),
            model: Model::Disk,
        }
    }

    /// Evaluates a word as a product of letters, left to right.
    pub fn evaluate_word(&self, word: &[Letter]) -> MoebiusMap {
        word.iter()
            .fold(MoebiusMap::identity(self.model), |acc, &l| {
                acc.compose_unchecked(&self.letter(l))
            })
    }

    pub fn word_label(&self, word: &[Letter]) -> String {
        if word.is_empty() {
            return "id".into();
        }
        word.iter()
            .map(|&l| {
                let name = &self.labels[(l.unsigned_abs() - 1) as usize];
                if l > 0 {
                    name.clone()
                } else {
                    format!("{name}^-1")
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// Center and radius of the `n`-th dyadic disk on the positive axis:
/// diameter `[0, 2]` for `n = 1`, `[2^{n-1}, 2^n]` after that.
pub fn rubel_ryff_disk(n: u32) -> (f64, f64) {
    if n == 1 {
        (1.0, 1.0)
    } else {
        let r = 2f64.powi(n as i32 - 2);
        (3.0 * r, r)
    }
}

/// Generators `τ ∘ σ_n`, `n = 1..=n_max`, with `σ_n` the reflection in the
/// boundary of the `n`-th dyadic disk and `τ(z) = -conj(z)`.
pub fn rubel_ryff_generators(n_max: u32) -> Result<GeneratorSet> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let tau = MoebiusMap::tau(Model::Halfplane);
    let mut gens = Vec::new();
    let mut labels = Vec::new();
    for n in 1..=n_max {
        let (c, r) = rubel_ryff_disk(n);
        let sigma = MoebiusMap::reflection_in_circle(c, r, Model::Halfplane)?;
        gens.push(tau.compose(&sigma)?);
        labels.push(format!("g{n}"));
    }
    GeneratorSet::new(gens, labels, Model::Halfplane)
}

/// A circle orthogonal to the real axis, given by real center and radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct AxisCircle {
    pub center: f64,
    pub radius: f64,
}

/// One hyperbolic generator per pair, mapping the exterior of the first
/// circle onto the interior of the second.
pub fn schottky_pair_generators(pairs: &[(AxisCircle, AxisCircle)]) -> Result<GeneratorSet> {
    let circles: Vec<AxisCircle> = pairs.iter().flat_map(|(a, b)| [*a, *b]).collect();
    for c in &circles {
        if !(c.radius > 0.0) {
            return Err(Error::Geometry(format!("nonpositive radius {}", c.radius)));
        }
    }
    for i in 0..circles.len() {
        for j in 0..i {
            let (a, b) = (circles[i], circles[j]);
            if (a.center - b.center).abs() <= a.radius + b.radius {
                return Err(Error::Geometry(format!(
                    "circles ({}, {}) and ({}, {}) are not disjoint",
                    a.center, a.radius, b.center, b.radius
                )));
            }
        }
    }
    let mut gens = Vec::new();
    let mut labels = Vec::new();
    for (k, (c1, c2)) in pairs.iter().enumerate() {
        let sigma = MoebiusMap::reflection_in_circle(c1.center, c1.radius, Model::Halfplane)?;
        // z -> c2 - (r2/r1)(conj(z) - c1): interior of c1 onto interior of c2.
        let s = c2.radius / c1.radius;
        let flip = MoebiusMap::new(
            (-s).into(),
            (c2.center + s * c1.center).into(),
            0.0.into(),
            1.0.into(),
            crate::moebius::Orientation::Anticonformal,
            Model::Halfplane,
        )?;
        gens.push(flip.compose(&sigma)?);
        labels.push(format!("s{}", k + 1));
    }
    GeneratorSet::new(gens, labels, Model::Halfplane)
}

/// The cyclic group generated by `z -> λ z` on the half-plane.
pub fn dilation_generators(lambda: f64) -> Result<GeneratorSet> {
    if !(lambda > 1.0) {
        return Err(Error::InvalidArgument(
            "dilation factor must exceed 1".into(),
        ));
    }
    let s = lambda.sqrt();
    let g = MoebiusMap::real(s, 0.0, 0.0, 1.0 / s, Model::Halfplane)?;
    GeneratorSet::new(vec![g], vec!["d".into()], Model::Halfplane)
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitEntry {
    pub word: Vec<Letter>,
    /// Element in the generators' model.
    pub map: MoebiusMap,
    /// The same element conjugated into the disk.
    pub disk_map: MoebiusMap,
    /// Image of the base point (0 in the disk, i in the half-plane), native model.
    pub base_image: C64,
    /// `1 - |g(0)|` in the disk model.
    pub height: f64,
}

impl OrbitEntry {
    pub fn word_len(&self) -> usize {
        self.word.len()
    }

    pub fn disk_base_image(&self) -> C64 {
        self.disk_map.b / self.disk_map.d
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnumerationOptions {
    pub max_word_len: usize,
    pub height_cutoff: f64,
    pub budget: usize,
    pub dedup_tol: f64,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        Self {
            max_word_len: 4,
            height_cutoff: 0.0,
            budget: 500_000,
            dedup_tol: 1e-9,
        }
    }
}

impl EnumerationOptions {
    pub fn depth(max_word_len: usize) -> Self {
        Self {
            max_word_len,
            ..Self::default()
        }
    }
}

/// Finite truncation of a group: deduplicated elements sorted by
/// descending height.
#[derive(Debug, Clone)]
pub struct OrbitTable {
    pub generators: GeneratorSet,
    pub entries: Vec<OrbitEntry>,
    pub options: EnumerationOptions,
    pub budget_exceeded: bool,
    index: DedupIndex,
}

const KEY_RES: f64 = 1e-7;

#[derive(Debug, Clone, Default)]
struct DedupIndex {
    buckets: HashMap<(i64, i64), Vec<u32>>,
}

impl DedupIndex {
    fn key(p: C64) -> (i64, i64) {
        (
            (p.re / KEY_RES).floor() as i64,
            (p.im / KEY_RES).floor() as i64,
        )
    }

    fn find(&self, entries: &[OrbitEntry], m: &MoebiusMap, tol: f64) -> Option<usize> {
        let p = m.b / m.d;
        let (kx, ky) = Self::key(p);
        let scale = 1.0 + m.a.norm();
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.buckets.get(&(kx + dx, ky + dy)) {
                    for &i in ids {
                        if entries[i as usize].disk_map.distance(m) < tol * scale {
                            return Some(i as usize);
                        }
                    }
                }
            }
        }
        None
    }

    fn insert(&mut self, m: &MoebiusMap, idx: usize) {
        self.buckets
            .entry(Self::key(m.b / m.d))
            .or_default()
            .push(idx as u32);
    }
}

/// `1 - |g(0)|`, computed from `1 - |g(0)|^2 = 1/|d|^2` to avoid cancellation.
fn disk_height(g: &MoebiusMap, base: C64) -> f64 {
    let d2 = g.d.norm_sqr();
    if d2 > 0.0 && (g.a - g.d.conj()).norm() <= 1e-9 * g.a.norm() {
        (1.0 / d2) / (1.0 + base.norm())
    } else {
        (1.0 - base.norm()).max(0.0)
    }
}

fn make_entry(
    gens: &GeneratorSet,
    word: Vec<Letter>,
    map: MoebiusMap,
    disk_map: MoebiusMap,
) -> OrbitEntry {
    let base_disk = disk_map.b / disk_map.d;
    let base_image = match gens.model {
        Model::Halfplane => map
            .apply(C64::new(0.0, 1.0))
            .unwrap_or(C64::new(0.0, f64::INFINITY)),
        _ => base_disk,
    };
    OrbitEntry {
        word,
        map,
        disk_map,
        base_image,
        height: disk_height(&disk_map, base_disk),
    }
}

/// `g · letter` in both models. Half-plane products are formed natively,
/// where real generators with dyadic entries multiply exactly, and then
/// conjugated; disk products are re-projected onto the automorphism group.
fn extend(gens: &GeneratorSet, e: &OrbitEntry, l: Letter) -> (MoebiusMap, MoebiusMap) {
    match gens.model {
        Model::Halfplane => {
            let native = e.map.compose_unchecked(&gens.letter(l));
            (native, gens.to_disk_map(&native).project_su11())
        }
        _ => {
            let disk = e
                .disk_map
                .compose_unchecked(&gens.to_disk_map(&gens.letter(l)))
                .project_su11();
            (gens.from_disk_map(&disk), disk)
        }
    }
}

/// Breadth-first enumeration of reduced words up to `max_word_len`.
pub fn enumerate(gens: &GeneratorSet, opts: EnumerationOptions) -> OrbitTable {
    let letters: Vec<Letter> = (1..=gens.len() as i32).flat_map(|k| [k, -k]).collect();

    // Build in BFS order, then sort by height at the end.
    let mut entries = vec![make_entry(
        gens,
        Vec::new(),
        MoebiusMap::identity(gens.model),
        MoebiusMap::identity(Model::Disk),
    )];
    let mut index = DedupIndex::default();
    index.insert(&entries[0].disk_map, 0);
    let mut frontier: Vec<usize> = vec![0];
    let mut budget_exceeded = false;

    'levels: for len in 1..=opts.max_word_len {
        let candidates: Vec<(Vec<Letter>, MoebiusMap, MoebiusMap)> = frontier
            .par_iter()
            .flat_map_iter(|&i| {
                let e = &entries[i];
                let last = e.word.last().copied();
                letters
                    .iter()
                    .filter(move |&&l| last != Some(-l))
                    .map(|&l| {
                        let mut w = e.word.clone();
                        w.push(l);
                        let (native, disk) = extend(gens, e, l);
                        (w, native, disk)
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        let mut next = Vec::new();
        for (word, native, m) in candidates {
            let h = disk_height(&m, m.b / m.d);
            if opts.height_cutoff > 0.0 && h <= opts.height_cutoff {
                continue;
            }
            if index.find(&entries, &m, opts.dedup_tol).is_some() {
                continue;
            }
            if entries.len() >= opts.budget {
                budget_exceeded = true;
                break 'levels;
            }
            let idx = entries.len();
            index.insert(&m, idx);
            entries.push(make_entry(gens, word, native, m));
            next.push(idx);
        }
        let _ = len;
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }

    // Stable sort by descending height; the identity stays first.
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by(|&i, &j| {
        entries[j]
            .height
            .total_cmp(&entries[i].height)
            .then(i.cmp(&j))
    });
    let sorted: Vec<OrbitEntry> = order.iter().map(|&i| entries[i].clone()).collect();
    let mut index = DedupIndex::default();
    for (i, e) in sorted.iter().enumerate() {
        index.insert(&e.disk_map, i);
    }
    OrbitTable {
        generators: gens.clone(),
        entries: sorted,
        options: opts,
        budget_exceeded,
        index,
    }
}

impl OrbitTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn model(&self) -> Model {
        self.generators.model
    }

    /// Fails with the budget error if enumeration was cut short.
    pub fn require_complete(&self) -> Result<&Self> {
        if self.budget_exceeded {
            return Err(Error::Budget {
                budget: self.options.budget,
                word_len: self.max_len(),
            });
        }
        Ok(self)
    }

    pub fn max_len(&self) -> usize {
        self.entries.iter().map(|e| e.word.len()).max().unwrap_or(0)
    }

    pub fn identity_index(&self) -> usize {
        self.entries
            .iter()
            .position(|e| e.word.is_empty())
            .expect("identity present")
    }

    /// Index of a disk-model element, if enumerated.
    pub fn find_disk(&self, m: &MoebiusMap) -> Option<usize> {
        self.index.find(&self.entries, m, self.options.dedup_tol)
    }

    /// Entry counts per word length.
    pub fn counts_by_length(&self) -> Vec<usize> {
        let mut counts = vec![0; self.max_len() + 1];
        for e in &self.entries {
            counts[e.word.len()] += 1;
        }
        counts
    }

    /// Indices ordered by word length, then by position in the table.
    pub fn by_word_length(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.entries.len()).collect();
        order.sort_by_key(|&i| (self.entries[i].word.len(), i));
        order
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PoincareSums {
    pub exponent: f64,
    pub word_lengths: Vec<usize>,
    /// Cumulative `Σ (1 - |g(0)|)^s` over words up to each length.
    pub height_sums: Vec<f64>,
    /// Cumulative `Σ exp(-2 s ρ(0, g(0)))`, comparable to the height sums.
    pub exp_sums: Vec<f64>,
}

pub fn poincare_partial_sums(table: &OrbitTable, s: f64) -> PoincareSums {
    let max = table.max_len();
    let mut h = vec![0.0; max + 1];
    let mut x = vec![0.0; max + 1];
    for i in table.by_word_length() {
        let e = &table.entries[i];
        let r = e.disk_base_image().norm().min(1.0);
        h[e.word.len()] += e.height.powf(s);
        // exp(-2ρ) = (1 - |w|)/(1 + |w|) with ρ = atanh|w|
        x[e.word.len()] += (e.height / (1.0 + r)).powf(s);
    }
    let cum = |v: Vec<f64>| {
        v.into_iter()
            .scan(0.0, |acc, t| {
                *acc += t;
                Some(*acc)
            })
            .collect::<Vec<_>>()
    };
    PoincareSums {
        exponent: s,
        word_lengths: (0..=max).collect(),
        height_sums: cum(h),
        exp_sums: cum(x),
    }
}

/// Images of boundary seeds under every table element, sorted and
/// deduplicated at `1e-9`. Seeds and results live on the native model's
/// boundary (unit circle, or the real line with infinity dropped).
pub fn limit_set_sample(table: &OrbitTable, seeds: &[C64]) -> Vec<C64> {
    let model = table.model();
    let mut pts: Vec<C64> = table
        .entries
        .par_iter()
        .flat_map_iter(|e| {
            seeds
                .iter()
                .filter_map(|&z| {
                    let w = e.map.apply(z).ok()?;
                    if !w.re.is_finite() || !w.im.is_finite() || w.norm() > 1e12 {
                        return None;
                    }
                    Some(match model {
                        Model::Halfplane => C64::new(w.re, 0.0),
                        Model::Disk => w / w.norm(),
                        Model::Plane => w,
                    })
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let key = |z: &C64| match model {
        Model::Disk => crate::geometry::normalize_angle(z.arg()),
        _ => z.re,
    };
    pts.sort_by(|a, b| key(a).total_cmp(&key(b)));
    pts.dedup_by(|a, b| (*a - *b).norm() < 1e-9);
    if model == Model::Disk && pts.len() > 1 && (pts[0] - pts[pts.len() - 1]).norm() < 1e-9 {
        pts.pop();
    }
    pts
}

/// Transports half-plane boundary points to the unit circle.
pub fn boundary_to_disk(points: &[C64]) -> Vec<C64> {
    points.iter().filter_map(|&x| cayley(x).ok()).collect()
}
