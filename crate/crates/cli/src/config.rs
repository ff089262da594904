//! Run configuration, read from TOML. Every section is optional; missing
//! keys take the defaults below. Unknown keys are rejected.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use carleson_core::beltrami::{BeltramiField, ExtensionMode, GridField};
use carleson_core::fundomain::FundamentalDomainView;
use carleson_core::geometry::Circle;
use carleson_core::group::{
    dilation_generators, enumerate, rubel_ryff_generators, schottky_pair_generators, AxisCircle,
    EnumerationOptions, GeneratorSet, OrbitTable,
};
use carleson_core::moebius::{Model, MoebiusMap, Orientation, C64};
use serde::{Deserialize, Serialize};

/// Configuration problems; the CLI maps these to exit code 3.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

impl From<carleson_core::Error> for ConfigError {
    fn from(e: carleson_core::Error) -> Self {
        ConfigError(e.to_string())
    }
}

pub type ConfigResult<T> = Result<T, ConfigError>;

fn bad<T>(msg: impl Into<String>) -> ConfigResult<T> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub group: GroupSpec,
    pub field: FieldSpec,
    pub query: QuerySpec,
    pub depth: DepthSpec,
    pub tolerance: ToleranceSpec,
    pub output: OutputSpec,
    pub thm13: Thm13Spec,
    pub sec4: Sec4Spec,
    pub denjoy: DenjoySpec,
    pub render: RenderSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    #[default]
    Trivial,
    RubelRyff,
    Schottky,
    Dilation,
    Matrices,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelName {
    Disk,
    Halfplane,
}

impl From<ModelName> for Model {
    fn from(m: ModelName) -> Model {
        match m {
            ModelName::Disk => Model::Disk,
            ModelName::Halfplane => Model::Halfplane,
        }
    }
}

/// A generator `z ↦ (a z + b)/(c z + d)`, applied to `conj(z)` when
/// `anticonformal`. Entries are `[re, im]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub c: [f64; 2],
    pub d: [f64; 2],
    #[serde(default)]
    pub anticonformal: bool,
    #[serde(default)]
    pub label: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GroupSpec {
    pub kind: GroupKind,
    /// Model of the trivial group and of explicit matrices.
    pub model: ModelName,
    /// Number of dyadic disks of the Rubel–Ryff construction.
    pub n_max: u32,
    /// Schottky pairs `[c1, r1, c2, r2]` of circles orthogonal to the real axis.
    pub pairs: Vec<[f64; 4]>,
    pub lambda: f64,
    pub generators: Vec<MatrixSpec>,
    /// Conjugate a half-plane group into the disk before use.
    pub in_disk: bool,
    /// Boundary seeds of the limit-set sample: angles on the disk,
    /// abscissas on the half-plane.
    pub seeds: Vec<f64>,
}

impl Default for GroupSpec {
    fn default() -> Self {
        Self {
            kind: GroupKind::Trivial,
            model: ModelName::Disk,
            n_max: 3,
            pairs: Vec::new(),
            lambda: 4.0,
            generators: Vec::new(),
            in_disk: false,
            seeds: vec![0.5],
        }
    }
}

impl GroupSpec {
    pub fn generators(&self) -> ConfigResult<GeneratorSet> {
        let gens = match self.kind {
            GroupKind::Trivial => GeneratorSet::trivial(self.model.into()),
            GroupKind::RubelRyff => rubel_ryff_generators(self.n_max)?,
            GroupKind::Schottky => {
                if self.pairs.is_empty() {
                    return bad("schottky group needs at least one pair");
                }
                let pairs: Vec<(AxisCircle, AxisCircle)> = self
                    .pairs
                    .iter()
                    .map(|p| {
                        (
                            AxisCircle {
                                center: p[0],
                                radius: p[1],
                            },
                            AxisCircle {
                                center: p[2],
                                radius: p[3],
                            },
                        )
                    })
                    .collect();
                schottky_pair_generators(&pairs)?
            }
            GroupKind::Dilation => dilation_generators(self.lambda)?,
            GroupKind::Matrices => {
                let model: Model = self.model.into();
                let mut maps = Vec::new();
                let mut labels = Vec::new();
                for (k, m) in self.generators.iter().enumerate() {
                    let z = |p: [f64; 2]| C64::new(p[0], p[1]);
                    let o = if m.anticonformal {
                        Orientation::Anticonformal
                    } else {
                        Orientation::Conformal
                    };
                    maps.push(MoebiusMap::new(z(m.a), z(m.b), z(m.c), z(m.d), o, model)?);
                    labels.push(m.label.clone().unwrap_or_else(|| format!("h{}", k + 1)));
                }
                GeneratorSet::new(maps, labels, model)?
            }
        };
        Ok(if self.in_disk && gens.model == Model::Halfplane {
            gens.to_disk_model()
        } else {
            gens
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKindName {
    #[default]
    Zero,
    Constant,
    ConstantOnBalls,
    PowerDecay,
    Bump,
    Grid,
}

/// How the closed-form field relates to the group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    /// The field itself, on the whole model.
    #[default]
    Whole,
    /// The field times the indicator of the fundamental domain.
    Domain,
    /// The invariant extension of the field restricted to the domain.
    Extension,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldSpec {
    pub kind: FieldKindName,
    /// Real and imaginary part of the constant.
    pub c: f64,
    pub c_im: f64,
    pub alpha: f64,
    pub center: [f64; 2],
    pub radius: f64,
    /// Balls `[x, y, radius]`.
    pub balls: Vec<[f64; 3]>,
    /// Grid file with rows `x y re im`, relative to the config file.
    pub path: Option<PathBuf>,
    /// Defaults to the group's model.
    pub model: Option<ModelName>,
    pub support: Support,
    pub extension: ExtensionModeName,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtensionModeName {
    #[default]
    Transported,
    Literal,
}

impl From<ExtensionModeName> for ExtensionMode {
    fn from(m: ExtensionModeName) -> Self {
        match m {
            ExtensionModeName::Transported => ExtensionMode::Transported,
            ExtensionModeName::Literal => ExtensionMode::Literal,
        }
    }
}

impl Default for FieldSpec {
    fn default() -> Self {
        Self {
            kind: FieldKindName::Zero,
            c: 0.5,
            c_im: 0.0,
            alpha: 0.5,
            center: [0.0, 0.0],
            radius: 0.3,
            balls: Vec::new(),
            path: None,
            model: None,
            support: Support::Whole,
            extension: ExtensionModeName::Transported,
        }
    }
}

impl FieldSpec {
    /// The closed-form field on `model`, before any group is involved.
    pub fn base(&self, model: Model, base_dir: &Path) -> ConfigResult<BeltramiField> {
        let model = self.model.map(Model::from).unwrap_or(model);
        let c = C64::new(self.c, self.c_im);
        let center = C64::new(self.center[0], self.center[1]);
        Ok(match self.kind {
            FieldKindName::Zero => BeltramiField::zero(model),
            FieldKindName::Constant => BeltramiField::constant(c, model)?,
            FieldKindName::ConstantOnBalls => {
                let balls = self
                    .balls
                    .iter()
                    .map(|b| Circle::new(C64::new(b[0], b[1]), b[2]))
                    .collect();
                BeltramiField::constant_on_balls(c, balls, model)?
            }
            FieldKindName::PowerDecay => {
                if model != Model::Disk {
                    return bad("power_decay lives on the disk");
                }
                BeltramiField::power_decay(c, self.alpha)?
            }
            FieldKindName::Bump => BeltramiField::bump(c, Circle::new(center, self.radius), model)?,
            FieldKindName::Grid => {
                let p = self
                    .path
                    .as_ref()
                    .ok_or_else(|| ConfigError("grid field needs a path".into()))?;
                let p = if p.is_relative() {
                    base_dir.join(p)
                } else {
                    p.clone()
                };
                BeltramiField::grid(GridField::load(&p)?, model)?
            }
        })
    }

    /// The field with its support semantics applied.
    pub fn build(
        &self,
        domain: Option<&Arc<FundamentalDomainView>>,
        model: Model,
        base_dir: &Path,
    ) -> ConfigResult<BeltramiField> {
        let base = self.base(model, base_dir)?;
        match (self.support, domain) {
            (Support::Whole, _) => Ok(base),
            (_, None) => bad("field support 'domain' or 'extension' needs a group"),
            (Support::Domain, Some(d)) => Ok(BeltramiField::restricted_to_domain(base, d.clone())?),
            (Support::Extension, Some(d)) => Ok(BeltramiField::invariant_extension(
                base,
                d.clone(),
                self.extension.into(),
            )?),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RestrictionName {
    #[default]
    None,
    Domain,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuerySpec {
    /// Explicit boundary points: polar angles on the disk, abscissas on the
    /// half-plane.
    pub xi: Vec<f64>,
    /// Evenly spaced points: angles over the circle, or abscissas over
    /// `[xi_min, xi_max]`.
    pub xi_count: usize,
    pub xi_min: f64,
    pub xi_max: f64,
    /// Extra boundary points drawn from the seeded generator.
    pub xi_random: usize,
    /// Explicit radii; otherwise `2^0 … 2^-(dyadic_levels-1)`.
    pub r: Vec<f64>,
    pub dyadic_levels: usize,
    pub restriction: RestrictionName,
}

impl Default for QuerySpec {
    fn default() -> Self {
        Self {
            xi: Vec::new(),
            xi_count: 8,
            xi_min: -1.0,
            xi_max: 1.0,
            xi_random: 0,
            r: Vec::new(),
            dyadic_levels: 5,
            restriction: RestrictionName::None,
        }
    }
}

impl QuerySpec {
    /// Boundary samples as model coordinates: `e^{iθ}` or real `x`.
    pub fn boundary_points(&self, model: Model, rng: &mut impl rand::Rng) -> Vec<C64> {
        let mut coords: Vec<f64> = self.xi.clone();
        let n = self.xi_count;
        for k in 0..n {
            coords.push(match model {
                Model::Disk => TAU * k as f64 / n as f64,
                _ if n == 1 => 0.5 * (self.xi_min + self.xi_max),
                _ => self.xi_min + (self.xi_max - self.xi_min) * k as f64 / (n - 1) as f64,
            });
        }
        for _ in 0..self.xi_random {
            coords.push(match model {
                Model::Disk => rng.gen_range(0.0..TAU),
                _ => rng.gen_range(self.xi_min..=self.xi_max),
            });
        }
        coords
            .into_iter()
            .map(|t| match model {
                Model::Disk => C64::from_polar(1.0, t),
                _ => C64::new(t, 0.0),
            })
            .collect()
    }

    pub fn radii(&self) -> Vec<f64> {
        if self.r.is_empty() {
            (0..self.dyadic_levels)
                .map(|k| 0.5f64.powi(k as i32))
                .collect()
        } else {
            self.r.clone()
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DepthSpec {
    pub word_length: usize,
    pub height_cutoff: f64,
    pub budget: usize,
}

impl Default for DepthSpec {
    fn default() -> Self {
        let d = EnumerationOptions::default();
        Self {
            word_length: d.max_word_len,
            height_cutoff: d.height_cutoff,
            budget: d.budget,
        }
    }
}

impl DepthSpec {
    pub fn options(&self, word_length: usize) -> EnumerationOptions {
        EnumerationOptions {
            max_word_len: word_length,
            height_cutoff: self.height_cutoff,
            budget: self.budget,
            ..EnumerationOptions::default()
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceSpec {
    /// Absolute tolerance of each box integral.
    pub quadrature: f64,
    /// Angular resolution for merging boundary shadows.
    pub resolution: f64,
    /// Relative tolerance of polyline boundary lengths.
    pub length: f64,
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        Self {
            quadrature: 1e-6,
            resolution: 1e-9,
            length: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    /// Directory for report and figure files.
    pub dir: Option<PathBuf>,
    /// Also write an SVG of the tiling from `group-build`.
    pub svg: bool,
    /// Cap on boundary points listed in reports (evenly subsampled).
    pub max_points: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thm13Spec {
    /// Caps `[angle, radius]` for the orbit decomposition.
    pub caps: Vec<[f64; 2]>,
    /// Boundary samples per free arc for the restricted bound.
    pub arc_samples: usize,
    /// Random `(g, z)` pairs for the compatibility law.
    pub compatibility_samples: usize,
    /// Evenly spaced boundary points for the global estimate.
    pub global_xi_count: usize,
}

impl Default for Thm13Spec {
    fn default() -> Self {
        Self {
            caps: vec![[0.0, 0.5], [0.0, 1.0], [1.0, 1.0]],
            arc_samples: 3,
            compatibility_samples: 1000,
            global_xi_count: 4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sec4Spec {
    pub n_max: u32,
    /// Modulus of the field on the cusp balls.
    pub c: f64,
    /// Radius of the cusp balls, capped below the tangency radius.
    pub ball_radius: f64,
    /// Radii `2^0 … 2^-(dyadic_levels-1)` of the per-cusp Carleson grid.
    pub dyadic_levels: usize,
    /// Word lengths of the global diagnostic; defaults to `depth-1, depth`.
    pub trend_depths: Vec<usize>,
    /// Boundary points of the global diagnostic; 0 skips it.
    pub global_xi_count: usize,
    /// Disk radii `2^-1 … 2^-global_levels` of the global diagnostic.
    pub global_levels: usize,
    /// Quadrature tolerance of the global diagnostic.
    pub global_tol: f64,
}

impl Default for Sec4Spec {
    fn default() -> Self {
        Self {
            n_max: 4,
            c: 0.5,
            ball_radius: 1.0,
            dyadic_levels: 6,
            trend_depths: Vec::new(),
            global_xi_count: 2,
            global_levels: 1,
            global_tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DenjoySet {
    #[default]
    Intervals,
    Cantor,
    LimitSet,
    Punctures,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DenjoySpec {
    pub set: DenjoySet,
    pub intervals: Vec<[f64; 2]>,
    /// Cantor levels; several levels are compared pairwise.
    pub levels: Vec<u32>,
    pub fraction: f64,
    /// Coarsening scales for point sets.
    pub eps: Vec<f64>,
    /// Puncture set size.
    pub n_max: u32,
    pub points_per_decade: usize,
    pub decades: usize,
    pub uniform_x: usize,
}

impl Default for DenjoySpec {
    fn default() -> Self {
        Self {
            set: DenjoySet::Intervals,
            intervals: vec![[0.0, 1.0]],
            levels: vec![8, 12],
            fraction: 1.0 / 3.0,
            eps: vec![1e-2, 1e-3, 1e-4],
            n_max: 6,
            points_per_decade: 64,
            decades: 6,
            uniform_x: 256,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RenderSpec {
    /// Image width and height in pixels.
    pub size: u32,
    /// Tiles drawn, in order of decreasing height.
    pub max_tiles: usize,
    /// Heatmap cells per side.
    pub heatmap: usize,
}

impl Default for RenderSpec {
    fn default() -> Self {
        Self {
            size: 800,
            max_tiles: 400,
            heatmap: 80,
        }
    }
}

/// Command-line values that override the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub depth: Option<usize>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn parse(text: &str) -> ConfigResult<Self> {
        toml::from_str(text).map_err(|e| ConfigError(e.to_string()))
    }

    pub fn load(path: &Path) -> ConfigResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(d) = o.depth {
            self.depth.word_length = d;
        }
        if let Some(t) = o.tol {
            self.tolerance.quadrature = t;
        }
        if let Some(p) = &o.out {
            self.output.dir = Some(p.clone());
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
    }

    pub fn validate(&self) -> ConfigResult<()> {
        if self.depth.word_length < 1 {
            return bad("depth.word_length must be at least 1");
        }
        let t = &self.tolerance;
        for (name, v) in [
            ("quadrature", t.quadrature),
            ("resolution", t.resolution),
            ("length", t.length),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("tolerance.{name} must be positive"));
            }
        }
        if self.query.radii().iter().any(|r| !(*r > 0.0)) {
            return bad("query radii must be positive");
        }
        if !(self.sec4.c >= 0.0 && self.sec4.c < 1.0) {
            return bad("sec4.c must lie in [0, 1)");
        }
        if !(self.sec4.ball_radius > 0.0) {
            return bad("sec4.ball_radius must be positive");
        }
        if self.sec4.n_max < 2 {
            return bad("sec4.n_max must be at least 2");
        }
        Ok(())
    }

    pub fn table(&self) -> ConfigResult<OrbitTable> {
        self.table_at(self.depth.word_length)
    }

    pub fn table_at(&self, word_length: usize) -> ConfigResult<OrbitTable> {
        Ok(enumerate(
            &self.group.generators()?,
            self.depth.options(word_length),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_takes_defaults() {
        let c = RunConfig::parse("").unwrap();
        assert_eq!(c.seed, 0);
        assert_eq!(c.group.kind, GroupKind::Trivial);
        assert_eq!(c.tolerance.quadrature, 1e-6);
        c.validate().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::parse("[group]\nkind = \"trivial\"\nfoo = 1\n").is_err());
        assert!(RunConfig::parse("[group]\nkind = \"hexagon\"\n").is_err());
    }

    #[test]
    fn overrides_win() {
        let mut c = RunConfig::parse("seed = 3\n[depth]\nword_length = 2\n").unwrap();
        c.apply(&Overrides {
            depth: Some(5),
            seed: Some(9),
            ..Default::default()
        });
        assert_eq!((c.depth.word_length, c.seed), (5, 9));
    }

    #[test]
    fn schottky_group_builds() {
        let c = RunConfig::parse(
            "[group]\nkind = \"schottky\"\npairs = [[-2.0, 1.0, 2.0, 1.0]]\nin_disk = true\n",
        )
        .unwrap();
        let g = c.group.generators().unwrap();
        assert_eq!(g.model, Model::Disk);
        assert_eq!(g.len(), 1);
    }
}
