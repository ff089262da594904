//! Beltrami coefficients: closed-form fields, fields restricted to a
//! fundamental domain, their group-invariant extension, and the Cayley
//! pullback from the half-plane to the disk.
//!
//! Compatibility with a group means `μ(z) = μ(g(z)) · conj(g'(z)) / g'(z)`
//! for every element `g`. The invariant extension transports values from
//! the domain with this cocycle, so the law holds exactly on every
//! enumerated tile.

use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fundomain::FundamentalDomainView;
use crate::geometry::{Circle, GenCircle};
use crate::moebius::{cayley, cayley_inv, Model, MoebiusMap, C64};

/// How the extension transports values off the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtensionMode {
    /// `μ_F(γ⁻¹z) · conj((γ⁻¹)'(z)) / (γ⁻¹)'(z)`, compatible with the group.
    Transported,
    /// `μ_F(γ⁻¹z)` without the derivative factor.
    Literal,
}

/// Samples on a rectilinear grid, bilinearly interpolated; zero outside.
#[derive(Debug, Clone)]
pub struct GridField {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Row-major over `ys`, then `xs`.
    values: Vec<C64>,
}

impl GridField {
    /// Parses rows `x y re im` (whitespace or comma separated, `#` comments).
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let nums: std::result::Result<Vec<f64>, _> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(str::parse)
                .collect();
            let nums = nums.map_err(|e| Error::Config(format!("grid line {}: {e}", n + 1)))?;
            if nums.len() != 4 {
                return Err(Error::Config(format!(
                    "grid line {}: expected 4 columns",
                    n + 1
                )));
            }
            rows.push(nums);
        }
        let mut xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let mut ys: Vec<f64> = rows.iter().map(|r| r[1]).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        ys.sort_by(f64::total_cmp);
        ys.dedup();
        if xs.len() < 2 || ys.len() < 2 || xs.len() * ys.len() != rows.len() {
            return Err(Error::Config(
                "grid rows do not form a rectilinear grid".into(),
            ));
        }
        let mut values = vec![C64::new(0.0, 0.0); rows.len()];
        for r in &rows {
            let i = xs.partition_point(|&x| x < r[0]);
            let j = ys.partition_point(|&y| y < r[1]);
            values[j * xs.len() + i] = C64::new(r[2], r[3]);
        }
        Ok(Self { xs, ys, values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn eval(&self, z: C64) -> C64 {
        let (nx, ny) = (self.xs.len(), self.ys.len());
        if z.re < self.xs[0]
            || z.re > self.xs[nx - 1]
            || z.im < self.ys[0]
            || z.im > self.ys[ny - 1]
        {
            return C64::new(0.0, 0.0);
        }
        let i = self.xs.partition_point(|&x| x <= z.re).clamp(1, nx - 1) - 1;
        let j = self.ys.partition_point(|&y| y <= z.im).clamp(1, ny - 1) - 1;
        let tx = (z.re - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        let ty = (z.im - self.ys[j]) / (self.ys[j + 1] - self.ys[j]);
        let v = |a: usize, b: usize| self.values[b * nx + a];
        v(i, j) * (1.0 - tx) * (1.0 - ty)
            + v(i + 1, j) * tx * (1.0 - ty)
            + v(i, j + 1) * (1.0 - tx) * ty
            + v(i + 1, j + 1) * tx * ty
    }

    fn sup(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub enum FieldKind {
    Zero,
    /// The constant `c` on the whole model.
    Constant(C64),
    /// `c` on a union of Euclidean balls, zero elsewhere.
    ConstantOnBalls {
        c: C64,
        balls: Vec<Circle>,
    },
    /// `c (1 - |z|^2)^α` on the disk.
    PowerDecay {
        c: C64,
        alpha: f64,
    },
    /// `c (1 - |z - z0|^2 / ρ^2)^2` inside the ball, zero outside.
    Bump {
        c: C64,
        ball: Circle,
    },
    Grid(Arc<GridField>),
    /// The base field times the indicator of the fundamental domain.
    DomainRestricted {
        base: Box<BeltramiField>,
        domain: Arc<FundamentalDomainView>,
    },
    /// Extension of a field living on the domain to every enumerated tile.
    InvariantExtension {
        base: Box<BeltramiField>,
        domain: Arc<FundamentalDomainView>,
        mode: ExtensionMode,
        /// Tiles (table entries) on which the base can be nonzero.
        support_tiles: Arc<Vec<usize>>,
    },
    /// Pullback of a half-plane field to the disk by the Cayley transform.
    CayleyPullback(Box<BeltramiField>),
}

/// An evaluable Beltrami coefficient on one model.
#[derive(Debug, Clone)]
pub struct BeltramiField {
    pub kind: FieldKind,
    pub model: Model,
    pub sup_norm: f64,
    /// Evaluations that fell outside every enumerated tile.
    truncation_events: Arc<AtomicU64>,
}

fn check_sup(c: f64) -> Result<()> {
    if !(c < 1.0) || !c.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "sup norm {c} must be below 1"
        )));
    }
    Ok(())
}

impl BeltramiField {
    fn make(kind: FieldKind, model: Model, sup_norm: f64) -> Self {
        Self {
            kind,
            model,
            sup_norm,
            truncation_events: Arc::new(AtomicU64::new(0)),
        }
    }

    pub fn zero(model: Model) -> Self {
        Self::make(FieldKind::Zero, model, 0.0)
    }

    pub fn constant(c: C64, model: Model) -> Result<Self> {
        check_sup(c.norm())?;
        Ok(Self::make(FieldKind::Constant(c), model, c.norm()))
    }

    pub fn constant_on_balls(c: C64, balls: Vec<Circle>, model: Model) -> Result<Self> {
        check_sup(c.norm())?;
        Ok(Self::make(
            FieldKind::ConstantOnBalls { c, balls },
            model,
            c.norm(),
        ))
    }

    pub fn power_decay(c: C64, alpha: f64) -> Result<Self> {
        check_sup(c.norm())?;
        if alpha < 0.0 {
            return Err(Error::InvalidArgument(
                "decay exponent must be nonnegative".into(),
            ));
        }
        Ok(Self::make(
            FieldKind::PowerDecay { c, alpha },
            Model::Disk,
            c.norm(),
        ))
    }

    pub fn bump(c: C64, ball: Circle, model: Model) -> Result<Self> {
        check_sup(c.norm())?;
        Ok(Self::make(FieldKind::Bump { c, ball }, model, c.norm()))
    }

    pub fn grid(grid: GridField, model: Model) -> Result<Self> {
        let s = grid.sup();
        check_sup(s)?;
        Ok(Self::make(FieldKind::Grid(Arc::new(grid)), model, s))
    }

    /// `μ_F`: the base field on the domain, zero off it.
    pub fn restricted_to_domain(
        base: BeltramiField,
        domain: Arc<FundamentalDomainView>,
    ) -> Result<Self> {
        if base.model != domain.model() {
            return Err(Error::ModelMismatch(base.model, domain.model()));
        }
        let (m, s) = (base.model, base.sup_norm);
        Ok(Self::make(
            FieldKind::DomainRestricted {
                base: Box::new(base),
                domain,
            },
            m,
            s,
        ))
    }

    /// `μ*`: the transported extension of a field living on the domain.
    /// A base that is not already restricted gets restricted first.
    pub fn invariant_extension(
        base: BeltramiField,
        domain: Arc<FundamentalDomainView>,
        mode: ExtensionMode,
    ) -> Result<Self> {
        let base = match base.kind {
            FieldKind::DomainRestricted { .. } => base,
            _ => Self::restricted_to_domain(base, domain.clone())?,
        };
        if base.model != domain.model() {
            return Err(Error::ModelMismatch(base.model, domain.model()));
        }
        let support_tiles = Arc::new((0..domain.table().len()).collect());
        let (m, s) = (base.model, base.sup_norm);
        Ok(Self::make(
            FieldKind::InvariantExtension {
                base: Box::new(base),
                domain,
                mode,
                support_tiles,
            },
            m,
            s,
        ))
    }

    /// `μ₀(z) = μ(κ⁻¹z) · conj((κ⁻¹)'(z)) / (κ⁻¹)'(z)`.
    pub fn cayley_pullback(inner: BeltramiField) -> Result<Self> {
        if inner.model != Model::Halfplane {
            return Err(Error::ModelMismatch(inner.model, Model::Halfplane));
        }
        let s = inner.sup_norm;
        Ok(Self::make(
            FieldKind::CayleyPullback(Box::new(inner)),
            Model::Disk,
            s,
        ))
    }

    /// For an invariant extension: the field on the domain (without the
    /// domain indicator), the domain, and the transport mode.
    pub fn extension_parts(
        &self,
    ) -> Option<(&BeltramiField, &Arc<FundamentalDomainView>, ExtensionMode)> {
        match &self.kind {
            FieldKind::InvariantExtension {
                base, domain, mode, ..
            } => {
                let inner = match &base.kind {
                    FieldKind::DomainRestricted { base: b, .. } => b.as_ref(),
                    _ => base.as_ref(),
                };
                Some((inner, domain, *mode))
            }
            _ => None,
        }
    }

    pub fn truncation_events(&self) -> u64 {
        let own = self.truncation_events.load(Ordering::Relaxed);
        own + match &self.kind {
            FieldKind::DomainRestricted { base, .. }
            | FieldKind::InvariantExtension { base, .. } => base.truncation_events(),
            FieldKind::CayleyPullback(inner) => inner.truncation_events(),
            _ => 0,
        }
    }

    /// Whether `|μ|` is constant between the curves of
    /// [`discontinuities`](Self::discontinuities). Transport and domain
    /// restriction preserve this, since the cocycle is unimodular.
    pub fn piecewise_constant_modulus(&self) -> bool {
        match &self.kind {
            FieldKind::Zero | FieldKind::Constant(_) | FieldKind::ConstantOnBalls { .. } => true,
            FieldKind::DomainRestricted { base, .. }
            | FieldKind::InvariantExtension { base, .. } => base.piecewise_constant_modulus(),
            FieldKind::CayleyPullback(inner) => inner.piecewise_constant_modulus(),
            _ => false,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.kind {
            FieldKind::Zero => true,
            FieldKind::Constant(c)
            | FieldKind::ConstantOnBalls { c, .. }
            | FieldKind::PowerDecay { c, .. }
            | FieldKind::Bump { c, .. } => c.norm() == 0.0,
            FieldKind::Grid(g) => g.sup() == 0.0,
            FieldKind::DomainRestricted { base, .. }
            | FieldKind::InvariantExtension { base, .. } => base.is_zero(),
            FieldKind::CayleyPullback(inner) => inner.is_zero(),
        }
    }

    /// Value at `z` (native model coordinates).
    pub fn evaluate(&self, z: C64) -> C64 {
        let zero = C64::new(0.0, 0.0);
        match &self.kind {
            FieldKind::Zero => zero,
            FieldKind::Constant(c) => *c,
            FieldKind::ConstantOnBalls { c, balls } => {
                if balls.iter().any(|b| b.contains(z)) {
                    *c
                } else {
                    zero
                }
            }
            FieldKind::PowerDecay { c, alpha } => {
                let s = (1.0 - z.norm_sqr()).max(0.0);
                c * s.powf(*alpha)
            }
            FieldKind::Bump { c, ball } => {
                let t = (z - ball.center).norm_sqr() / (ball.radius * ball.radius);
                if t < 1.0 {
                    c * (1.0 - t) * (1.0 - t)
                } else {
                    zero
                }
            }
            FieldKind::Grid(g) => g.eval(z),
            FieldKind::DomainRestricted { base, domain } => {
                if domain.contains(z) {
                    base.evaluate(z)
                } else {
                    zero
                }
            }
            FieldKind::InvariantExtension {
                base, domain, mode, ..
            } => {
                let Some((gamma_native, w)) = locate_native(domain, z) else {
                    self.truncation_events.fetch_add(1, Ordering::Relaxed);
                    return zero;
                };
                let inner = match &base.kind {
                    FieldKind::DomainRestricted { base: b, .. } => b.evaluate(w),
                    _ => base.evaluate(w),
                };
                match mode {
                    ExtensionMode::Literal => inner,
                    ExtensionMode::Transported => match gamma_native.inverse().derivative(z) {
                        Ok(d) if d.norm() > 0.0 => inner * d.conj() / d,
                        _ => zero,
                    },
                }
            }
            FieldKind::CayleyPullback(inner) => {
                let k = MoebiusMap::cayley_inv();
                match (k.apply(z), k.derivative(z)) {
                    (Ok(h), Ok(d)) => inner.evaluate(h) * d.conj() / d,
                    _ => zero,
                }
            }
        }
    }

    /// The field near `z` with the tile lookup done once. For an invariant
    /// extension the result agrees with [`Self::evaluate`] on the tile
    /// containing `z`; other fields are returned unchanged.
    pub fn localize(&self, z: C64) -> LocalField<'_> {
        match &self.kind {
            FieldKind::InvariantExtension {
                base, domain, mode, ..
            } => {
                let Some((gamma, _)) = locate_native(domain, z) else {
                    self.truncation_events.fetch_add(1, Ordering::Relaxed);
                    return LocalField::Zero;
                };
                let base = match &base.kind {
                    FieldKind::DomainRestricted { base: b, .. } => b.as_ref(),
                    _ => base.as_ref(),
                };
                LocalField::Pulled {
                    base,
                    inverse: gamma.inverse(),
                    transported: *mode == ExtensionMode::Transported,
                }
            }
            _ => LocalField::Global(self),
        }
    }

    /// Cheap test that the field may be nonzero at `z`; false only where the
    /// field is known to vanish.
    pub fn may_be_nonzero(&self, z: C64) -> bool {
        match &self.kind {
            FieldKind::Zero => false,
            FieldKind::ConstantOnBalls { balls, .. } => balls.iter().any(|b| b.contains(z)),
            FieldKind::Bump { ball, .. } => ball.contains(z),
            FieldKind::DomainRestricted { base, domain } => {
                base.may_be_nonzero(z) && domain.contains(z)
            }
            FieldKind::InvariantExtension { .. } => self.evaluate(z).norm() > 0.0,
            FieldKind::CayleyPullback(inner) => match cayley_inv(z) {
                Ok(h) => inner.may_be_nonzero(h),
                Err(_) => false,
            },
            _ => !self.is_zero(),
        }
    }

    /// Euclidean balls (native model) outside of which the field vanishes;
    /// `None` if unbounded or unknown.
    pub fn support_balls(&self) -> Option<Vec<Circle>> {
        match &self.kind {
            FieldKind::Zero => Some(Vec::new()),
            FieldKind::ConstantOnBalls { balls, .. } => Some(balls.clone()),
            FieldKind::Bump { ball, .. } => Some(vec![*ball]),
            FieldKind::DomainRestricted { base, .. } => base.support_balls(),
            FieldKind::InvariantExtension { base, domain, .. } => {
                let balls = base.support_balls()?;
                let circles: Vec<GenCircle> = domain
                    .table()
                    .entries
                    .iter()
                    .flat_map(|e| {
                        balls
                            .iter()
                            .filter_map(move |b| GenCircle::Circle(*b).image(&e.map))
                    })
                    .collect();
                let mut out = Vec::with_capacity(circles.len());
                for c in circles {
                    match c {
                        GenCircle::Circle(c) => out.push(c),
                        GenCircle::Line { .. } => return None,
                    }
                }
                Some(out)
            }
            FieldKind::CayleyPullback(inner) => {
                let k = MoebiusMap::cayley();
                inner
                    .support_balls()?
                    .iter()
                    .map(|b| match GenCircle::Circle(*b).image(&k) {
                        Some(GenCircle::Circle(c)) => Some(c),
                        _ => None,
                    })
                    .collect()
            }
            _ => None,
        }
    }

    /// Curves (native model) across which the field may jump. The
    /// quadrature uses them as breakpoints.
    pub fn discontinuities(&self) -> Vec<GenCircle> {
        match &self.kind {
            FieldKind::ConstantOnBalls { balls, .. } => {
                balls.iter().map(|b| GenCircle::Circle(*b)).collect()
            }
            FieldKind::Bump { ball, .. } => vec![GenCircle::Circle(*ball)],
            FieldKind::DomainRestricted { base, domain } => {
                let mut out = base.discontinuities();
                let sides = domain.native_side_index().items();
                match base.support_balls() {
                    Some(balls) => {
                        // Only sides that cut the support matter.
                        out.extend(
                            sides
                                .iter()
                                .filter(|s| balls.iter().any(|b| cuts(s, b)))
                                .copied(),
                        )
                    }
                    None => out.extend_from_slice(sides),
                }
                out
            }
            FieldKind::InvariantExtension { base, domain, .. } => {
                let base_curves = base.discontinuities();
                domain
                    .table()
                    .entries
                    .iter()
                    .flat_map(|e| base_curves.iter().filter_map(move |c| c.image(&e.map)))
                    .collect()
            }
            FieldKind::CayleyPullback(inner) => {
                let k = MoebiusMap::cayley();
                inner
                    .discontinuities()
                    .iter()
                    .filter_map(|c| c.image(&k))
                    .collect()
            }
            _ => Vec::new(),
        }
    }
}

/// A field restricted to a neighborhood, see [`BeltramiField::localize`].
#[derive(Debug, Clone, Copy)]
pub enum LocalField<'a> {
    Zero,
    Global(&'a BeltramiField),
    /// `base(g⁻¹ z)`, times the cocycle of `g⁻¹` when transported.
    Pulled {
        base: &'a BeltramiField,
        inverse: MoebiusMap,
        transported: bool,
    },
}

impl LocalField<'_> {
    pub fn evaluate(&self, z: C64) -> C64 {
        let zero = C64::new(0.0, 0.0);
        match self {
            LocalField::Zero => zero,
            LocalField::Global(f) => f.evaluate(z),
            LocalField::Pulled {
                base,
                inverse,
                transported,
            } => {
                let Ok(w) = inverse.apply(z) else { return zero };
                let inner = base.evaluate(w);
                if !*transported || inner == zero {
                    return inner;
                }
                match inverse.derivative(z) {
                    Ok(d) if d.norm() > 0.0 => inner * d.conj() / d,
                    _ => zero,
                }
            }
        }
    }
}

/// Whether a generalized circle passes through the open ball.
fn cuts(c: &GenCircle, ball: &Circle) -> bool {
    c.side(ball.center).abs() < ball.radius
}

/// `γ` (native model) and `γ⁻¹(z)` for an enumerated tile containing `z`.
pub fn locate_native(domain: &FundamentalDomainView, z: C64) -> Option<(MoebiusMap, C64)> {
    let table = domain.table();
    match domain.model() {
        Model::Halfplane => {
            let loc = domain.locate_disk(cayley(z).ok()?);
            let i = loc.entry?;
            Some((table.entries[i].map, cayley_inv(loc.reduced).ok()?))
        }
        _ => {
            let loc = domain.locate_disk(z);
            let i = loc.entry?;
            Some((table.entries[i].map, loc.reduced))
        }
    }
}

/// Word index of the tile containing `z`, with the truncation flag.
pub fn locate(domain: &FundamentalDomainView, z: C64) -> (Option<usize>, bool) {
    let zd = match domain.model() {
        Model::Halfplane => match cayley(z) {
            Ok(w) => w,
            Err(_) => return (None, true),
        },
        _ => z,
    };
    let loc = domain.locate_disk(zd);
    (loc.entry, loc.truncation_uncertain())
}

/// `|μ(z) - μ(g(z)) · conj(g'(z)) / g'(z)|`.
pub fn compatibility_residual(field: &BeltramiField, g: &MoebiusMap, z: C64) -> Result<f64> {
    let d = g.derivative(z)?;
    let gz = g.apply(z)?;
    Ok((field.evaluate(z) - field.evaluate(gz) * d.conj() / d).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{enumerate, rubel_ryff_generators, EnumerationOptions};

    #[test]
    fn closed_form_values() {
        let z = BeltramiField::zero(Model::Disk);
        assert_eq!(z.evaluate(C64::new(0.2, 0.3)), C64::new(0.0, 0.0));
        let p = BeltramiField::power_decay(0.5.into(), 0.5).unwrap();
        assert!((p.evaluate(C64::new(0.0, 0.0)) - 0.5).norm() < 1e-15);
        let b = BeltramiField::constant_on_balls(
            0.5.into(),
            vec![Circle::new(C64::new(0.0, 0.0), 1.0)],
            Model::Halfplane,
        )
        .unwrap();
        assert_eq!(b.evaluate(C64::new(0.0, 2.0)), C64::new(0.0, 0.0));
        assert_eq!(b.evaluate(C64::new(0.0, 0.5)), C64::new(0.5, 0.0));
        assert!(BeltramiField::constant(1.0.into(), Model::Disk).is_err());
    }

    #[test]
    fn constant_field_is_not_compatible() {
        let f = BeltramiField::constant(C64::new(0.3, 0.0), Model::Disk).unwrap();
        let g = crate::moebius::disk_automorphism(0.4, C64::new(0.3, -0.2));
        let z = C64::new(0.1, 0.25);
        let d = g.derivative(z).unwrap();
        let expected = 0.3 * (C64::new(1.0, 0.0) - d.conj() / d).norm();
        let r = compatibility_residual(&f, &g, z).unwrap();
        assert!((r - expected).abs() < 1e-14);
        assert!(r > 1e-3);
        assert_eq!(
            compatibility_residual(&BeltramiField::zero(Model::Disk), &g, z).unwrap(),
            0.0
        );
    }

    #[test]
    fn grid_parsing_and_interpolation() {
        let text = "# x y re im\n0 0 0 0\n1 0 0.2 0\n0 1 0 0.2\n1 1 0.2 0.2\n";
        let g = GridField::parse(text).unwrap();
        let f = BeltramiField::grid(g, Model::Disk).unwrap();
        let v = f.evaluate(C64::new(0.5, 0.5));
        assert!((v - C64::new(0.1, 0.1)).norm() < 1e-15);
        assert_eq!(f.evaluate(C64::new(-0.5, 0.5)), C64::new(0.0, 0.0));
        assert!(GridField::parse("0 0 0 0\n1 0 0 0\n0 1 0 0\n").is_err());
    }

    #[test]
    fn extension_restricts_to_base_on_domain() {
        let table = Arc::new(enumerate(
            &rubel_ryff_generators(3).unwrap(),
            EnumerationOptions::depth(3),
        ));
        let fd = Arc::new(FundamentalDomainView::new(table));
        let ball = Circle::new(C64::new(0.0, 0.0), 1.0);
        let base =
            BeltramiField::constant_on_balls(0.5.into(), vec![ball], Model::Halfplane).unwrap();
        let ext = BeltramiField::invariant_extension(base, fd.clone(), ExtensionMode::Transported)
            .unwrap();
        // (0, 0.5) lies between the two side circles through the cusp at 0.
        let inside = C64::new(0.0, 0.5);
        assert!(fd.contains(inside));
        assert!((ext.evaluate(inside) - 0.5).norm() < 1e-12);
        let outside_ball = C64::new(0.0, 1.5);
        assert!(fd.contains(outside_ball));
        assert_eq!(ext.evaluate(outside_ball), C64::new(0.0, 0.0));
    }

    #[test]
    fn pullback_modulus() {
        let inner = BeltramiField::constant_on_balls(
            C64::new(0.3, 0.2),
            vec![Circle::new(C64::new(0.0, 1.0), 0.5)],
            Model::Halfplane,
        )
        .unwrap();
        let p = BeltramiField::cayley_pullback(inner.clone()).unwrap();
        assert!(
            (p.evaluate(C64::new(0.0, 0.0)).norm() - inner.evaluate(C64::new(0.0, 1.0)).norm())
                .abs()
                < 1e-15
        );
        let z = BeltramiField::cayley_pullback(BeltramiField::zero(Model::Halfplane)).unwrap();
        assert_eq!(z.evaluate(C64::new(0.3, 0.1)), C64::new(0.0, 0.0));
    }
}
