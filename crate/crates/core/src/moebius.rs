//! Möbius and anti-Möbius maps of the disk, the upper half-plane and the
//! plane, the Cayley transform between the two hyperbolic models, and the
//! hyperbolic metric.
//!
//! The metric follows the density `1/(1-|z|^2)` on the disk and `1/(2 Im z)`
//! on the half-plane, so `rho(0, z) = atanh|z|`. This is half the usual
//! curvature -1 distance. Areas use the square of the density, e.g.
//! `dx dy / (4 y^2)` on the half-plane.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

const DET_TOL: f64 = 1e-12;
const POLE_TOL: f64 = 1e-14;
const TRACE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Disk,
    Halfplane,
    Plane,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Conformal,
    Anticonformal,
}

impl Orientation {
    fn flip(self, other: Orientation) -> Orientation {
        if self == other {
            Orientation::Conformal
        } else {
            Orientation::Anticonformal
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

/// A point tagged with the model it lives in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelPoint {
    pub value: C64,
    pub model: Model,
}

impl ModelPoint {
    pub fn disk(value: C64) -> Result<Self> {
        if value.norm() >= 1.0 + 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "{value} is not in the closed disk"
            )));
        }
        Ok(Self {
            value,
            model: Model::Disk,
        })
    }

    pub fn halfplane(value: C64) -> Result<Self> {
        if value.im <= -1e-12 {
            return Err(Error::InvalidArgument(format!(
                "{value} is not in the upper half-plane"
            )));
        }
        Ok(Self {
            value,
            model: Model::Halfplane,
        })
    }
}

/// A 2x2 complex matrix acting by linear fractional transformation,
/// optionally precomposed with complex conjugation.
///
/// Matrices are kept at determinant one with a canonical sign, so two maps
/// are equal exactly when their stored entries agree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoebiusMap {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
    pub orientation: Orientation,
    pub model: Model,
}

impl MoebiusMap {
    /// Builds a map from raw entries and normalizes it.
    pub fn new(
        a: C64,
        b: C64,
        c: C64,
        d: C64,
        orientation: Orientation,
        model: Model,
    ) -> Result<Self> {
        let det = a * d - b * c;
        if det.norm() < 1e-300 {
            return Err(Error::InvalidArgument("singular matrix".into()));
        }
        Ok(Self {
            a,
            b,
            c,
            d,
            orientation,
            model,
        }
        .normalized())
    }

    pub fn identity(model: Model) -> Self {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        Self {
            a: one,
            b: zero,
            c: zero,
            d: one,
            orientation: Orientation::Conformal,
            model,
        }
    }

    /// Real matrix acting on the half-plane.
    pub fn real(a: f64, b: f64, c: f64, d: f64, model: Model) -> Result<Self> {
        Self::new(
            a.into(),
            b.into(),
            c.into(),
            d.into(),
            Orientation::Conformal,
            model,
        )
    }

    /// `z -> -conj(z)`, reflection in the imaginary axis.
    pub fn tau(model: Model) -> Self {
        Self::new(
            (-1.0).into(),
            0.0.into(),
            0.0.into(),
            1.0.into(),
            Orientation::Anticonformal,
            model,
        )
        .expect("nonsingular")
    }

    /// Reflection in the circle with real center and positive radius:
    /// `z -> c + r^2 / (conj(z) - c)`.
    pub fn reflection_in_circle(center: f64, radius: f64, model: Model) -> Result<Self> {
        if !(radius > 0.0) || !center.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "bad circle ({center}, {radius})"
            )));
        }
        Self::new(
            center.into(),
            (radius * radius - center * center).into(),
            1.0.into(),
            (-center).into(),
            Orientation::Anticonformal,
            model,
        )
    }

    /// Cayley transform `(z - i)/(z + i)` from the half-plane onto the disk.
    pub fn cayley() -> Self {
        let i = C64::i();
        Self::new(
            1.0.into(),
            -i,
            1.0.into(),
            i,
            Orientation::Conformal,
            Model::Plane,
        )
        .expect("nonsingular")
    }

    pub fn cayley_inv() -> Self {
        Self::cayley().inverse()
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> C64 {
        self.a + self.d
    }

    pub fn is_conformal(&self) -> bool {
        self.orientation == Orientation::Conformal
    }

    pub fn with_model(mut self, model: Model) -> Self {
        self.model = model;
        self
    }

    fn normalized(self) -> Self {
        let s = self.det().sqrt();
        Self {
            a: self.a / s,
            b: self.b / s,
            c: self.c / s,
            d: self.d / s,
            ..self
        }
        .sign_canonical()
    }

    /// Nearest matrix of the form `[[a, b], [conj b, conj a]]` with
    /// `|a|^2 - |b|^2 = 1`. Long products drift off this form by roughly
    /// `eps * |a|^2`, which matters for elements near the boundary.
    pub fn project_su11(&self) -> MoebiusMap {
        if !self.is_conformal() {
            return *self;
        }
        let a = 0.5 * (self.a + self.d.conj());
        let b = 0.5 * (self.b + self.c.conj());
        let n2 = a.norm_sqr() - b.norm_sqr();
        if !(n2 > 0.0) {
            return *self;
        }
        let n = n2.sqrt();
        let (a, b) = (a / n, b / n);
        MoebiusMap {
            a,
            b,
            c: b.conj(),
            d: a.conj(),
            ..*self
        }
        .sign_canonical()
    }

    /// Chooses the overall sign so the first nonzero entry has positive real
    /// part (positive imaginary part on ties).
    fn sign_canonical(self) -> Self {
        let mut m = self;
        let lead = [m.a, m.b, m.c, m.d]
            .into_iter()
            .find(|e| e.norm() > 1e-13)
            .unwrap_or(m.a);
        if lead.re < -1e-13 || (lead.re.abs() <= 1e-13 && lead.im < 0.0) {
            m.a = -m.a;
            m.b = -m.b;
            m.c = -m.c;
            m.d = -m.d;
        }
        m
    }

    /// Projective distance between the matrices: the larger entry deviation,
    /// minimized over the overall sign. Orientation mismatch is infinite.
    pub fn distance(&self, other: &MoebiusMap) -> f64 {
        if self.orientation != other.orientation {
            return f64::INFINITY;
        }
        let e1 = [self.a, self.b, self.c, self.d];
        let e2 = [other.a, other.b, other.c, other.d];
        let plus = e1
            .iter()
            .zip(&e2)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        let minus = e1
            .iter()
            .zip(&e2)
            .map(|(x, y)| (x + y).norm())
            .fold(0.0, f64::max);
        plus.min(minus)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MoebiusMap) -> Result<MoebiusMap> {
        if self.model != other.model {
            return Err(Error::ModelMismatch(self.model, other.model));
        }
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &MoebiusMap) -> MoebiusMap {
        // An anticonformal outer map conjugates the inner matrix.
        let (a2, b2, c2, d2) = match self.orientation {
            Orientation::Conformal => (other.a, other.b, other.c, other.d),
            Orientation::Anticonformal => (
                other.a.conj(),
                other.b.conj(),
                other.c.conj(),
                other.d.conj(),
            ),
        };
        Self {
            a: self.a * a2 + self.b * c2,
            b: self.a * b2 + self.b * d2,
            c: self.c * a2 + self.d * c2,
            d: self.c * b2 + self.d * d2,
            orientation: self.orientation.flip(other.orientation),
            model: self.model,
        }
        .sign_canonical()
    }

    pub fn inverse(&self) -> MoebiusMap {
        // Inverse of z -> M(conj z) is w -> conj(M^-1 w) = conj(M^-1)(conj w).
        let (a, b, c, d) = (self.d, -self.b, -self.c, self.a);
        let m = match self.orientation {
            Orientation::Conformal => Self {
                a,
                b,
                c,
                d,
                ..*self
            },
            Orientation::Anticonformal => Self {
                a: a.conj(),
                b: b.conj(),
                c: c.conj(),
                d: d.conj(),
                ..*self
            },
        };
        m.sign_canonical()
    }

    fn arg(&self, z: C64) -> C64 {
        match self.orientation {
            Orientation::Conformal => z,
            Orientation::Anticonformal => z.conj(),
        }
    }

    /// Evaluates the map; fails on the pole.
    pub fn apply(&self, z: C64) -> Result<C64> {
        let w = self.arg(z);
        let den = self.c * w + self.d;
        if den.norm() < POLE_TOL {
            return Err(Error::PointAtInfinity);
        }
        Ok((self.a * w + self.b) / den)
    }

    pub fn apply_point(&self, z: ModelPoint) -> Result<ModelPoint> {
        if self.model != Model::Plane && z.model != self.model {
            return Err(Error::ModelMismatch(self.model, z.model));
        }
        Ok(ModelPoint {
            value: self.apply(z.value)?,
            model: z.model,
        })
    }

    /// Image of a point of the Riemann sphere, `None` standing for infinity.
    pub fn apply_sphere(&self, z: Option<C64>) -> Option<C64> {
        match z {
            None => {
                if self.c.norm() < POLE_TOL {
                    None
                } else {
                    Some(self.a / self.c)
                }
            }
            Some(z) => self.apply(z).ok(),
        }
    }

    /// Complex derivative `1/(cz+d)^2`; only conformal maps qualify.
    pub fn derivative(&self, z: C64) -> Result<C64> {
        if !self.is_conformal() {
            return Err(Error::NotHolomorphic);
        }
        let den = self.c * z + self.d;
        if den.norm() < POLE_TOL {
            return Err(Error::PointAtInfinity);
        }
        Ok(1.0 / (den * den))
    }

    /// Modulus of the derivative; for anticonformal maps this is the
    /// modulus of the Wirtinger derivative in `conj(z)`.
    pub fn derivative_modulus(&self, z: C64) -> f64 {
        let den = self.c * self.arg(z) + self.d;
        1.0 / den.norm_sqr()
    }

    pub fn classify(&self) -> Classification {
        let scale = [self.a, self.b, self.c, self.d]
            .iter()
            .map(|e| e.norm())
            .fold(1.0, f64::max);
        if self.distance(&Self::identity(self.model)) < 1e-12 * scale {
            return Classification::Identity;
        }
        let t = self.trace();
        let tr = t.norm();
        // Disk and half-plane elements have real trace; off-axis traces are loxodromic.
        if t.im.abs() > TRACE_TOL * scale {
            return Classification::Hyperbolic;
        }
        if (tr - 2.0).abs() <= TRACE_TOL * scale {
            Classification::Parabolic
        } else if tr < 2.0 {
            Classification::Elliptic
        } else {
            Classification::Hyperbolic
        }
    }

    /// Fixed points on the Riemann sphere (`None` is infinity).
    pub fn fixed_points(&self) -> Vec<Option<C64>> {
        // c z^2 + (d - a) z - b = 0
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        if c.norm() < 1e-14 {
            if (d - a).norm() < 1e-14 {
                return vec![None];
            }
            return vec![Some(b / (d - a)), None];
        }
        let disc = ((d - a) * (d - a) + 4.0 * b * c).sqrt();
        let z1 = (a - d + disc) / (2.0 * c);
        let z2 = (a - d - disc) / (2.0 * c);
        if (z1 - z2).norm() < 1e-7 * (1.0 + z1.norm()) {
            vec![Some((z1 + z2) * 0.5)]
        } else {
            vec![Some(z1), Some(z2)]
        }
    }

    /// Conjugates a half-plane map to the disk: `κ ∘ self ∘ κ⁻¹`.
    pub fn halfplane_to_disk(&self) -> MoebiusMap {
        let k = Self::cayley();
        let m = self.with_model(Model::Plane);
        k.compose_unchecked(&m)
            .compose_unchecked(&k.inverse())
            .with_model(Model::Disk)
    }

    /// Conjugates a disk map to the half-plane: `κ⁻¹ ∘ self ∘ κ`.
    pub fn disk_to_halfplane(&self) -> MoebiusMap {
        let k = Self::cayley();
        let m = self.with_model(Model::Plane);
        k.inverse()
            .compose_unchecked(&m)
            .compose_unchecked(&k)
            .with_model(Model::Halfplane)
    }

    /// Whether `|det - 1|` is within tolerance.
    pub fn is_normalized(&self) -> bool {
        (self.det() - 1.0).norm() < DET_TOL
    }
}

pub fn cayley(z: C64) -> Result<C64> {
    MoebiusMap::cayley().apply(z)
}

pub fn cayley_inv(w: C64) -> Result<C64> {
    MoebiusMap::cayley_inv().apply(w)
}

/// Hyperbolic distance with the disk density `1/(1-|z|^2)`.
pub fn disk_distance(z: C64, w: C64) -> f64 {
    let num = (z - w).norm();
    let den = (C64::new(1.0, 0.0) - z.conj() * w).norm();
    if den == 0.0 {
        return f64::INFINITY;
    }
    (num / den).min(1.0).atanh()
}

/// Hyperbolic distance with the half-plane density `1/(2 Im z)`.
pub fn halfplane_distance(z: C64, w: C64) -> f64 {
    let num = (z - w).norm();
    let den = (z - w.conj()).norm();
    if den == 0.0 {
        return f64::INFINITY;
    }
    (num / den).min(1.0).atanh()
}

pub fn hyperbolic_distance(z: ModelPoint, w: ModelPoint) -> Result<f64> {
    match (z.model, w.model) {
        (Model::Disk, Model::Disk) => Ok(disk_distance(z.value, w.value)),
        (Model::Halfplane, Model::Halfplane) => Ok(halfplane_distance(z.value, w.value)),
        (a, b) => Err(Error::ModelMismatch(a, b)),
    }
}

/// Disk automorphism `z -> e^{i theta} (z - p)/(1 - conj(p) z)`.
pub fn disk_automorphism(theta: f64, p: C64) -> MoebiusMap {
    let e = C64::from_polar(1.0, theta);
    MoebiusMap::new(
        e,
        -e * p,
        -p.conj(),
        1.0.into(),
        Orientation::Conformal,
        Model::Disk,
    )
    .expect("|p| < 1 gives a nonsingular matrix")
}
