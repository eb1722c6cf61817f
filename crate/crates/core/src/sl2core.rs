//! PSL(2,R) elements, Lie algebra elements, the nonnegative cone and
//! conjugacy classification.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat2::Mat2;

pub const TAU_CLASS: f64 = 1e-9;
pub const EPS_EQ: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub class: f64,
    pub eq: f64,
    pub margin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { class: TAU_CLASS, eq: EPS_EQ, margin: 1e-8 }
    }
}

/// An element of PSL(2,R), stored as a unit-determinant representative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    m: Mat2,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement { m: Mat2::IDENTITY };

    /// Rescales by 1/√det. Rejects non-finite entries and det ≤ 0.
    pub fn new(m: Mat2) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        let det = m.det();
        if !(det > 0.0) {
            return Err(Error::NonPositiveDeterminant(det));
        }
        Ok(GroupElement { m: m.scale(1.0 / det.sqrt()) })
    }

    /// Like [`GroupElement::new`] but also rejects |det − 1| > tol.
    pub fn unimodular(m: Mat2, tol: f64) -> Result<Self> {
        let g = Self::new(m)?;
        if (m.det() - 1.0).abs() > tol {
            return Err(Error::NonUnimodular(m.det()));
        }
        Ok(g)
    }

    /// Keeps the entries bit for bit; for reloading already normalized data.
    pub fn from_stored(m: Mat2) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        if (m.det() - 1.0).abs() > 1e-12 {
            return Err(Error::NonUnimodular(m.det()));
        }
        Ok(GroupElement { m })
    }

    pub(crate) fn from_mat_unchecked(m: Mat2) -> Self {
        let det = m.det();
        GroupElement { m: m.scale(1.0 / det.sqrt()) }
    }

    pub fn rotation(theta: f64) -> Self {
        GroupElement { m: Mat2::rotation(theta) }
    }

    pub fn diag(lambda: f64) -> Self {
        GroupElement::from_mat_unchecked(Mat2::diag(lambda, 1.0 / lambda))
    }

    pub fn exp(x: &LieElement) -> Self {
        GroupElement::from_mat_unchecked(x.matrix().exp_traceless())
    }

    pub fn matrix(&self) -> Mat2 {
        self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }

    pub fn inverse(&self) -> Self {
        GroupElement { m: self.m.adj() }
    }

    pub fn neg(&self) -> Self {
        GroupElement { m: -self.m }
    }

    /// The representative with nonnegative trace.
    pub fn trace_positive(&self) -> Self {
        if self.trace() < 0.0 {
            self.neg()
        } else {
            *self
        }
    }

    /// Sign-blind distance min(‖g − h‖, ‖g + h‖).
    pub fn dist(&self, other: &GroupElement) -> f64 {
        (self.m - other.m).norm().min((self.m + other.m).norm())
    }

    pub fn approx_eq(&self, other: &GroupElement, eps: f64) -> bool {
        self.dist(other) <= eps
    }

    /// Flips the sign if that brings `self` closer to `reference` in SL(2).
    pub fn aligned_to(&self, reference: &GroupElement) -> Self {
        if (self.m - reference.m).norm() <= (self.m + reference.m).norm() {
            *self
        } else {
            self.neg()
        }
    }

    pub fn conj(&self, h: &GroupElement) -> Self {
        *h * *self * h.inverse()
    }

    /// det(v, g v) as a quadratic form in v.
    pub fn det_form(&self, v: [f64; 2]) -> f64 {
        let w = self.m.apply(v);
        v[0] * w[1] - v[1] * w[0]
    }
}

impl std::ops::Mul for GroupElement {
    type Output = GroupElement;
    fn mul(self, o: GroupElement) -> GroupElement {
        GroupElement::from_mat_unchecked(self.m * o.m)
    }
}

/// A traceless 2×2 real matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LieElement {
    x: Mat2,
}

impl LieElement {
    pub const ZERO: LieElement = LieElement { x: Mat2::ZERO };
    pub const J: LieElement = LieElement { x: Mat2::J };

    /// Projects onto the traceless part.
    pub fn new(x: Mat2) -> Self {
        LieElement { x: x.traceless_part() }
    }

    /// Builds γ from its (α, δ, ε) coordinates.
    pub fn from_coords(alpha: f64, delta: f64, eps: f64) -> Self {
        LieElement { x: Mat2::new(eps, delta - alpha, delta + alpha, -eps) }
    }

    pub fn matrix(&self) -> Mat2 {
        self.x
    }

    pub fn alpha(&self) -> f64 {
        0.5 * (self.x.c - self.x.b)
    }

    pub fn delta(&self) -> f64 {
        0.5 * (self.x.c + self.x.b)
    }

    pub fn epsilon(&self) -> f64 {
        self.x.a
    }

    pub fn norm(&self) -> f64 {
        self.x.norm()
    }

    pub fn scale(&self, s: f64) -> Self {
        LieElement { x: self.x.scale(s) }
    }

    /// α − √(δ² + ε²); nonnegative on the nonnegative cone.
    pub fn cone_margin(&self) -> f64 {
        self.alpha() - self.delta().hypot(self.epsilon())
    }

    /// −α − √(δ² + ε²); nonnegative on the nonpositive cone.
    pub fn nonpositive_margin(&self) -> f64 {
        -self.alpha() - self.delta().hypot(self.epsilon())
    }

    /// det(v, γ v) = (δ+α)x² − 2εxy + (α−δ)y².
    pub fn det_form(&self, v: [f64; 2]) -> f64 {
        let w = self.x.apply(v);
        v[0] * w[1] - v[1] * w[0]
    }

    pub fn conj(&self, g: &GroupElement) -> Self {
        LieElement::new(g.matrix() * self.x * g.matrix().adj())
    }

    pub fn bracket(&self, other: &LieElement) -> Self {
        LieElement::new(self.x.commutator(&other.x))
    }
}

impl std::ops::Add for LieElement {
    type Output = LieElement;
    fn add(self, o: LieElement) -> LieElement {
        LieElement { x: self.x + o.x }
    }
}

impl std::ops::Sub for LieElement {
    type Output = LieElement;
    fn sub(self, o: LieElement) -> LieElement {
        LieElement { x: self.x - o.x }
    }
}

impl std::ops::Neg for LieElement {
    type Output = LieElement;
    fn neg(self) -> LieElement {
        self.scale(-1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cone {
    Positive,
    NonnegBoundary,
    Negative,
    NonposBoundary,
    Zero,
    Indefinite,
}

impl Cone {
    pub fn is_nonnegative(self) -> bool {
        matches!(self, Cone::Positive | Cone::NonnegBoundary | Cone::Zero)
    }

    pub fn is_nonpositive(self) -> bool {
        matches!(self, Cone::Negative | Cone::NonposBoundary | Cone::Zero)
    }
}

pub fn cone_test(gamma: &LieElement, tau: f64) -> Cone {
    if gamma.norm() <= tau {
        return Cone::Zero;
    }
    let alpha = gamma.alpha();
    let rho = gamma.delta().hypot(gamma.epsilon());
    if alpha > 0.0 {
        let m = alpha - rho;
        if m > tau {
            Cone::Positive
        } else if m.abs() <= tau {
            Cone::NonnegBoundary
        } else {
            Cone::Indefinite
        }
    } else if alpha < 0.0 {
        let m = -alpha - rho;
        if m > tau {
            Cone::Negative
        } else if m.abs() <= tau {
            Cone::NonposBoundary
        } else {
            Cone::Indefinite
        }
    } else {
        Cone::Indefinite
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ConjClass {
    Elliptic { theta: f64 },
    Hyperbolic { lambda: f64 },
    ParabolicNonneg,
    ParabolicNonpos,
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassKind {
    Elliptic,
    Hyperbolic,
    ParabolicNonneg,
    ParabolicNonpos,
    Identity,
}

impl ConjClass {
    pub fn kind(&self) -> ClassKind {
        match self {
            ConjClass::Elliptic { .. } => ClassKind::Elliptic,
            ConjClass::Hyperbolic { .. } => ClassKind::Hyperbolic,
            ConjClass::ParabolicNonneg => ClassKind::ParabolicNonneg,
            ConjClass::ParabolicNonpos => ClassKind::ParabolicNonpos,
            ConjClass::Identity => ClassKind::Identity,
        }
    }

    pub fn is_valid(&self) -> bool {
        match *self {
            ConjClass::Elliptic { theta } => theta > 0.0 && theta < PI,
            ConjClass::Hyperbolic { lambda } => lambda > 1.0,
            _ => true,
        }
    }

    pub fn approx_eq(&self, other: &ConjClass, tol: f64) -> bool {
        match (*self, *other) {
            (ConjClass::Elliptic { theta: a }, ConjClass::Elliptic { theta: b }) => {
                (a - b).abs() <= tol
            }
            (ConjClass::Hyperbolic { lambda: a }, ConjClass::Hyperbolic { lambda: b }) => {
                (a - b).abs() <= tol * a.max(1.0)
            }
            (a, b) => a.kind() == b.kind(),
        }
    }

    pub fn name(&self) -> String {
        match *self {
            ConjClass::Elliptic { theta } => format!("Elliptic(theta={theta})"),
            ConjClass::Hyperbolic { lambda } => format!("Hyperbolic(lambda={lambda})"),
            ConjClass::ParabolicNonneg => "ParabolicNonneg".into(),
            ConjClass::ParabolicNonpos => "ParabolicNonpos".into(),
            ConjClass::Identity => "Identity".into(),
        }
    }
}

const SIGN_SCAN: usize = 64;

pub fn classify(g: &GroupElement, tau: f64) -> Result<ConjClass> {
    let tr = g.trace();
    let atr = tr.abs();
    if atr < 2.0 - tau {
        // det(v, gv) has constant sign for elliptic g; e1 gives the (2,1) entry
        let plus = if g.matrix().c > 0.0 { *g } else { g.neg() };
        let theta = (0.5 * plus.trace()).clamp(-1.0, 1.0).acos();
        return Ok(ConjClass::Elliptic { theta });
    }
    if atr > 2.0 + tau {
        let lambda = 0.5 * (atr + (tr * tr - 4.0).sqrt());
        return Ok(ConjClass::Hyperbolic { lambda });
    }
    if g.dist(&GroupElement::IDENTITY) <= tau {
        return Ok(ConjClass::Identity);
    }
    let rep = g.trace_positive();
    let mut extreme = 0.0f64;
    for k in 0..SIGN_SCAN {
        let x = PI * k as f64 / SIGN_SCAN as f64;
        let q = rep.det_form([x.cos(), x.sin()]);
        if q.abs() > extreme.abs() {
            extreme = q;
        }
    }
    if extreme.abs() <= tau {
        return Err(Error::DegenerateClassification);
    }
    Ok(if extreme > 0.0 { ConjClass::ParabolicNonneg } else { ConjClass::ParabolicNonpos })
}

/// T(g) = m21 − m12 of the stored representative.
pub fn t_function(g: &GroupElement) -> f64 {
    let m = g.matrix();
    m.c - m.b
}

pub fn canonical_rep(class: &ConjClass) -> GroupElement {
    match *class {
        ConjClass::Elliptic { theta } => GroupElement::rotation(theta),
        ConjClass::Hyperbolic { lambda } => GroupElement::diag(lambda),
        ConjClass::ParabolicNonneg => GroupElement::from_mat_unchecked(Mat2::new(1.0, 0.0, 1.0, 1.0)),
        ConjClass::ParabolicNonpos => {
            GroupElement::from_mat_unchecked(Mat2::new(1.0, 0.0, -1.0, 1.0))
        }
        ConjClass::Identity => GroupElement::IDENTITY,
    }
}

/// A Lie element with entries uniform in [−scale, scale].
pub fn random_lie<R: Rng>(rng: &mut R, scale: f64) -> LieElement {
    let mut u = || rng.gen_range(-scale..=scale);
    LieElement::new(Mat2::new(u(), u(), u(), 0.0))
}

pub fn random_in_class(class: &ConjClass, seed: u64) -> GroupElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_in_class_with(class, &mut rng)
}

pub fn random_in_class_with<R: Rng>(class: &ConjClass, rng: &mut R) -> GroupElement {
    let h = GroupElement::exp(&random_lie(rng, 1.0));
    canonical_rep(class).conj(&h)
}
