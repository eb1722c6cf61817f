use serde::Serialize;

use super::cylinder::{CylinderConnection, BOUNDARY_CONVENTION};
use crate::cover::LiftedElement;
use crate::error::{Error, Result};
use crate::paths::GroupPath;
use crate::sl2core::{classify, ClassKind, TAU_CLASS};

pub const PANTS_CONVENTION: &str =
    "outer boundary with its boundary orientation, inner boundaries traversed against theirs";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MilnorWoodReport {
    pub quantity: String,
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
    pub convention: String,
    pub flat: bool,
    pub hypothesis_ok: bool,
    pub passed: bool,
}

fn is_hyperbolic(l: &LiftedElement) -> bool {
    matches!(classify(&l.base, TAU_CLASS).map(|c| c.kind()), Ok(ClassKind::Hyperbolic))
}

/// rot_∂ ≤ −χ = 0 on a nonnegatively curved cylinder; |rot_∂| ≤ 0 when flat.
pub fn milnor_wood_cylinder(conn: &CylinderConnection, tol: f64) -> Result<MilnorWoodReport> {
    let rb = conn.rot_boundary()?;
    let hyperbolic = is_hyperbolic(&conn.lifted_holonomy(0)) && is_hyperbolic(&conn.lifted_holonomy(conn.ns()));
    let flat = conn.max_curvature_norm() <= tol;
    let nonneg = conn.is_nonneg_curved(tol);
    let bound = 0.0;
    let margin = if flat { bound - rb.value.abs() } else { bound - rb.value };
    let hypothesis_ok = hyperbolic && (flat || nonneg);
    Ok(MilnorWoodReport {
        quantity: "rot_boundary(cylinder)".into(),
        value: rb.value,
        bound,
        margin,
        convention: BOUNDARY_CONVENTION.into(),
        flat,
        hypothesis_ok,
        passed: !hypothesis_ok || margin >= -1e-6,
    })
}

/// Lifted boundary holonomies of a sphere with m + 1 holes: g̃₀ is reached
/// from g̃₁⋯g̃_m along an optional correction path.
#[derive(Debug, Clone, PartialEq)]
pub struct PantsHolonomyData {
    pub outer: LiftedElement,
    pub inner: Vec<LiftedElement>,
}

impl PantsHolonomyData {
    pub fn from_product(inner: Vec<LiftedElement>) -> Self {
        let outer = inner.iter().fold(LiftedElement::IDENTITY, |acc, g| acc.compose(g));
        PantsHolonomyData { outer, inner }
    }

    /// `correction` must start at the product of the inner bases.
    pub fn with_correction(inner: Vec<LiftedElement>, correction: &GroupPath) -> Result<Self> {
        let prod = Self::from_product(inner);
        if !prod.outer.base.approx_eq(&correction.start(), 1e-9) {
            return Err(Error::InvalidParameter("correction path does not start at the product".into()));
        }
        let start = LiftedElement { base: correction.start(), anchor: prod.outer.anchor };
        let outer = correction.lift_from(&start);
        Ok(PantsHolonomyData { outer, inner: prod.inner })
    }

    pub fn euler_characteristic(&self) -> i64 {
        1 - self.inner.len() as i64
    }

    pub fn rot_sum(&self) -> f64 {
        self.outer.rot() - self.inner.iter().map(LiftedElement::rot).sum::<f64>()
    }
}

pub fn milnor_wood_pants(data: &PantsHolonomyData, flat: bool) -> MilnorWoodReport {
    let value = data.rot_sum();
    let bound = -data.euler_characteristic() as f64;
    let margin = if flat { bound - value.abs() } else { bound - value };
    let hypothesis_ok = is_hyperbolic(&data.outer) && data.inner.iter().all(is_hyperbolic);
    MilnorWoodReport {
        quantity: "rot_boundary(pants)".into(),
        value,
        bound,
        margin,
        convention: PANTS_CONVENTION.into(),
        flat,
        hypothesis_ok,
        passed: !hypothesis_ok || margin >= -1e-6,
    }
}
