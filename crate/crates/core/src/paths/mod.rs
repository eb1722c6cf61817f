//! Uniformly sampled paths in PSL(2,R).

mod constructors;
mod schedule;

pub use constructors::*;
pub use schedule::Schedule;

use serde::Serialize;

use crate::cover::{act_angle, nearest_rep, track_lift, LiftedElement};
use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::sl2core::{classify, ClassKind, ConjClass, GroupElement, LieElement, TAU_CLASS};

pub const MAX_STEP: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct GroupPath {
    samples: Vec<GroupElement>,
    description: String,
}

impl GroupPath {
    /// Aligns consecutive signs and rejects steps longer than [`MAX_STEP`].
    pub fn new(samples: Vec<GroupElement>, description: impl Into<String>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidParameter("a path needs at least two samples".into()));
        }
        let mut aligned = Vec::with_capacity(samples.len());
        aligned.push(samples[0]);
        for (i, g) in samples.iter().enumerate().skip(1) {
            let g = g.aligned_to(&aligned[i - 1]);
            if (g.matrix() - aligned[i - 1].matrix()).norm() > MAX_STEP {
                return Err(Error::UnderSampled { index: i - 1 });
            }
            aligned.push(g);
        }
        Ok(GroupPath { samples: aligned, description: description.into() })
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> GroupElement, description: impl Into<String>) -> Result<Self> {
        Self::new((0..=n).map(|i| f(i as f64 / n as f64)).collect(), description)
    }

    pub fn samples(&self) -> &[GroupElement] {
        &self.samples
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Number of intervals.
    pub fn n(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n() as f64
    }

    pub fn start(&self) -> GroupElement {
        self.samples[0]
    }

    pub fn end(&self) -> GroupElement {
        *self.samples.last().unwrap()
    }

    /// log(g_{i+1} g_i⁻¹)/h.
    pub fn derivative_cocycle(&self, i: usize) -> Result<LieElement> {
        let inc = self.samples[i + 1].matrix() * self.samples[i].matrix().adj();
        let size = (inc - Mat2::IDENTITY).norm();
        if size >= 1.0 {
            return Err(Error::StepTooLarge { index: i, size });
        }
        let log = inc.log_unimodular().ok_or(Error::StepTooLarge { index: i, size })?;
        Ok(LieElement::new(log.scale(1.0 / self.h())))
    }

    pub fn cocycles(&self) -> Result<Vec<LieElement>> {
        (0..self.n()).map(|i| self.derivative_cocycle(i)).collect()
    }

    /// t ↦ g(t)⁻¹.
    pub fn inverted(&self) -> GroupPath {
        GroupPath {
            samples: self.samples.iter().map(GroupElement::inverse).collect(),
            description: format!("inverse of {}", self.description),
        }
    }

    /// t ↦ g(1 − t).
    pub fn reversed(&self) -> GroupPath {
        GroupPath {
            samples: self.samples.iter().rev().copied().collect(),
            description: format!("reversal of {}", self.description),
        }
    }

    /// Pointwise product; both paths must have the same node count.
    pub fn product(&self, other: &GroupPath) -> Result<GroupPath> {
        if self.n() != other.n() {
            return Err(Error::InvalidParameter("paths have different node counts".into()));
        }
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| *a * *b).collect();
        GroupPath::new(samples, format!("({}) * ({})", self.description, other.description))
    }

    /// Joins paths end to start; later pieces are left-aligned in sign.
    pub fn concat(pieces: &[GroupPath], description: impl Into<String>) -> Result<GroupPath> {
        let mut samples: Vec<GroupElement> = Vec::new();
        for p in pieces {
            let skip = usize::from(!samples.is_empty());
            samples.extend_from_slice(&p.samples[skip..]);
        }
        GroupPath::new(samples, description)
    }

    pub fn start_lift(&self) -> LiftedElement {
        let g = self.start();
        LiftedElement { base: g, anchor: act_angle(&g, 0.0) }
    }

    /// Lift tracked along the path from `start`, which must lift g(0).
    pub fn lift_from(&self, start: &LiftedElement) -> LiftedElement {
        track_lift(start, &self.samples)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathReport {
    pub min_cone_margin: f64,
    pub min_nonpositive_margin: f64,
    pub nonnegative: bool,
    pub positive: bool,
    pub nonpositive: bool,
    pub rot_gain: f64,
    pub endpoint_class: Option<ConjClass>,
    pub class_itinerary: Vec<Option<ConjClass>>,
}

impl PathReport {
    /// Class kinds along the path with consecutive repeats removed.
    pub fn kinds(&self) -> Vec<ClassKind> {
        let mut out: Vec<ClassKind> = Vec::new();
        for k in self.class_itinerary.iter().flatten().map(ConjClass::kind) {
            if out.last() != Some(&k) {
                out.push(k);
            }
        }
        out
    }
}

pub fn is_nonnegative(p: &GroupPath, margin: f64) -> Result<PathReport> {
    let cocycles = p.cocycles()?;
    let min_cone_margin = cocycles.iter().map(LieElement::cone_margin).fold(f64::INFINITY, f64::min);
    let min_nonpositive_margin =
        cocycles.iter().map(LieElement::nonpositive_margin).fold(f64::INFINITY, f64::min);
    let (_, rot_gain) = rot_along(p, 0.0)?;
    let class_itinerary: Vec<_> = p.samples().iter().map(|g| classify(g, TAU_CLASS).ok()).collect();
    Ok(PathReport {
        min_cone_margin,
        min_nonpositive_margin,
        nonnegative: min_cone_margin >= -margin,
        positive: min_cone_margin > margin,
        nonpositive: min_nonpositive_margin >= -margin,
        rot_gain,
        endpoint_class: *class_itinerary.last().unwrap(),
        class_itinerary,
    })
}

/// Tracks the lifted image of x₀ along the path; returns the endpoint lift
/// and the rotation gained.
pub fn rot_along(p: &GroupPath, x0: f64) -> Result<(LiftedElement, f64)> {
    let start = p.start_lift();
    let mut x = start.eval(x0);
    for (i, w) in p.samples().windows(2).enumerate() {
        let inc = w[1].matrix() * w[0].matrix().adj();
        let size = (inc - Mat2::IDENTITY).norm();
        if size >= 1.0 {
            return Err(Error::StepTooLarge { index: i, size });
        }
        x = nearest_rep(act_angle(&w[1], x0), x);
    }
    let g1 = p.end();
    let trial = LiftedElement { base: g1, anchor: act_angle(&g1, 0.0) };
    let shift = ((x - trial.eval(x0)) / std::f64::consts::PI).round() as i64;
    let end = trial.deck(shift);
    Ok((end, end.rot() - start.rot()))
}
