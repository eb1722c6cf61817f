//! Interpolation and ordered exponentials for node-sampled 1-forms.

use crate::cover::{track_lift, LiftedElement};
use crate::mat2::Mat2;
use crate::sl2core::GroupElement;

const ORDER: usize = 6;

/// Lagrange weights for nodes at `offsets`, evaluated at `x`.
fn lagrange(offsets: [f64; ORDER], x: f64) -> [f64; ORDER] {
    let mut w = [1.0; ORDER];
    for i in 0..ORDER {
        for j in 0..ORDER {
            if i != j {
                w[i] *= (x - offsets[j]) / (offsets[i] - offsets[j]);
            }
        }
    }
    w
}

/// Minimum node count for [`interp`].
pub(crate) const MIN_NODES: usize = ORDER;

/// Degree-5 Lagrange interpolation of node values; `x` is in node units.
pub(crate) fn interp(vals: &[Mat2], periodic: bool, x: f64) -> Mat2 {
    let n = vals.len();
    if periodic {
        let j = x.floor();
        let u = x - j;
        let j = j as i64;
        let w = lagrange([-2.0, -1.0, 0.0, 1.0, 2.0, 3.0], u);
        (0..ORDER).fold(Mat2::ZERO, |acc, k| {
            acc + vals[(j - 2 + k as i64).rem_euclid(n as i64) as usize].scale(w[k])
        })
    } else {
        let (s0, w) = aperiodic_stencil(n, x);
        (0..ORDER).fold(Mat2::ZERO, |acc, k| acc + vals[s0 + k].scale(w[k]))
    }
}

/// First node and weights of the interpolation stencil for `x` among `n` nodes.
pub(crate) fn aperiodic_stencil(n: usize, x: f64) -> (usize, [f64; ORDER]) {
    let x = x.clamp(0.0, (n - 1) as f64);
    let j = (x.floor() as usize).min(n - 2);
    let s0 = j.saturating_sub(ORDER / 2 - 1).min(n - ORDER);
    let mut offs = [0.0; ORDER];
    for (k, o) in offs.iter_mut().enumerate() {
        *o = (s0 + k) as f64;
    }
    (s0, lagrange(offs, x))
}

const SQRT15: f64 = 3.872_983_346_207_417;

/// Sixth-order Magnus step for Y' = A(τ)Y over [τ, τ + h].
pub(crate) fn magnus_step(a: &impl Fn(f64) -> Mat2, tau: f64, h: f64) -> Mat2 {
    let c = SQRT15 / 10.0;
    let a1 = a(tau + (0.5 - c) * h);
    let a2 = a(tau + 0.5 * h);
    let a3 = a(tau + (0.5 + c) * h);
    let b1 = a2.scale(h);
    let b2 = (a3 - a1).scale(SQRT15 * h / 3.0);
    let b3 = (a3 - a2.scale(2.0) + a1).scale(10.0 * h / 3.0);
    let c1 = b1.commutator(&b2);
    let c2 = b1.commutator(&(b3.scale(2.0) + c1)).scale(-1.0 / 60.0);
    let omega = b1 + b3.scale(1.0 / 12.0)
        + (b1.scale(-20.0) - b3 + c1).commutator(&(b2 + c2)).scale(1.0 / 240.0);
    omega.exp_traceless()
}

/// Solves Y' = A(τ)Y, Y(τ₀) = 1 on [τ₀, τ₁] with `steps` Magnus steps;
/// returns Y at every step end, starting with the identity.
pub(crate) fn ordered_exp(a: impl Fn(f64) -> Mat2, tau0: f64, tau1: f64, steps: usize) -> Vec<GroupElement> {
    let h = (tau1 - tau0) / steps as f64;
    let mut y = Mat2::IDENTITY;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(GroupElement::IDENTITY);
    for k in 0..steps {
        y = magnus_step(&a, tau0 + k as f64 * h, h) * y;
        y = y.scale(1.0 / y.det().sqrt());
        out.push(GroupElement::from_mat_unchecked(y));
    }
    out
}

/// Substeps per node interval keeping each step's generator small.
pub(crate) fn substeps(vals: &[Mat2], h: f64) -> usize {
    let max = vals.iter().map(Mat2::norm).fold(0.0, f64::max);
    ((max * h / 0.25).ceil() as usize).max(1)
}

/// Node transports Π(t_j) for j = 0..=intervals over [0,1] and the lift of
/// the final transport tracked from the identity.
pub(crate) fn line_transport(vals: &[Mat2], periodic: bool) -> (Vec<GroupElement>, LiftedElement) {
    let intervals = if periodic { vals.len() } else { vals.len() - 1 };
    let h = 1.0 / intervals as f64;
    let sub = substeps(vals, h);
    let fine = ordered_exp(|t| interp(vals, periodic, t * intervals as f64), 0.0, 1.0, intervals * sub);
    let nodes = fine.iter().step_by(sub).copied().collect();
    let lift = track_lift(&LiftedElement::IDENTITY, &fine);
    (nodes, lift)
}

/// Π(t) for t ∈ [0,1].
pub(crate) fn line_transport_to(vals: &[Mat2], periodic: bool, t: f64) -> GroupElement {
    let intervals = if periodic { vals.len() } else { vals.len() - 1 };
    let h = 1.0 / intervals as f64;
    let steps = ((t / h).ceil() as usize).max(1) * substeps(vals, h);
    *ordered_exp(|x| interp(vals, periodic, x * intervals as f64), 0.0, t, steps).last().unwrap()
}

/// Smooth monotone step from 0 on (−∞, lo] to 1 on [hi, ∞), built from exp(−1/x).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothStep {
    pub lo: f64,
    pub hi: f64,
}

fn psi(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

fn dpsi(x: f64) -> f64 {
    if x > 0.0 {
        psi(x) / (x * x)
    } else {
        0.0
    }
}

impl SmoothStep {
    pub fn new(lo: f64, hi: f64) -> Self {
        SmoothStep { lo, hi }
    }

    pub fn step(&self, x: f64) -> f64 {
        let u = (x - self.lo) / (self.hi - self.lo);
        if u <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return 1.0;
        }
        psi(u) / (psi(u) + psi(1.0 - u))
    }

    /// Derivative of [`SmoothStep::step`]; a bump with unit integral.
    pub fn bump(&self, x: f64) -> f64 {
        let u = (x - self.lo) / (self.hi - self.lo);
        if u <= 0.0 || u >= 1.0 {
            return 0.0;
        }
        let (f, g) = (psi(u), psi(1.0 - u));
        (dpsi(u) * g + f * dpsi(1.0 - u)) / ((f + g) * (f + g)) / (self.hi - self.lo)
    }
}
