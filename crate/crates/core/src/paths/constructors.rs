use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{is_nonnegative, GroupPath, Schedule};
use crate::cover::LiftedElement;
use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::sl2core::{classify, ConjClass, GroupElement, LieElement, TAU_CLASS};

/// R(rπt)·exp(tγ) for t ∈ [0,1].
pub fn spiral_path(r: u32, gamma: LieElement, n: usize) -> Result<GroupPath> {
    if gamma.norm() > 0.2 {
        return Err(Error::InvalidParameter(format!("|gamma| = {} exceeds 0.2", gamma.norm())));
    }
    let rf = r as f64;
    GroupPath::from_fn(
        n,
        |t| GroupElement::rotation(rf * PI * t) * GroupElement::exp(&gamma.scale(t)),
        format!("spiral r={r}"),
    )
}

/// One classical RK4 step for g' = f(t, g), followed by det renormalization.
fn rk4_step(f: &impl Fn(f64, Mat2) -> Result<Mat2>, t: f64, g: Mat2, dt: f64) -> Result<Mat2> {
    let k1 = f(t, g)?;
    let k2 = f(t + 0.5 * dt, g + k1.scale(0.5 * dt))?;
    let k3 = f(t + 0.5 * dt, g + k2.scale(0.5 * dt))?;
    let k4 = f(t + dt, g + k3.scale(dt))?;
    let next = g + (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(dt / 6.0);
    Ok(next.scale(1.0 / next.det().sqrt()))
}

fn integrate(
    f: impl Fn(f64, Mat2) -> Result<Mat2>,
    g0: Mat2,
    n: usize,
    substeps: usize,
) -> Result<Vec<GroupElement>> {
    let h = 1.0 / n as f64;
    let dt = h / substeps as f64;
    let mut g = g0;
    let mut out = vec![GroupElement::from_mat_unchecked(g)];
    for i in 0..n {
        for k in 0..substeps {
            g = rk4_step(&f, i as f64 * h + k as f64 * dt, g, dt)?;
        }
        out.push(GroupElement::from_mat_unchecked(g));
    }
    Ok(out)
}

fn check_monotone(s: &Schedule, sign: f64, n: usize, what: &str) -> Result<()> {
    for i in 0..=2 * n {
        let t = i as f64 / (2 * n) as f64;
        if sign * s.rate(t) < -1e-12 {
            return Err(Error::InvalidParameter(format!("{what} is not monotone at t={t}")));
        }
    }
    Ok(())
}

/// Nonnegative path through the elliptic classes Elliptic(θ(t)), starting at g₀.
pub fn elliptic_itinerary_path(theta: &Schedule, g0: &GroupElement, n: usize) -> Result<GroupPath> {
    let th0 = theta.value(0.0);
    match classify(g0, TAU_CLASS)? {
        ConjClass::Elliptic { theta } if (theta - th0).abs() <= 1e-6 => {}
        other => {
            return Err(Error::InvalidParameter(format!(
                "start {} is not Elliptic(theta={th0})",
                other.name()
            )))
        }
    }
    check_monotone(theta, 1.0, n, "theta")?;
    // the representative rotating counterclockwise
    let plus = if g0.matrix().c > 0.0 { *g0 } else { g0.neg() };
    let rhs = |t: f64, g: Mat2| -> Result<Mat2> {
        let th = theta.value(t);
        if !(th > 0.0 && th < PI) {
            return Err(Error::InvalidParameter(format!("theta({t}) = {th} outside (0, pi)")));
        }
        let gen = (g - Mat2::IDENTITY.scale(th.cos())).scale(1.0 / th.sin());
        Ok((g * gen).scale(theta.rate(t)))
    };
    let samples = integrate(rhs, plus.matrix(), n, 4)?;
    for (i, g) in samples.iter().enumerate() {
        let want = theta.value(i as f64 / n as f64);
        match classify(g, TAU_CLASS) {
            Ok(ConjClass::Elliptic { theta }) if (theta - want).abs() <= 1e-6 => {}
            other => {
                return Err(Error::ItineraryViolation {
                    index: i,
                    reason: format!("expected Elliptic(theta={want}), got {other:?}"),
                })
            }
        }
    }
    GroupPath::new(samples, "elliptic itinerary")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    Plus,
    Minus,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Plus => 1.0,
            Direction::Minus => -1.0,
        }
    }
}

/// The cone-boundary generator √r·J ± S(g); tr(g·γ) = √r(m12 − m21) ± r.
pub fn hyperbolic_generator(g: &Mat2, dir: Direction) -> Mat2 {
    let p = g.a - g.d;
    let q = g.b + g.c;
    let r = p * p + q * q;
    Mat2::J.scale(r.sqrt()) + Mat2::new(p, q, q, -p).scale(dir.sign())
}

/// Nonnegative path through Hyperbolic(λ(t)), starting at g₀.
///
/// `eta_scale` sets the interior perturbation ηJ with η = eta_scale·√r.
pub fn hyperbolic_itinerary_path(
    lambda: &Schedule,
    dir: Direction,
    g0: &GroupElement,
    n: usize,
    eta_scale: f64,
) -> Result<GroupPath> {
    let l0 = lambda.value(0.0);
    match classify(g0, TAU_CLASS)? {
        ConjClass::Hyperbolic { lambda } if (lambda - l0).abs() <= 1e-6 * l0 => {}
        other => {
            return Err(Error::InvalidParameter(format!(
                "start {} is not Hyperbolic(lambda={l0})",
                other.name()
            )))
        }
    }
    let sigma = g0.trace().signum();
    let rhs = |t: f64, g: Mat2| -> Result<Mat2> {
        let l = lambda.value(t);
        let p = g.a - g.d;
        let q = g.b + g.c;
        let eta = eta_scale * (p * p + q * q).sqrt();
        let gen = hyperbolic_generator(&g, dir) + Mat2::J.scale(eta);
        let dtr = sigma * (1.0 - 1.0 / (l * l)) * lambda.rate(t);
        let s = dtr / (g * gen).trace();
        if s < -1e-12 {
            return Err(Error::ItineraryViolation {
                index: (t * n as f64) as usize,
                reason: "direction does not match the trace motion".into(),
            });
        }
        Ok((g * gen).scale(s.max(0.0)))
    };
    let samples = integrate(rhs, g0.matrix(), n, 4)?;
    for (i, g) in samples.iter().enumerate() {
        let want = lambda.value(i as f64 / n as f64);
        match classify(g, TAU_CLASS) {
            Ok(ConjClass::Hyperbolic { lambda }) if (lambda - want).abs() <= 1e-5 * want => {}
            other => {
                return Err(Error::ItineraryViolation {
                    index: i,
                    reason: format!("expected Hyperbolic(lambda={want}), got {other:?}"),
                })
            }
        }
    }
    GroupPath::new(samples, "hyperbolic itinerary")
}

/// Lift of g obtained along the one-parameter subgroup exp(s·log g).
pub fn one_parameter_lift(g: &GroupElement) -> Result<LiftedElement> {
    let log = g
        .trace_positive()
        .matrix()
        .log_unimodular()
        .ok_or_else(|| Error::InvalidParameter("element has no real logarithm".into()))?;
    let x = LieElement::new(log);
    let n = 64 * (x.norm().ceil() as usize).max(1);
    let path: Vec<_> = (0..=n).map(|i| GroupElement::exp(&x.scale(i as f64 / n as f64))).collect();
    Ok(crate::cover::track_lift(&LiftedElement::IDENTITY, &path))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TripleSign {
    Minus,
    Plus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThreeClasses {
    pub t: f64,
    pub g0: GroupElement,
    pub g1: GroupElement,
    pub g2: GroupElement,
    pub lift0: LiftedElement,
    pub lift1: LiftedElement,
    pub lift2: LiftedElement,
    /// rot(g̃₀) − rot(g̃₁) − rot(g̃₂), rounded.
    pub defect: i64,
}

pub fn three_classes_t(l0: f64, l1: f64, l2: f64) -> f64 {
    (l0 + 1.0 / l0 + l1 * l2 + 1.0 / (l1 * l2)) / (l1 - 1.0 / l1)
}

/// g₁ = diag(λ₁, λ₁⁻¹) and the g₂ of trace λ₂ + λ₂⁻¹ making g₁g₂ ∈ Hyperbolic(λ₀)
/// with negative trace; lifts follow one-parameter subgroups.
pub fn three_classes_triple(l0: f64, l1: f64, l2: f64, sign: TripleSign) -> Result<ThreeClasses> {
    for l in [l0, l1, l2] {
        if !(l > 1.0 + TAU_CLASS) {
            return Err(Error::InvalidParameter(format!("multiplier {l} must exceed 1")));
        }
    }
    let t = three_classes_t(l0, l1, l2);
    let s = match sign {
        TripleSign::Minus => -1.0,
        TripleSign::Plus => 1.0,
    };
    let g1 = GroupElement::diag(l1);
    let g2 = GroupElement::new(Mat2::new(l2 - t, s * (l2 - 1.0 / l2 - t), s * t, 1.0 / l2 + t))?;
    let lift1 = one_parameter_lift(&g1)?;
    let lift2 = one_parameter_lift(&g2)?;
    let lift0 = lift1.compose(&lift2);
    let defect = (lift0.rot() - lift1.rot() - lift2.rot()).round() as i64;
    Ok(ThreeClasses { t, g0: lift0.base, g1, g2, lift0, lift1, lift2, defect })
}

/// The family g₁(w) of rotations by θ₁ about the point w of the disc.
pub fn two_elliptic_g1(theta1: f64, w: Complex64) -> GroupElement {
    let (s, c) = theta1.sin_cos();
    let n = 1.0 - w.norm_sqr();
    let im = 2.0 * w.im / n;
    GroupElement::from_mat_unchecked(Mat2::new(
        c - s * im,
        -s * (Complex64::new(1.0, 0.0) + w).norm_sqr() / n,
        s * (Complex64::new(1.0, 0.0) - w).norm_sqr() / n,
        c + s * im,
    ))
}

pub fn two_elliptic_trace(theta1: f64, theta2: f64, w: Complex64) -> f64 {
    let r2 = w.norm_sqr();
    2.0 * theta1.cos() * theta2.cos() - 2.0 * theta1.sin() * theta2.sin() * (1.0 + r2) / (1.0 - r2)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitPathReport {
    pub max_trace_residual: f64,
    pub min_ps: f64,
    pub end_trace: f64,
    pub k_end_class: Option<ConjClass>,
    pub k_rot: f64,
    pub g1_rot_gain: f64,
    pub segment_a_end_class: Option<ConjClass>,
}

#[derive(Debug, Clone)]
pub struct UnitPath {
    pub g1: GroupPath,
    pub k: GroupPath,
    pub report: UnitPathReport,
}

fn eigvec(m: &Mat2, mu: f64) -> [f64; 2] {
    let v1 = [m.b, mu - m.a];
    let v2 = [mu - m.d, m.c];
    let v = if v1[0].hypot(v1[1]) >= v2[0].hypot(v2[1]) { v1 } else { v2 };
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

/// Explicit path in {tr(g·diag(λ,λ⁻¹)) = λ + λ⁻¹} from 1 to trace −(λₜ + λₜ⁻¹),
/// with the conjugator k(t) solving g₁(t)g₂ = k g₂ k⁻¹.
pub fn unit_path(lambda_target: f64, lambda: f64, n: usize) -> Result<UnitPath> {
    if !(lambda > 1.0 && lambda_target > 1.0) || n < 16 {
        return Err(Error::InvalidParameter("need lambda, lambda_target > 1 and N >= 16".into()));
    }
    let l2 = lambda * lambda;
    let a_end = (l2 + 1.0 + lambda_target + 1.0 / lambda_target) / (l2 - 1.0);
    let na = n / 4;
    let nb = n - na;
    let mut g1 = Vec::with_capacity(n + 1);
    for i in 0..=na {
        let t = i as f64 / na as f64;
        g1.push(Mat2::new(1.0, 0.0, t, 1.0));
    }
    for i in 1..=nb {
        let a = 1.0 + (a_end - 1.0) * i as f64 / nb as f64;
        let d = l2 + 1.0 - a * l2;
        g1.push(Mat2::new(a, a * d - 1.0, 1.0, d));
    }
    let g2 = Mat2::diag(lambda, 1.0 / lambda);
    let mut ks = Vec::with_capacity(n + 1);
    let (mut u_prev, mut v_prev) = ([1.0, 0.0], [0.0, 1.0]);
    for (i, g) in g1.iter().enumerate() {
        let m = *g * g2;
        let mut u = eigvec(&m, lambda);
        let mut v = eigvec(&m, 1.0 / lambda);
        if u[0] * u_prev[0] + u[1] * u_prev[1] < 0.0 {
            u = [-u[0], -u[1]];
        }
        if v[0] * v_prev[0] + v[1] * v_prev[1] < 0.0 {
            v = [-v[0], -v[1]];
        }
        let det = u[0] * v[1] - u[1] * v[0];
        if !(det > 0.0) {
            return Err(Error::ConjugatorBranchLoss { index: i });
        }
        let s = 1.0 / det.sqrt();
        ks.push(GroupElement::from_mat_unchecked(Mat2::new(u[0] * s, v[0] * s, u[1] * s, v[1] * s)));
        u_prev = u;
        v_prev = v;
    }
    let gap = (lambda - 1.0 / lambda).powi(2);
    let mut max_res = 0.0f64;
    let mut min_ps = f64::INFINITY;
    for (g, k) in g1.iter().zip(&ks) {
        let km = k.matrix();
        let ps = km.a * km.d;
        min_ps = min_ps.min(ps);
        max_res = max_res.max((g.trace() - ((1.0 - ps) * gap + 2.0)).abs());
    }
    let g1_path = GroupPath::new(
        g1.iter().map(|m| GroupElement::from_mat_unchecked(*m)).collect(),
        format!("unit path lambda={lambda} target={lambda_target}"),
    )?;
    let k_path = GroupPath::new(ks, "conjugator k(t)")?;
    let k_lift = k_path.lift_from(&LiftedElement::IDENTITY);
    let g1_lift = g1_path.lift_from(&LiftedElement::IDENTITY);
    let report = UnitPathReport {
        max_trace_residual: max_res,
        min_ps,
        end_trace: g1_path.end().trace(),
        k_end_class: classify(&k_path.end(), TAU_CLASS).ok(),
        k_rot: k_lift.rot(),
        g1_rot_gain: g1_lift.rot(),
        segment_a_end_class: classify(&g1_path.samples()[na], TAU_CLASS).ok(),
    };
    Ok(UnitPath { g1: g1_path, k: k_path, report })
}

/// A nonnegative path from 1 to Hyperbolic(λₜ) with negative trace, passing
/// Identity → ParabolicNonneg → Elliptic → Hyperbolic like the unit path.
pub fn unit_path_nonnegative(lambda_target: f64, n: usize) -> Result<GroupPath> {
    if !(lambda_target > 1.0) || n < 64 {
        return Err(Error::InvalidParameter("need lambda_target > 1 and N >= 64".into()));
    }
    let target_tr = lambda_target + 1.0 / lambda_target;
    let switch_tr = target_tr.min(2.05);
    let sqrt5 = 5.0f64.sqrt();
    let phase = 1.0f64.atan2(2.0);
    // tr(P·exp(τJ)) = 2cos τ − sin τ = √5 cos(τ + phase)
    let tau_end = (-switch_tr / sqrt5).acos() - phase;
    let na = n / 8;
    let nb = n / 2;
    let nc = n - na - nb;
    let nil = Mat2::new(0.0, 0.0, 1.0, 0.0);
    let p = GroupElement::from_mat_unchecked(Mat2::new(1.0, 0.0, 1.0, 1.0));
    let seg_a = GroupPath::from_fn(na, |t| GroupElement::from_mat_unchecked(nil.scale(t).exp_traceless()), "exp(tN)")?;
    let seg_b = GroupPath::from_fn(nb, |t| p * GroupElement::rotation(t * tau_end), "P exp(tau J)")?;
    let mut pieces = vec![seg_a, seg_b];
    if target_tr > switch_tr {
        let lb = 0.5 * (switch_tr + (switch_tr * switch_tr - 4.0).sqrt());
        let start = pieces[1].end();
        pieces.push(hyperbolic_itinerary_path(
            &Schedule::linear(lb, lambda_target),
            Direction::Minus,
            &start,
            nc,
            1e-3,
        )?);
    }
    GroupPath::concat(&pieces, format!("nonnegative unit path target={lambda_target}"))
}

/// Checks a nonnegative realization against the unit-path itinerary.
pub fn unit_path_nonnegative_ok(p: &GroupPath, lambda_target: f64) -> Result<bool> {
    let rep = is_nonnegative(p, 1e-8)?;
    let end_ok = matches!(rep.endpoint_class,
        Some(ConjClass::Hyperbolic { lambda }) if (lambda - lambda_target).abs() < 1e-5 * lambda_target);
    Ok(rep.nonnegative && end_ok && rep.rot_gain == 1.0 && p.end().trace() < 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::rot_along;
    use crate::sl2core::{random_in_class, ClassKind};

    #[test]
    fn spiral_examples() {
        let p = spiral_path(1, LieElement::ZERO, 100).unwrap();
        assert_eq!(rot_along(&p, 0.0).unwrap().1, 1.0);
        let p = spiral_path(1, LieElement::new(Mat2::diag(0.1, -0.1)), 200).unwrap();
        let rep = is_nonnegative(&p, 1e-9).unwrap();
        assert!(rep.positive);
        assert_eq!(rep.rot_gain, 1.0);
        let expect = GroupElement::exp(&LieElement::new(Mat2::diag(0.1, -0.1)));
        assert!(p.end().approx_eq(&expect, 1e-12));
        let p = spiral_path(3, LieElement::ZERO, 300).unwrap();
        assert_eq!(rot_along(&p, 0.0).unwrap().1, 3.0);
        let p = spiral_path(2, LieElement::ZERO, 300).unwrap();
        assert_eq!(rot_along(&p, 1.0).unwrap().1, 2.0);
        assert!(spiral_path(1, LieElement::J, 10).is_err());
    }

    #[test]
    fn elliptic_itinerary_tracks_theta() {
        let h = GroupElement::exp(&LieElement::new(Mat2::new(0.4, 0.7, -0.2, -0.4)));
        let g0 = GroupElement::rotation(0.4).conj(&h);
        let sched = Schedule::linear(0.4, 1.2);
        let p = elliptic_itinerary_path(&sched, &g0, 1000).unwrap();
        // exact solution h·R(θ(t))·h⁻¹
        for (i, g) in p.samples().iter().enumerate() {
            let t = i as f64 / 1000.0;
            let exact = GroupElement::rotation(sched.value(t)).conj(&h);
            assert!(g.approx_eq(&exact, 1e-9), "node {i}");
            let tr = 2.0 * sched.value(t).cos();
            assert!((g.trace().abs() - tr.abs()).abs() < 1e-6);
        }
        let rep = is_nonnegative(&p, 1e-8).unwrap();
        assert!(rep.positive);
    }

    #[test]
    fn elliptic_itinerary_constant_theta_is_stationary() {
        let g0 = GroupElement::rotation(0.9);
        let p = elliptic_itinerary_path(&Schedule::constant(0.9), &g0, 50).unwrap();
        assert!(p.end().approx_eq(&g0, 1e-14));
        let rep = is_nonnegative(&p, 1e-9).unwrap();
        assert!(rep.nonnegative && !rep.positive);
    }

    #[test]
    fn elliptic_itinerary_rejects_decreasing_theta() {
        let g0 = GroupElement::rotation(0.9);
        assert!(elliptic_itinerary_path(&Schedule::linear(0.9, 0.5), &g0, 50).is_err());
    }

    #[test]
    fn hyperbolic_generator_trace_bound() {
        for seed in 0..200 {
            let g = random_in_class(&ConjClass::Hyperbolic { lambda: 1.2 + 0.02 * seed as f64 }, seed);
            let g = if seed % 2 == 0 { g } else { g.neg() };
            let m = g.matrix();
            let gap = m.trace().powi(2) - 4.0;
            for dir in [Direction::Plus, Direction::Minus] {
                let tr = (m * hyperbolic_generator(&m, dir)).trace();
                assert_eq!(tr.signum(), dir.sign());
                assert!(tr.abs() >= 0.5 * gap - 1e-12);
                let gen = LieElement::new(hyperbolic_generator(&m, dir));
                assert!(gen.cone_margin().abs() < 1e-9 * (1.0 + gen.norm()));
            }
        }
    }

    #[test]
    fn hyperbolic_itinerary_endpoint() {
        let g0 = random_in_class(&ConjClass::Hyperbolic { lambda: 1.5 }, 3);
        let dir = if g0.trace() > 0.0 { Direction::Plus } else { Direction::Minus };
        let p = hyperbolic_itinerary_path(&Schedule::linear(1.5, 3.0), dir, &g0, 1000, 1e-3).unwrap();
        let end = classify(&p.end(), TAU_CLASS).unwrap();
        assert!(end.approx_eq(&ConjClass::Hyperbolic { lambda: 3.0 }, 1e-5));
        assert!(is_nonnegative(&p, 1e-8).unwrap().nonnegative);
        let flipped = match dir {
            Direction::Plus => Direction::Minus,
            Direction::Minus => Direction::Plus,
        };
        assert!(matches!(
            hyperbolic_itinerary_path(&Schedule::linear(1.5, 3.0), flipped, &g0, 100, 1e-3),
            Err(Error::ItineraryViolation { .. })
        ));
        let c = hyperbolic_itinerary_path(&Schedule::constant(1.5), flipped, &g0, 100, 1e-3).unwrap();
        assert!((c.end().trace().abs() - g0.trace().abs()).abs() < 1e-6);
    }

    #[test]
    fn three_classes_example() {
        let tc = three_classes_triple(2.0, 2.0, 2.0, TripleSign::Minus).unwrap();
        assert_eq!(tc.t, 4.5);
        assert!((tc.g0.trace() + 2.5).abs() < 1e-9);
        let c = classify(&(tc.g1 * tc.g2), TAU_CLASS).unwrap();
        assert!(c.approx_eq(&ConjClass::Hyperbolic { lambda: 2.0 }, 1e-9));
        assert_eq!(tc.lift1.rot(), 0.0);
        assert_eq!(tc.lift2.rot(), 0.0);
        assert_eq!(tc.defect, -1);
        let plus = three_classes_triple(2.0, 2.0, 2.0, TripleSign::Plus).unwrap();
        assert_eq!(plus.defect, 1);
        let near = three_classes_triple(2.0, 1.001, 1.001, TripleSign::Minus).unwrap();
        assert_eq!(near.defect, -1);
        assert!((near.g1.matrix() - Mat2::IDENTITY).norm() < 2e-3);
    }

    #[test]
    fn two_elliptic_formula_matches_product() {
        let g2 = GroupElement::rotation(1.3);
        for (k, w) in [Complex64::new(0.3, -0.2), Complex64::new(-0.7, 0.1), Complex64::new(0.0, 0.9)]
            .into_iter()
            .enumerate()
        {
            let th1 = 0.5 + 0.7 * k as f64;
            let g1 = two_elliptic_g1(th1, w);
            assert!((g1.matrix().det() - 1.0).abs() < 1e-12);
            let e = classify(&g1, TAU_CLASS).unwrap();
            assert!(e.approx_eq(&ConjClass::Elliptic { theta: th1 }, 1e-9));
            let direct = (g1 * g2).trace();
            assert!((direct - two_elliptic_trace(th1, 1.3, w)).abs() < 1e-10);
        }
        let h = std::f64::consts::FRAC_PI_2;
        assert!(two_elliptic_trace(h, h, Complex64::new(1.0 - 1e-7, 0.0)) < -1e6);
        let t = 2.0 * PI / 3.0;
        assert!((two_elliptic_trace(t, t, Complex64::new(0.0, 0.0)) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn unit_path_example() {
        let up = unit_path(2.0, 2.0, 2000).unwrap();
        let r = &up.report;
        assert!((r.end_trace + 2.5).abs() < 1e-9);
        assert!(r.max_trace_residual < 1e-6);
        assert!(r.min_ps > 0.0);
        assert_eq!(r.k_end_class.unwrap().kind(), ClassKind::Hyperbolic);
        assert_eq!(r.k_rot, 0.0);
        assert_eq!(r.g1_rot_gain, 1.0);
        assert_eq!(r.segment_a_end_class, Some(ConjClass::ParabolicNonneg));
        assert!(up.g1.samples()[500].approx_eq(
            &GroupElement::new(Mat2::new(1.0, 0.0, 1.0, 1.0)).unwrap(),
            1e-12
        ));
        // k(t) really conjugates g₂ to g₁(t)g₂
        let g2 = GroupElement::diag(2.0);
        for i in [0, 700, 2000] {
            let lhs = up.g1.samples()[i] * g2;
            assert!(lhs.approx_eq(&g2.conj(&up.k.samples()[i]), 1e-8));
        }
    }

    #[test]
    fn unit_path_nonnegative_realization() {
        let p = unit_path_nonnegative(2.0, 2000).unwrap();
        assert!(unit_path_nonnegative_ok(&p, 2.0).unwrap());
        let kinds = is_nonnegative(&p, 1e-8).unwrap().kinds();
        assert_eq!(kinds.first(), Some(&ClassKind::Identity));
        assert!(kinds.contains(&ClassKind::ParabolicNonneg));
        assert!(kinds.contains(&ClassKind::Elliptic));
        assert_eq!(kinds.last(), Some(&ClassKind::Hyperbolic));
    }
}
