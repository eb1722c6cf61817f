use std::f64::consts::PI;

use super::*;
use crate::cover::LiftedElement;
use crate::mat2::Mat2;
use crate::paths::{three_classes_triple, GroupPath, TripleSign};
use crate::sl2core::{classify, random_in_class, ConjClass, GroupElement, LieElement, TAU_CLASS};

fn hyperbolic_loop(r: i64, m: usize) -> LoopConnection {
    LoopConnection::spiral(r, LieElement::new(Mat2::diag(0.3, -0.3)), m).unwrap()
}

fn nonpositive_path(g0: GroupElement, gamma: LieElement, n: usize) -> GroupPath {
    GroupPath::from_fn(n, |s| GroupElement::exp(&gamma.scale(-s)) * g0, "exp(-s gamma) g0").unwrap()
}

#[test]
fn flat_pullback() {
    let a = hyperbolic_loop(1, 32);
    let c = CylinderConnection::pullback_flat(&a, 16).unwrap();
    assert_eq!(c.max_curvature_norm(), 0.0);
    let rb = c.rot_boundary().unwrap();
    assert_eq!(rb.value, 0.0);
    assert_eq!(rb.rot_inner, 1.0);
    assert!(c.holonomy_loop(0).approx_eq(&c.holonomy_loop(16), 1e-14));
    let mw = milnor_wood_cylinder(&c, 1e-9).unwrap();
    assert!(mw.flat && mw.hypothesis_ok && mw.passed && mw.value == 0.0);
}

#[test]
fn linear_gauge_curvature() {
    let a = hyperbolic_loop(0, 32);
    let gamma = LieElement::from_coords(1.0, 0.2, 0.3);
    let c = CylinderConnection::linear(&a, gamma, 16).unwrap();
    for (i, j) in [(0, 0), (8, 5), (16, 31)] {
        assert!((c.curvature(i, j) - gamma).norm() < 1e-12);
    }
    assert!(c.is_nonneg_curved(1e-12));
}

#[test]
fn constant_connection_transport() {
    let gamma = LieElement::new(Mat2::new(0.2, -0.9, 0.4, -0.2));
    let a = LoopConnection::constant(gamma, 32).unwrap();
    let c = CylinderConnection::pullback_flat(&a, 8).unwrap();
    for t in [0.0, 0.3, 0.77, 1.0] {
        assert!(c.transport_t(3, t).approx_eq(&GroupElement::exp(&gamma.scale(t)), 1e-12));
    }
}

#[test]
fn constructor_reproduces_path() {
    let g0 = random_in_class(&ConjClass::Hyperbolic { lambda: 2.0 }, 11);
    let a0 = LoopConnection::with_holonomy(&g0, 1, 128).unwrap();
    let gamma = LieElement::from_coords(0.3, 0.1, -0.05);
    let path = nonpositive_path(g0, gamma, 128);
    let c = CylinderConnection::from_nonpositive_path(&path, &a0).unwrap();
    for j in 0..128 {
        assert_eq!(c.at(0, j), a0.samples()[j]);
    }
    assert!(c.min_curvature_margin() >= -1e-8);
    for i in (0..=128).step_by(16) {
        let err = c.holonomy_loop(i).dist(&path.samples()[i]);
        assert!(err < 1e-5, "row {i}: {err}");
    }
    // doubled resolution agrees
    let a1 = LoopConnection::with_holonomy(&g0, 1, 256).unwrap();
    let c1 = CylinderConnection::from_nonpositive_path(&nonpositive_path(g0, gamma, 256), &a1).unwrap();
    for i in (0..=128).step_by(32) {
        assert!(c.holonomy_loop(i).dist(&c1.holonomy_loop(2 * i)) < 1e-7);
    }
}

#[test]
fn constant_path_gives_flat_cylinder() {
    let g0 = GroupElement::diag(2.0);
    let a0 = LoopConnection::with_holonomy(&g0, 0, 32).unwrap();
    let path = GroupPath::from_fn(16, |_| g0, "constant").unwrap();
    let c = CylinderConnection::from_nonpositive_path(&path, &a0).unwrap();
    assert!(c.max_curvature_norm() < 1e-12);
    assert!(c.holonomy_loop(16).approx_eq(&c.holonomy_loop(0), 1e-12));
}

#[test]
fn constructor_rejects_bad_inputs() {
    let g0 = GroupElement::diag(2.0);
    let a0 = LoopConnection::with_holonomy(&g0, 0, 32).unwrap();
    let pos = GroupPath::from_fn(16, |s| GroupElement::exp(&LieElement::J.scale(0.3 * s)) * g0, "pos").unwrap();
    assert!(matches!(
        CylinderConnection::from_nonpositive_path(&pos, &a0),
        Err(crate::error::Error::NotNonpositive { .. })
    ));
    let other = LoopConnection::with_holonomy(&GroupElement::diag(3.0), 0, 32).unwrap();
    let path = nonpositive_path(g0, LieElement::J.scale(0.2), 16);
    assert!(matches!(
        CylinderConnection::from_nonpositive_path(&path, &other),
        Err(crate::error::Error::HolonomyMismatch(_))
    ));
}

#[test]
fn square_variant_reproduces_path() {
    let x = LieElement::new(Mat2::new(0.2, 0.5, 0.1, -0.2));
    let g0 = GroupElement::exp(&x);
    let a0: Vec<LieElement> = vec![x; 65];
    let path = nonpositive_path(g0, LieElement::from_coords(0.4, -0.1, 0.2), 64);
    let c = CylinderConnection::from_nonpositive_path_square(&path, &a0).unwrap();
    assert!(!c.periodic());
    assert!(c.min_curvature_margin() >= -1e-8);
    for i in (0..=64).step_by(8) {
        assert!(c.holonomy_loop(i).dist(&path.samples()[i]) < 1e-6, "row {i}");
    }
}

#[test]
fn constant_gauge_conjugates() {
    let g0 = random_in_class(&ConjClass::Hyperbolic { lambda: 1.7 }, 2);
    let a0 = LoopConnection::with_holonomy(&g0, -1, 64).unwrap();
    let c = CylinderConnection::from_nonpositive_path(&nonpositive_path(g0, LieElement::J.scale(0.2), 32), &a0)
        .unwrap();
    let h = GroupElement::exp(&LieElement::new(Mat2::new(0.3, -0.4, 0.8, -0.3)));
    let phi = GaugeField::from_fn(32, 64, true, |_, _| h);
    let d = c.gauge(&phi).unwrap();
    for i in [0, 16, 32] {
        assert!(d.holonomy_loop(i).approx_eq(&c.holonomy_loop(i).conj(&h), 1e-9));
        for j in [0, 40] {
            assert!((d.at(i, j) - c.at(i, j).conj(&h)).norm() < 1e-12);
        }
    }
    assert!((d.min_curvature_margin() - c.min_curvature_margin()).abs() < 1e-7);
    assert_eq!(d.rot_boundary().unwrap().value, c.rot_boundary().unwrap().value);
    assert_eq!(d.rot_c_integer().unwrap(), c.rot_c_integer().unwrap());
}

#[test]
fn winding_gauge_shifts_rot_c() {
    let a = hyperbolic_loop(1, 64);
    let c = CylinderConnection::pullback_flat(&a, 128).unwrap();
    let beta = SmoothStep::new(0.2, 0.8);
    let x = LieElement::new(Mat2::new(0.3, 0.2, -0.5, -0.3));
    for n in -3i64..=3 {
        let phi = GaugeField::from_fn(128, 64, true, |s, t| {
            let bump = beta.step(s) * (1.0 - beta.step(s)) * (2.0 * PI * t).sin();
            GroupElement::rotation(n as f64 * PI * beta.step(s)) * GroupElement::exp(&x.scale(bump))
        });
        let d = c.gauge(&phi).unwrap();
        assert_eq!(d.rot_c_integer().unwrap(), c.rot_c_integer().unwrap() + n);
        assert_eq!(d.rot_boundary().unwrap().value, 0.0);
    }
    let coarse = GaugeField::from_fn(128, 64, true, |s, _| GroupElement::rotation(40.0 * PI * beta.step(s)));
    assert!(matches!(c.gauge(&coarse), Err(crate::error::Error::UnderSampled { .. })));
}

#[test]
fn twist_shifts_rot_c_by_boundary_rotation() {
    let flat0 = CylinderConnection::pullback_flat(&hyperbolic_loop(0, 64), 32).unwrap();
    assert_eq!(flat0.dehn_twist().unwrap().rot_c_integer().unwrap(), 0);
    let a = hyperbolic_loop(1, 32).cover(3).unwrap();
    assert_eq!(a.rot(), 3.0);
    let c = CylinderConnection::pullback_flat(&a, 32).unwrap();
    let once = c.dehn_twist().unwrap();
    assert_eq!(once.rot_c_integer().unwrap(), -3);
    assert_eq!(once.dehn_twist().unwrap().rot_c_integer().unwrap(), -6);
    assert_eq!(once.grid(), c.grid());
}

#[test]
fn twist_of_curved_cylinder() {
    let g0 = random_in_class(&ConjClass::Hyperbolic { lambda: 2.0 }, 5);
    let a0 = LoopConnection::with_holonomy(&g0, 1, 64).unwrap();
    let c = CylinderConnection::from_nonpositive_path(&nonpositive_path(g0, LieElement::J.scale(0.2), 64), &a0)
        .unwrap();
    let d = c.dehn_twist().unwrap();
    assert!(d.min_curvature_margin() >= -1e-5);
    let before = classify(&c.holonomy_loop(64), TAU_CLASS).unwrap();
    let after = classify(&d.holonomy_loop(64), TAU_CLASS).unwrap();
    assert!(before.approx_eq(&after, 1e-5), "{before:?} vs {after:?}");
    assert_eq!(d.rot_boundary().unwrap().value, c.rot_boundary().unwrap().value);
}

#[test]
fn fractional_rotation_rot_c() {
    for r in 1..=4u32 {
        let a = hyperbolic_loop(1, 16).cover(r as i64).unwrap();
        for k in 0..r as i64 {
            let c = CylinderConnection::fractional_rotation(&a, k, r, 16).unwrap();
            let rc = c.rot_c_integer().unwrap();
            assert_eq!(rc.rem_euclid(r as i64), k, "r {r} k {k}");
        }
    }
}

#[test]
fn three_classes_as_pants() {
    let tc = three_classes_triple(2.0, 2.0, 2.0, TripleSign::Minus).unwrap();
    let data = PantsHolonomyData::from_product(vec![tc.lift1, tc.lift2]);
    let rep = milnor_wood_pants(&data, true);
    assert_eq!(rep.value, -1.0);
    assert_eq!(rep.bound, 1.0);
    assert!(rep.passed && rep.hypothesis_ok && rep.margin == 0.0);
    let bad = PantsHolonomyData { outer: tc.lift0.deck(-2), inner: vec![tc.lift1, tc.lift2] };
    assert!(!milnor_wood_pants(&bad, true).passed);
    let corr = GroupPath::from_fn(8, |_| tc.g0, "constant").unwrap();
    let with = PantsHolonomyData::with_correction(vec![tc.lift1, tc.lift2], &corr).unwrap();
    assert_eq!(with.rot_sum(), -1.0);
    let _ = LiftedElement::IDENTITY;
}
