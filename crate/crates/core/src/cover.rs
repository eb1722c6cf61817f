//! The universal cover of PSL(2,R), acting on R over RP¹ = R/πZ.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::sl2core::{classify, ConjClass, GroupElement, TAU_CLASS};

/// Angle of g·(cos x, sin x), reduced to [0, π).
pub fn act_angle(g: &GroupElement, x: f64) -> f64 {
    let v = g.matrix().apply([x.cos(), x.sin()]);
    reduce_pi(v[1].atan2(v[0]))
}

fn reduce_pi(x: f64) -> f64 {
    let r = x.rem_euclid(PI);
    if r >= PI {
        0.0
    } else {
        r
    }
}

/// The representative of `x` mod π nearest to `target`.
pub fn nearest_rep(x: f64, target: f64) -> f64 {
    x + PI * ((target - x) / PI).round()
}

/// A base element together with the value of its lift at 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftedElement {
    pub base: GroupElement,
    pub anchor: f64,
}

impl LiftedElement {
    pub const IDENTITY: LiftedElement = LiftedElement { base: GroupElement::IDENTITY, anchor: 0.0 };

    pub fn new(base: GroupElement, anchor: f64) -> Result<Self> {
        let expected = act_angle(&base, 0.0);
        let off = nearest_rep(expected, anchor) - anchor;
        if off.abs() > 1e-9 * (1.0 + anchor.abs()) {
            return Err(Error::BadAnchor { anchor, expected });
        }
        Ok(LiftedElement { base, anchor })
    }

    /// The lift whose anchor is the representative of the base action nearest `approx`.
    pub fn near(base: GroupElement, approx: f64) -> Self {
        LiftedElement { base, anchor: nearest_rep(act_angle(&base, 0.0), approx) }
    }

    /// The lift of a rotation by θ that translates by θ.
    pub fn rotation(theta: f64) -> Self {
        LiftedElement { base: GroupElement::rotation(theta), anchor: theta }
    }

    /// Evaluates the lifted action on R.
    pub fn eval(&self, x: f64) -> f64 {
        let k = (x / PI).floor();
        let xr = x - k * PI;
        let y = act_angle(&self.base.inverse(), self.anchor + FRAC_PI_2);
        let centre = if xr >= y { self.anchor + 3.0 * FRAC_PI_4 } else { self.anchor + FRAC_PI_4 };
        nearest_rep(act_angle(&self.base, xr), centre) + k * PI
    }

    pub fn compose(&self, other: &LiftedElement) -> LiftedElement {
        LiftedElement { base: self.base * other.base, anchor: self.eval(other.anchor) }
    }

    pub fn inverse(&self) -> LiftedElement {
        let inv = self.base.inverse();
        let y = act_angle(&inv, 0.0);
        let j = (self.eval(y) / PI).round();
        LiftedElement { base: inv, anchor: y - j * PI }
    }

    pub fn deck(&self, n: i64) -> LiftedElement {
        LiftedElement { base: self.base, anchor: self.anchor + n as f64 * PI }
    }

    pub fn pow(&self, k: i64) -> LiftedElement {
        let step = if k >= 0 { *self } else { self.inverse() };
        let mut acc = LiftedElement::IDENTITY;
        for _ in 0..k.unsigned_abs() {
            acc = acc.compose(&step);
        }
        acc
    }

    /// h̃ g̃ h̃⁻¹ for any lift h̃ of h.
    pub fn conj(&self, h: &GroupElement) -> LiftedElement {
        let hl = LiftedElement::near(*h, 0.0);
        hl.compose(self).compose(&hl.inverse())
    }

    /// Branch-tracked evaluation from 0 to x in steps finer than π/8.
    pub fn eval_tracked(&self, x: f64) -> f64 {
        let steps = ((x.abs() / (PI / 16.0)).ceil() as usize).max(1) * adaptive_factor(&self.base);
        let mut val = self.anchor;
        for i in 1..=steps {
            let xi = x * i as f64 / steps as f64;
            val = nearest_rep(act_angle(&self.base, xi), val);
        }
        val
    }

    pub fn rot(&self) -> f64 {
        match classify(&self.base, TAU_CLASS) {
            Ok(ConjClass::Elliptic { theta }) => {
                let grid: Vec<f64> = (0..32)
                    .map(|i| {
                        let x = PI * i as f64 / 32.0;
                        self.eval(x) - x
                    })
                    .collect();
                let mean = grid.iter().sum::<f64>() / grid.len() as f64;
                let k = (mean / PI).floor();
                debug_assert!(
                    grid.iter().all(|d| *d > k * PI - 1e-6 && *d < (k + 1.0) * PI + 1e-6),
                    "displacement crosses a multiple of pi"
                );
                k + theta / PI
            }
            _ => {
                let x0 = eigen_direction(&self.base);
                ((self.eval(x0) - x0) / PI).round()
            }
        }
    }

    /// (g̃ᵏ(0) − 0)/(πk).
    pub fn rot_iterative(&self, k: usize) -> f64 {
        let mut x = 0.0;
        for _ in 0..k {
            x = self.eval(x);
        }
        x / (PI * k as f64)
    }

    /// The SL(2) matrix covered by this lift: the one mapping e1 into the
    /// direction of the anchor angle.
    pub fn sl2_image(&self) -> Mat2 {
        let m = self.base.matrix();
        let phi = m.c.atan2(m.a);
        if (phi - self.anchor).cos() > 0.0 {
            m
        } else {
            -m
        }
    }

    /// As [`LiftedElement::sl2_image`], failing when the trace vanishes.
    pub fn sl2_rep(&self) -> Result<Mat2> {
        let m = self.sl2_image();
        if m.trace().abs() <= 1e-12 {
            return Err(Error::ParityUndefined);
        }
        Ok(m)
    }

    pub fn approx_eq(&self, other: &LiftedElement, eps: f64) -> bool {
        self.base.approx_eq(&other.base, eps) && (self.anchor - other.anchor).abs() <= eps
    }
}

fn adaptive_factor(g: &GroupElement) -> usize {
    // a Möbius map with norm n distorts angles by up to n², so refine accordingly
    let n = g.matrix().norm();
    ((n * n).ceil() as usize).clamp(1, 4096)
}

/// Direction of a real eigenvector; 0 for the identity.
pub fn eigen_direction(g: &GroupElement) -> f64 {
    let m = g.trace_positive().matrix();
    let tr = m.trace();
    let disc = (tr * tr - 4.0).max(0.0).sqrt();
    let mu = 0.5 * (tr + disc);
    let v1 = [m.b, mu - m.a];
    let v2 = [mu - m.d, m.c];
    let n1 = v1[0].hypot(v1[1]);
    let n2 = v2[0].hypot(v2[1]);
    if n1.max(n2) < 1e-14 {
        return 0.0;
    }
    let v = if n1 >= n2 { v1 } else { v2 };
    reduce_pi(v[1].atan2(v[0]))
}

/// Follows a lift continuously along a sampled path of base elements.
///
/// `start` lifts `path[0]`; each consecutive pair must move every direction
/// by less than π/2.
pub fn track_lift(start: &LiftedElement, path: &[GroupElement]) -> LiftedElement {
    let mut cur = *start;
    for w in path.windows(2) {
        let inc = w[1] * w[0].inverse();
        let inc_lift = LiftedElement::near(inc, 0.0);
        cur = inc_lift.compose(&cur);
    }
    if let Some(last) = path.last() {
        cur.base = *last;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl2core::{random_lie, LieElement};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_lift(seed: u64) -> LiftedElement {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = GroupElement::exp(&random_lie(&mut rng, 2.0));
        LiftedElement::near(g, 0.0).deck(rand::Rng::gen_range(&mut rng, -3..=3))
    }

    #[test]
    fn act_angle_examples() {
        assert!((act_angle(&GroupElement::IDENTITY, 0.3) - 0.3).abs() < 1e-15);
        let th = 2.0;
        assert!((act_angle(&GroupElement::rotation(th), 1.5) - (3.5 - PI)).abs() < 1e-14);
        assert_eq!(act_angle(&GroupElement::diag(2.0), 0.0), 0.0);
    }

    #[test]
    fn eval_examples() {
        assert!((LiftedElement::IDENTITY.eval(5.0) - 5.0).abs() < 1e-14);
        let r = LiftedElement::rotation(0.8);
        for x in [-4.0, -0.1, 0.0, 1.0, 7.3] {
            assert!((r.eval(x) - (x + 0.8)).abs() < 1e-13);
            assert!((r.deck(1).eval(x) - r.eval(x) - PI).abs() < 1e-13);
        }
    }

    #[test]
    fn closed_form_matches_branch_tracking() {
        for seed in 0..200 {
            let g = random_lift(seed);
            for i in -20..=20 {
                let x = 0.37 * i as f64;
                let (a, b) = (g.eval(x), g.eval_tracked(x));
                assert!((a - b).abs() < 1e-9, "seed {seed} x {x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn lift_is_equivariant_and_increasing() {
        for seed in 0..100 {
            let g = random_lift(seed);
            let mut prev = f64::NEG_INFINITY;
            for i in 0..400 {
                let x = -5.0 + 0.025 * i as f64;
                let y = g.eval(x);
                assert!(y > prev);
                prev = y;
                assert!((g.eval(x + PI) - y - PI).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rot_examples() {
        assert_eq!(LiftedElement::IDENTITY.rot(), 0.0);
        let th = 1.1;
        assert!((LiftedElement::rotation(th).rot() - th / PI).abs() < 1e-14);
        let h = LiftedElement::new(GroupElement::diag(3.0), 0.0).unwrap();
        assert_eq!(h.rot(), 0.0);
        assert!(h.rot_iterative(64).abs() < 3.0 / 64.0);
        assert_eq!(LiftedElement::IDENTITY.deck(1).rot(), 1.0);
        assert_eq!(LiftedElement::IDENTITY.deck(1).anchor, PI);
    }

    #[test]
    fn rot_agrees_with_iteration() {
        for seed in 0..300 {
            let g = random_lift(seed);
            assert!((g.rot() - g.rot_iterative(64)).abs() <= 3.0 / 64.0, "seed {seed}");
        }
    }

    #[test]
    fn group_law() {
        for seed in 0..100 {
            let g = random_lift(seed);
            let h = random_lift(seed + 1000);
            assert!(g.compose(&LiftedElement::IDENTITY).approx_eq(&g, 1e-12));
            assert!(g.compose(&LiftedElement::IDENTITY.deck(1)).approx_eq(&g.deck(1), 1e-9));
            let e = g.compose(&g.inverse());
            assert!(e.base.approx_eq(&GroupElement::IDENTITY, 1e-9) && e.anchor.abs() < 1e-9);
            let k = h.compose(&g);
            for x in [-1.0, 0.5, 3.0] {
                assert!((k.eval(x) - h.eval(g.eval(x))).abs() < 1e-9);
            }
            assert!((g.deck(2).deck(-5).anchor - g.deck(-3).anchor).abs() < 1e-12);
        }
    }

    #[test]
    fn sl2_image_covers_base_and_composes() {
        for seed in 0..200 {
            let g = random_lift(seed);
            let h = random_lift(seed + 7);
            let prod = g.compose(&h).sl2_image();
            assert!((prod - g.sl2_image() * h.sl2_image()).norm() < 1e-8 * (1.0 + prod.norm()));
            assert!((g.deck(1).sl2_image() + g.sl2_image()).norm() < 1e-12);
        }
    }

    #[test]
    fn parity_examples() {
        assert_eq!(LiftedElement::IDENTITY.sl2_rep().unwrap(), Mat2::IDENTITY);
        let r = LiftedElement::rotation(PI / 3.0);
        assert!((r.sl2_rep().unwrap().trace() - 1.0).abs() < 1e-12);
        assert!((r.deck(1).rot() - 4.0 / 3.0).abs() < 1e-12);
        assert!((r.deck(1).sl2_rep().unwrap().trace() + 1.0).abs() < 1e-12);
        let q = LiftedElement { base: GroupElement::rotation(PI / 2.0), anchor: PI / 2.0 };
        assert_eq!(q.sl2_rep(), Err(Error::ParityUndefined));
    }

    #[test]
    fn bad_anchor_rejected() {
        assert!(LiftedElement::new(GroupElement::IDENTITY, 0.5).is_err());
        assert!(LiftedElement::new(GroupElement::IDENTITY, 2.0 * PI).is_ok());
    }

    #[test]
    fn track_lift_follows_rotation_loop() {
        let path: Vec<_> = (0..=100).map(|i| GroupElement::rotation(3.0 * PI * i as f64 / 100.0)).collect();
        let end = track_lift(&LiftedElement::IDENTITY, &path);
        assert!((end.rot() - 3.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn homogeneity(seed in 0u64..5000, k in 1i64..=8) {
            let g = random_lift(seed);
            prop_assert!((g.pow(k).rot() - k as f64 * g.rot()).abs() < 1e-6);
            prop_assert!((g.pow(-k).rot() + k as f64 * g.rot()).abs() < 1e-6);
        }

        #[test]
        fn conjugation_invariance(seed in 0u64..5000, x in -1.5..1.5f64, y in -1.5..1.5f64) {
            let g = random_lift(seed);
            let h = GroupElement::exp(&LieElement::new(Mat2::new(x, y, -y * 0.5, -x)));
            prop_assert!((g.conj(&h).rot() - g.rot()).abs() < 1e-6);
        }
    }
}
