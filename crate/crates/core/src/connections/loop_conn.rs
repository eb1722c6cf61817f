use std::f64::consts::PI;
use std::sync::OnceLock;

use super::line::{interp, line_transport, line_transport_to, MIN_NODES};
use crate::cover::LiftedElement;
use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::sl2core::{GroupElement, LieElement};

/// A 1-form a = a_t dt on S¹, sampled at t_j = j/M.
#[derive(Debug, Clone)]
pub struct LoopConnection {
    samples: Vec<LieElement>,
    cache: OnceLock<(Vec<GroupElement>, LiftedElement)>,
}

impl PartialEq for LoopConnection {
    fn eq(&self, other: &Self) -> bool {
        self.samples == other.samples
    }
}

impl LoopConnection {
    pub fn new(samples: Vec<LieElement>) -> Result<Self> {
        if samples.len() < MIN_NODES {
            return Err(Error::InvalidParameter(format!("a loop connection needs at least {MIN_NODES} samples")));
        }
        Ok(LoopConnection { samples, cache: OnceLock::new() })
    }

    pub fn from_fn(m: usize, f: impl Fn(f64) -> LieElement) -> Result<Self> {
        Self::new((0..m).map(|j| f(j as f64 / m as f64)).collect())
    }

    pub fn constant(gamma: LieElement, m: usize) -> Result<Self> {
        Self::new(vec![gamma; m])
    }

    /// a_t = rπJ + R(rπt)·X·R(rπt)⁻¹, whose transport is R(rπt)·exp(tX).
    pub fn spiral(r: i64, x: LieElement, m: usize) -> Result<Self> {
        let rp = r as f64 * PI;
        Self::from_fn(m, |t| LieElement::J.scale(rp) + x.conj(&GroupElement::rotation(rp * t)))
    }

    /// A spiral loop with holonomy g and winding r, when ±g has a real logarithm.
    pub fn with_holonomy(g: &GroupElement, r: i64, m: usize) -> Result<Self> {
        let log = g
            .trace_positive()
            .matrix()
            .log_unimodular()
            .ok_or_else(|| Error::InvalidParameter("holonomy has no real logarithm".into()))?;
        Self::spiral(r, LieElement::new(log), m)
    }

    pub fn samples(&self) -> &[LieElement] {
        &self.samples
    }

    pub fn m(&self) -> usize {
        self.samples.len()
    }

    pub(crate) fn matrices(&self) -> Vec<Mat2> {
        self.samples.iter().map(LieElement::matrix).collect()
    }

    /// Cubic periodic interpolation of a at t.
    pub fn eval(&self, t: f64) -> LieElement {
        LieElement::new(interp(&self.matrices(), true, t * self.m() as f64))
    }

    fn cached(&self) -> &(Vec<GroupElement>, LiftedElement) {
        self.cache.get_or_init(|| line_transport(&self.matrices(), true))
    }

    /// Π(t_j) for j = 0..=M.
    pub fn node_transports(&self) -> &[GroupElement] {
        &self.cached().0
    }

    pub fn transport(&self, t: f64) -> GroupElement {
        line_transport_to(&self.matrices(), true, t)
    }

    pub fn holonomy(&self) -> GroupElement {
        self.cached().1.base
    }

    pub fn lifted_holonomy(&self) -> LiftedElement {
        self.cached().1
    }

    pub fn rot(&self) -> f64 {
        self.lifted_holonomy().rot()
    }

    /// The pullback μ·a_{μt} under the degree-μ map of S¹.
    pub fn cover(&self, mu: i64) -> Result<LoopConnection> {
        if mu == 0 {
            return Err(Error::InvalidParameter("cover degree must be nonzero".into()));
        }
        let m = self.m() as i64;
        let sign = mu.signum();
        let samples = (0..m * mu.abs())
            .map(|j| self.samples[(sign * j).rem_euclid(m) as usize].scale(mu as f64))
            .collect();
        LoopConnection::new(samples)
    }

    /// Pointwise conjugation plus Φ'Φ⁻¹ for a loop of gauge values.
    pub fn gauge(&self, phi: &[GroupElement], dphi: &[Mat2]) -> Result<LoopConnection> {
        if phi.len() != self.m() || dphi.len() != self.m() {
            return Err(Error::InvalidParameter("gauge loop has the wrong length".into()));
        }
        LoopConnection::new(
            self.samples
                .iter()
                .zip(phi.iter().zip(dphi))
                .map(|(a, (p, dp))| a.conj(p) + LieElement::new(*dp * p.matrix().adj()))
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl2core::random_lie;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn wobbly(seed: u64, r: i64, m: usize) -> LoopConnection {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_lie(&mut rng, 0.5);
        let y = random_lie(&mut rng, 0.5);
        LoopConnection::from_fn(m, |t| {
            LieElement::J.scale(r as f64 * PI)
                + x.scale((2.0 * PI * t).cos())
                + y.scale((4.0 * PI * t).sin())
        })
        .unwrap()
    }

    #[test]
    fn spiral_holonomy_is_exact() {
        let x = LieElement::new(Mat2::new(0.4, 0.1, -0.3, -0.4));
        let a = LoopConnection::spiral(2, x, 128).unwrap();
        for (j, p) in a.node_transports().iter().enumerate().step_by(16) {
            let t = j as f64 / 128.0;
            let exact = GroupElement::rotation(2.0 * PI * t) * GroupElement::exp(&x.scale(t));
            assert!(p.approx_eq(&exact, 1e-8), "node {j}: {}", p.dist(&exact));
        }
        assert_eq!(a.rot(), 2.0);
    }

    #[test]
    fn refinement_stable() {
        let a = wobbly(1, 1, 256);
        let b = wobbly(1, 1, 512);
        assert!(a.holonomy().dist(&b.holonomy()) < 1e-8);
    }

    #[test]
    fn constant_rotation_cover_doubles() {
        let a = LoopConnection::constant(LieElement::J.scale(0.7), 32).unwrap();
        assert!((a.rot() - 0.7 / PI).abs() < 1e-12);
        let a2 = a.cover(2).unwrap();
        assert!(a2.holonomy().approx_eq(&GroupElement::rotation(1.4), 1e-12));
        assert!((a2.rot() - 1.4 / PI).abs() < 1e-12);
        assert_eq!(a.cover(1).unwrap(), a);
    }

    #[test]
    fn cover_homogeneity() {
        for seed in 0..5 {
            let a = wobbly(seed, seed as i64 % 3 - 1, 64);
            let h = a.lifted_holonomy();
            for mu in [-3i64, -2, -1, 1, 2, 3] {
                let c = a.cover(mu).unwrap();
                assert!((c.rot() - mu as f64 * a.rot()).abs() < 1e-6, "seed {seed} mu {mu}");
                assert!(c.holonomy().approx_eq(&h.pow(mu).base, 1e-8));
            }
            let inv = a.cover(-1).unwrap().holonomy();
            assert!(inv.approx_eq(&a.holonomy().inverse(), 1e-10));
        }
    }

    #[test]
    fn gauge_conjugates_holonomy() {
        let a = wobbly(3, 0, 64);
        let h = GroupElement::exp(&LieElement::new(Mat2::new(0.2, 0.5, -0.1, -0.2)));
        let b = a.gauge(&vec![h; 64], &vec![Mat2::ZERO; 64]).unwrap();
        assert!(b.holonomy().approx_eq(&a.holonomy().conj(&h), 1e-9));
    }
}
