//! The unit disc model: PU(1,1) Möbius maps, the Cayley correspondence with
//! SL(2,R), holomorphic vector fields and their Hamiltonians.
//!
//! The Cayley matrix is K = [[1, −i], [1, i]] applied after conjugation by
//! diag(1, −1), so that the rotation generator J lands on α = +1.

use num_complex::Complex64 as C;

use crate::mat2::Mat2;
use crate::sl2core::{GroupElement, LieElement};

type CMat = [[C; 2]; 2];

fn cmul(x: &CMat, y: &CMat) -> CMat {
    let mut out = [[C::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    out
}

fn creal(m: &Mat2) -> CMat {
    [[C::new(m.a, 0.0), C::new(m.b, 0.0)], [C::new(m.c, 0.0), C::new(m.d, 0.0)]]
}

const I: C = C::new(0.0, 1.0);

fn k() -> CMat {
    [[C::new(1.0, 0.0), -I], [C::new(1.0, 0.0), I]]
}

fn k_inv() -> CMat {
    // (1/2i)·[[i, i], [−1, 1]]
    let s = C::new(0.0, -0.5);
    [[I * s, I * s], [-s, s]]
}

fn twist(m: &Mat2) -> Mat2 {
    Mat2::new(m.a, -m.b, -m.c, m.d)
}

fn to_disc(m: &Mat2) -> CMat {
    cmul(&cmul(&k(), &creal(&twist(m))), &k_inv())
}

fn from_disc(m: &CMat) -> Mat2 {
    let r = cmul(&cmul(&k_inv(), m), &k());
    twist(&Mat2::new(r[0][0].re, r[0][1].re, r[1][0].re, r[1][1].re))
}

/// w ↦ (aw + b)/(b̄w + ā) with |a|² − |b|² = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscIsometry {
    pub a: C,
    pub b: C,
}

impl DiscIsometry {
    pub const IDENTITY: DiscIsometry = DiscIsometry { a: C::new(1.0, 0.0), b: C::new(0.0, 0.0) };

    pub fn norm_defect(&self) -> f64 {
        (self.a.norm_sqr() - self.b.norm_sqr() - 1.0).abs()
    }

    pub fn trace(&self) -> f64 {
        2.0 * self.a.re
    }

    pub fn compose(&self, o: &DiscIsometry) -> DiscIsometry {
        DiscIsometry { a: self.a * o.a + self.b * o.b.conj(), b: self.a * o.b + self.b * o.a.conj() }
    }

    pub fn dist(&self, o: &DiscIsometry) -> f64 {
        let d = |s: f64| ((self.a - o.a * s).norm_sqr() + (self.b - o.b * s).norm_sqr()).sqrt();
        d(1.0).min(d(-1.0))
    }
}

/// The u(1,1) element [[iα, β̄], [β, −iα]].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscLieElement {
    pub alpha: f64,
    pub beta: C,
}

impl DiscLieElement {
    pub fn new(alpha: f64, beta: C) -> Self {
        DiscLieElement { alpha, beta }
    }

    fn matrix(&self) -> CMat {
        [[I * self.alpha, self.beta.conj()], [self.beta, -I * self.alpha]]
    }

    fn from_matrix(m: &CMat) -> Self {
        DiscLieElement { alpha: m[0][0].im, beta: m[1][0] }
    }

    pub fn bracket(&self, o: &DiscLieElement) -> DiscLieElement {
        let (x, y) = (self.matrix(), o.matrix());
        let (p, q) = (cmul(&x, &y), cmul(&y, &x));
        let mut m = p;
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = p[i][j] - q[i][j];
            }
        }
        Self::from_matrix(&m)
    }

    /// Lies in the closed cone α ≥ |β|.
    pub fn in_cone(&self, tol: f64) -> bool {
        self.alpha >= self.beta.norm() - tol
    }

    pub fn scale(&self, s: f64) -> Self {
        DiscLieElement { alpha: self.alpha * s, beta: self.beta * s }
    }
}

pub fn cayley(g: &GroupElement) -> DiscIsometry {
    let m = to_disc(&g.matrix());
    DiscIsometry { a: m[0][0], b: m[0][1] }
}

pub fn cayley_inv(g: &DiscIsometry) -> GroupElement {
    let m = [[g.a, g.b], [g.b.conj(), g.a.conj()]];
    GroupElement::from_mat_unchecked(from_disc(&m))
}

pub fn cayley_lie(gamma: &LieElement) -> DiscLieElement {
    DiscLieElement::from_matrix(&to_disc(&gamma.matrix()))
}

pub fn cayley_lie_inv(gamma: &DiscLieElement) -> LieElement {
    LieElement::new(from_disc(&gamma.matrix()))
}

/// exp(tγ) as a disc isometry.
pub fn disc_exp(gamma: &DiscLieElement, t: f64) -> DiscIsometry {
    cayley(&GroupElement::exp(&cayley_lie_inv(gamma).scale(t)))
}

pub fn mobius(g: &DiscIsometry, w: C) -> C {
    (g.a * w + g.b) / (g.b.conj() * w + g.a.conj())
}

/// X_γ(w) = β̄ + 2iαw − βw².
pub fn vector_field(gamma: &DiscLieElement, w: C) -> C {
    gamma.beta.conj() + I * 2.0 * gamma.alpha * w - gamma.beta * w * w
}

/// H_γ(w) = (1 − |w|²)⁻¹(½(1 + |w|²)α − Im(βw)).
pub fn hamiltonian(gamma: &DiscLieElement, w: C) -> f64 {
    let r2 = w.norm_sqr();
    (0.5 * (1.0 + r2) * gamma.alpha - (gamma.beta * w).im) / (1.0 - r2)
}

/// Disc distance for the metric of curvature −4.
pub fn dist_hyp(w1: C, w2: C) -> f64 {
    ((w1 - w2).norm() / (C::new(1.0, 0.0) - w1.conj() * w2).norm()).atanh()
}

/// Symplectic density: ω = σ(1 − |w|²)⁻² dx∧dy.
fn omega_density(sigma: f64, w: C) -> f64 {
    sigma / (1.0 - w.norm_sqr()).powi(2)
}

fn grad(f: impl Fn(C) -> f64, w: C, h: f64) -> (f64, f64) {
    let fx = (f(w + C::new(h, 0.0)) - f(w - C::new(h, 0.0))) / (2.0 * h);
    let fy = (f(w + C::new(0.0, h)) - f(w - C::new(0.0, h))) / (2.0 * h);
    (fx, fy)
}

/// max over Y ∈ {∂x, ∂y} of |dH_γ(Y) − ω(X_γ, Y)| with orientation sign σ.
pub fn hamiltonian_field_defect(gamma: &DiscLieElement, w: C, h: f64, sigma: f64) -> f64 {
    let (hx, hy) = grad(|z| hamiltonian(gamma, z), w, h);
    let x = vector_field(gamma, w);
    let f = omega_density(sigma, w);
    // ω(X, ∂x) = −f·X_y, ω(X, ∂y) = f·X_x
    (hx + f * x.im).abs().max((hy - f * x.re).abs())
}

/// The sign σ for which dH_γ = ω(X_γ, ·); decided numerically on a fixed sample.
pub fn symplectic_sign() -> f64 {
    let gamma = DiscLieElement::new(0.3, C::new(0.7, -0.4));
    let w = C::new(0.2, -0.3);
    let plus = hamiltonian_field_defect(&gamma, w, 1e-5, 1.0);
    let minus = hamiltonian_field_defect(&gamma, w, 1e-5, -1.0);
    if plus < minus {
        1.0
    } else {
        -1.0
    }
}

/// {F, G} = ω(X_F, X_G) = (F_x G_y − F_y G_x)/density.
pub fn poisson_bracket(f: impl Fn(C) -> f64, g: impl Fn(C) -> f64, w: C, h: f64, sigma: f64) -> f64 {
    let (fx, fy) = grad(f, w, h);
    let (gx, gy) = grad(g, w, h);
    (fx * gy - fy * gx) / omega_density(sigma, w)
}

/// |{H_γ₁, H_γ₂}(w) − H_[γ₁,γ₂](w)| with central differences of step h.
pub fn poisson_defect(g1: &DiscLieElement, g2: &DiscLieElement, w: C, h: f64) -> f64 {
    let sigma = symplectic_sign();
    let pb = poisson_bracket(|z| hamiltonian(g1, z), |z| hamiltonian(g2, z), w, h, sigma);
    (pb - hamiltonian(&g1.bracket(g2), w)).abs()
}

/// π / log(λ²).
pub fn hyp_cylinder_max_length(lambda: f64) -> f64 {
    std::f64::consts::PI / (lambda * lambda).ln()
}

/// ½·asinh(sinh(π/2l)/sin θ).
pub fn elliptic_cylinder_radius_bound(theta: f64, l: f64) -> f64 {
    0.5 * ((std::f64::consts::PI / (2.0 * l)).sinh() / theta.sin()).asinh()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl2core::{cone_test, random_lie};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_disc_point(rng: &mut ChaCha8Rng, rmax: f64) -> C {
        C::from_polar(rmax * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI))
    }

    #[test]
    fn cayley_examples() {
        assert!(cayley(&GroupElement::IDENTITY).dist(&DiscIsometry::IDENTITY) < 1e-15);
        let th = 0.4;
        let r = cayley(&GroupElement::rotation(th));
        let h = 1e-6;
        let deriv = (mobius(&r, C::new(h, 0.0)) - mobius(&r, C::new(-h, 0.0))) / (2.0 * h);
        assert!((deriv - C::from_polar(1.0, 2.0 * th)).norm() < 1e-9);
        assert!(mobius(&r, C::new(0.0, 0.0)).norm() < 1e-15);
        let d = cayley(&GroupElement::diag(2.0));
        assert!((d.trace().abs() - 2.5).abs() < 1e-12);
        // boundary fixed points ±1
        for w in [C::new(1.0, 0.0), C::new(-1.0, 0.0)] {
            assert!((mobius(&d, w) - w).norm() < 1e-12);
        }
        let j = cayley_lie(&LieElement::J);
        assert!((j.alpha - 1.0).abs() < 1e-15 && j.beta.norm() < 1e-15);
    }

    #[test]
    fn cayley_is_a_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let g = GroupElement::exp(&random_lie(&mut rng, 1.5));
            let h = GroupElement::exp(&random_lie(&mut rng, 1.5));
            let lhs = cayley(&(g * h));
            assert!(lhs.dist(&cayley(&g).compose(&cayley(&h))) < 1e-10);
            assert!(lhs.norm_defect() < 1e-10);
            assert!((lhs.trace().abs() - (g * h).trace().abs()).abs() < 1e-10);
            assert!(cayley_inv(&cayley(&g)).approx_eq(&g, 1e-10));
        }
    }

    #[test]
    fn cone_correspondence() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let x = random_lie(&mut rng, 1.0);
            let d = cayley_lie(&x);
            let nonneg = cone_test(&x, 1e-12).is_nonnegative();
            assert_eq!(nonneg, d.in_cone(1e-9), "{x:?}");
            assert!((cayley_lie_inv(&d) - x).norm() < 1e-12);
        }
    }

    #[test]
    fn flow_matches_vector_field() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let g = cayley_lie(&random_lie(&mut rng, 1.0));
            let w = random_disc_point(&mut rng, 0.9);
            let h = 1e-5;
            let fd = (mobius(&disc_exp(&g, h), w) - mobius(&disc_exp(&g, -h), w)) / (2.0 * h);
            assert!((fd - vector_field(&g, w)).norm() < 1e-6);
        }
        let g = DiscLieElement::new(0.3, C::new(0.1, 0.2));
        assert_eq!(vector_field(&g, C::new(0.0, 0.0)), g.beta.conj());
    }

    #[test]
    fn nonnegative_fields_point_forward_on_the_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let b = C::from_polar(rng.gen::<f64>(), rng.gen_range(0.0..2.0 * PI));
            let g = DiscLieElement::new(b.norm() + rng.gen::<f64>(), b);
            for k in 0..64 {
                let w = C::from_polar(1.0, 2.0 * PI * k as f64 / 64.0);
                // angular component of X at w is Im(X·w̄)
                assert!((vector_field(&g, w) * w.conj()).im >= -1e-12);
            }
        }
    }

    #[test]
    fn hamiltonian_examples() {
        let g = DiscLieElement::new(0.8, C::new(0.5, -0.3));
        assert_eq!(hamiltonian(&g, C::new(0.0, 0.0)), 0.4);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let b = C::from_polar(rng.gen::<f64>(), rng.gen_range(0.0..2.0 * PI));
            let g = DiscLieElement::new(b.norm() * (1.0 + rng.gen::<f64>()), b);
            for _ in 0..100 {
                assert!(hamiltonian(&g, random_disc_point(&mut rng, 0.999)) >= -1e-12);
            }
        }
        // outside the cone H is unbounded below along the minimizing ray
        let g = DiscLieElement::new(0.5, C::new(0.0, 1.0));
        let v: Vec<f64> = [0.9, 0.99, 0.999, 0.9999].iter().map(|r| hamiltonian(&g, C::new(*r, 0.0))).collect();
        assert!(v.windows(2).all(|p| p[1] < p[0]) && v[3] < -1000.0);
    }

    #[test]
    fn symplectic_sign_is_pinned() {
        assert_eq!(symplectic_sign(), -1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let g = cayley_lie(&random_lie(&mut rng, 1.0));
            let w = random_disc_point(&mut rng, 0.8);
            assert!(hamiltonian_field_defect(&g, w, 1e-4, -1.0) < 1e-5);
        }
    }

    #[test]
    fn poisson_examples() {
        let a = DiscLieElement::new(1.0, C::new(0.0, 0.0));
        let b = DiscLieElement::new(0.0, C::new(1.0, 0.0));
        let w = C::new(0.2, 0.1);
        assert_eq!(poisson_defect(&a, &a, w, 1e-3), hamiltonian(&a.bracket(&a), w).abs());
        let d = poisson_defect(&a, &b, w, 1e-3);
        assert!(d <= 1e-5, "{d}");
        assert!((d - poisson_defect(&b, &a, w, 1e-3)).abs() < 1e-12);
    }

    #[test]
    fn isometry_preserves_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let g = cayley(&GroupElement::exp(&random_lie(&mut rng, 1.0)));
            let (w1, w2) = (random_disc_point(&mut rng, 0.9), random_disc_point(&mut rng, 0.9));
            assert!((dist_hyp(mobius(&g, w1), mobius(&g, w2)) - dist_hyp(w1, w2)).abs() < 1e-9);
        }
        let w = C::new(0.3, 0.4);
        assert_eq!(dist_hyp(w, w), 0.0);
    }

    #[test]
    fn hamiltonian_conserved_along_flow() {
        let g = DiscLieElement::new(0.4, C::new(0.9, 0.2));
        let mut w = C::new(0.1, -0.3);
        let h0 = hamiltonian(&g, w);
        let dt = 1e-3;
        for _ in 0..1000 {
            let k1 = vector_field(&g, w);
            let k2 = vector_field(&g, w + k1 * (0.5 * dt));
            let k3 = vector_field(&g, w + k2 * (0.5 * dt));
            let k4 = vector_field(&g, w + k3 * dt);
            w += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        }
        assert!((hamiltonian(&g, w) - h0).abs() < 1e-6);
    }

    #[test]
    fn bounds() {
        assert!((hyp_cylinder_max_length(std::f64::consts::E) - PI / 2.0).abs() < 1e-12);
        assert!((elliptic_cylinder_radius_bound(PI / 2.0, PI / 2.0) - 0.5).abs() < 1e-12);
        // rotation by 2θ about 0: sinh d(p, q) = sin θ · sinh 2d(p, 0)
        for (th, r) in [(0.3, 0.5), (1.2, 0.9), (2.5, 0.2)] {
            let p = C::new(r, 0.0);
            let q = mobius(&cayley(&GroupElement::rotation(th)), p);
            let lhs = dist_hyp(p, q).sinh();
            let rhs = th.sin() * (2.0 * dist_hyp(p, C::new(0.0, 0.0))).sinh();
            assert!((lhs - rhs).abs() < 1e-10 * rhs.max(1.0));
        }
    }
}
