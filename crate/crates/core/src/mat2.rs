//! Plain 2×2 real matrices, stored row-major as `[[a, b], [c, d]]`.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2::new(1.0, 0.0, 0.0, 1.0);
    pub const ZERO: Mat2 = Mat2::new(0.0, 0.0, 0.0, 0.0);
    /// The counterclockwise rotation generator.
    pub const J: Mat2 = Mat2::new(0.0, -1.0, 1.0, 0.0);

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn from_rows(r: [[f64; 2]; 2]) -> Self {
        Mat2::new(r[0][0], r[0][1], r[1][0], r[1][1])
    }

    pub fn rows(&self) -> [[f64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    pub fn diag(x: f64, y: f64) -> Self {
        Mat2::new(x, 0.0, 0.0, y)
    }

    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Mat2::new(c, -s, s, c)
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn norm(&self) -> f64 {
        (self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d).sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Mat2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    /// Adjugate; equals the inverse when det = 1.
    pub fn adj(&self) -> Self {
        Mat2::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn inverse(&self) -> Self {
        self.adj().scale(1.0 / self.det())
    }

    pub fn transpose(&self) -> Self {
        Mat2::new(self.a, self.c, self.b, self.d)
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.d.is_finite()
    }

    pub fn commutator(&self, other: &Mat2) -> Mat2 {
        *self * *other - *other * *self
    }

    pub fn traceless_part(&self) -> Mat2 {
        let h = 0.5 * (self.a - self.d);
        Mat2::new(h, self.b, self.c, -h)
    }

    /// Exponential of a traceless matrix, using X² = qI.
    pub fn exp_traceless(&self) -> Mat2 {
        let x = self.traceless_part();
        let q = x.a * x.a + x.b * x.c;
        let (c, s) = cosh_sinhc(q);
        Mat2::IDENTITY.scale(c) + x.scale(s)
    }

    /// Principal logarithm of a unit-determinant matrix with trace > -2.
    ///
    /// Returns `None` when the trace is at or below -2, where no real
    /// principal logarithm exists.
    pub fn log_unimodular(&self) -> Option<Mat2> {
        let t = 0.5 * self.trace();
        if !(t > -1.0) {
            return None;
        }
        let u = t - 1.0;
        let f = if u.abs() < 1e-6 {
            1.0 - u / 3.0 + 2.0 * u * u / 15.0
        } else if u > 0.0 {
            let mu = t.acosh();
            mu / mu.sinh()
        } else {
            let phi = t.acos();
            phi / phi.sin()
        };
        Some((*self - Mat2::IDENTITY.scale(t)).scale(f))
    }
}

/// Returns (C(q), S(q)) with C = cosh √q, S = sinh √q / √q, continued through q ≤ 0.
fn cosh_sinhc(q: f64) -> (f64, f64) {
    if q.abs() < 1e-4 {
        let c = 1.0 + q / 2.0 + q * q / 24.0 + q * q * q / 720.0;
        let s = 1.0 + q / 6.0 + q * q / 120.0 + q * q * q / 5040.0;
        (c, s)
    } else if q > 0.0 {
        let r = q.sqrt();
        (r.cosh(), r.sinh() / r)
    } else {
        let r = (-q).sqrt();
        (r.cos(), r.sin() / r)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}
