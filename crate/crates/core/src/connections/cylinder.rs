use rayon::prelude::*;
use serde::Serialize;

use super::line::{aperiodic_stencil, interp, line_transport, line_transport_to, ordered_exp, SmoothStep, MIN_NODES};
use super::loop_conn::LoopConnection;
use crate::cover::{track_lift, LiftedElement};
use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::paths::GroupPath;
use crate::sl2core::{classify, ConjClass, GroupElement, LieElement, TAU_CLASS};

pub const BOUNDARY_CONVENTION: &str =
    "annulus: s=0 circle orientation-reversing, s=1 circle orientation-preserving";

/// Support of the t-bump used by the path constructors.
pub const PATH_BUMP: SmoothStep = SmoothStep { lo: 0.1, hi: 0.9 };
/// Support of the Dehn twist profile β(s).
pub const TWIST_PROFILE: SmoothStep = SmoothStep { lo: 0.25, hi: 0.75 };

/// A connection A(s,t)dt on [0,1]×S¹ (or [0,1]² when aperiodic), sampled on
/// s_i = i/Ns, i = 0..=Ns and t_j = j/Mt (j < Mt periodic, j ≤ Mt aperiodic).
///
/// `c_transport` is the lifted transport along s ↦ (s, 0) between the
/// boundary frames; it is the identity for a connection presented in this gauge.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderConnection {
    ns: usize,
    mt: usize,
    periodic: bool,
    grid: Vec<LieElement>,
    c_transport: LiftedElement,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryRotation {
    pub value: f64,
    pub rot_inner: f64,
    pub rot_outer: f64,
    pub convention: &'static str,
}

/// Samples of a gauge transformation on the same grid as a connection.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeField {
    pub ns: usize,
    pub mt: usize,
    pub periodic: bool,
    pub values: Vec<GroupElement>,
}

impl GaugeField {
    pub fn from_fn(ns: usize, mt: usize, periodic: bool, f: impl Fn(f64, f64) -> GroupElement) -> Self {
        let cols = if periodic { mt } else { mt + 1 };
        let mut values = Vec::with_capacity((ns + 1) * cols);
        for i in 0..=ns {
            for j in 0..cols {
                values.push(f(i as f64 / ns as f64, j as f64 / mt as f64));
            }
        }
        GaugeField { ns, mt, periodic, values }
    }

    fn cols(&self) -> usize {
        if self.periodic {
            self.mt
        } else {
            self.mt + 1
        }
    }

    pub fn at(&self, i: usize, j: usize) -> GroupElement {
        self.values[i * self.cols() + j]
    }
}

impl CylinderConnection {
    pub fn from_grid(ns: usize, mt: usize, periodic: bool, grid: Vec<LieElement>) -> Result<Self> {
        if ns + 1 < MIN_NODES || mt < MIN_NODES {
            return Err(Error::InvalidParameter(format!("grid needs Ns >= {} and Mt >= {MIN_NODES}", MIN_NODES - 1)));
        }
        let cols = if periodic { mt } else { mt + 1 };
        if grid.len() != (ns + 1) * cols {
            return Err(Error::InvalidParameter(format!(
                "grid has {} samples, expected {}",
                grid.len(),
                (ns + 1) * cols
            )));
        }
        Ok(CylinderConnection { ns, mt, periodic, grid, c_transport: LiftedElement::IDENTITY })
    }

    pub fn with_c_transport(mut self, c: LiftedElement) -> Self {
        self.c_transport = c;
        self
    }

    /// The s-independent connection a(t)dt.
    pub fn pullback_flat(a: &LoopConnection, ns: usize) -> Result<Self> {
        let row = a.samples();
        let grid = (0..=ns).flat_map(|_| row.iter().copied()).collect();
        Self::from_grid(ns, a.m(), true, grid)
    }

    /// A(s,t) = a(t) − s·γ, with curvature γ.
    pub fn linear(a: &LoopConnection, gamma: LieElement, ns: usize) -> Result<Self> {
        let grid = (0..=ns)
            .flat_map(|i| {
                let s = i as f64 / ns as f64;
                a.samples().iter().map(move |x| *x - gamma.scale(s))
            })
            .collect();
        Self::from_grid(ns, a.m(), true, grid)
    }

    pub fn ns(&self) -> usize {
        self.ns
    }

    pub fn mt(&self) -> usize {
        self.mt
    }

    pub fn periodic(&self) -> bool {
        self.periodic
    }

    pub fn cols(&self) -> usize {
        if self.periodic {
            self.mt
        } else {
            self.mt + 1
        }
    }

    pub fn grid(&self) -> &[LieElement] {
        &self.grid
    }

    pub fn c_transport(&self) -> LiftedElement {
        self.c_transport
    }

    pub fn at(&self, i: usize, j: usize) -> LieElement {
        self.grid[i * self.cols() + j]
    }

    fn row_mats(&self, i: usize) -> Vec<Mat2> {
        let c = self.cols();
        self.grid[i * c..(i + 1) * c].iter().map(LieElement::matrix).collect()
    }

    pub fn row_loop(&self, i: usize) -> Result<LoopConnection> {
        let c = self.cols();
        LoopConnection::new(self.grid[i * c..(i + 1) * c].to_vec())
    }

    /// Cubic interpolation of A at (s, t).
    pub fn eval(&self, s: f64, t: f64) -> Mat2 {
        let (s0, w) = aperiodic_stencil(self.ns + 1, s * self.ns as f64);
        let x = t * self.mt as f64;
        w.iter()
            .enumerate()
            .fold(Mat2::ZERO, |acc, (k, wk)| acc + interp(&self.row_mats(s0 + k), self.periodic, x).scale(*wk))
    }

    /// −∂_sA: central differences inside, one-sided at the two edges.
    pub fn curvature(&self, i: usize, j: usize) -> LieElement {
        let n = self.ns as f64;
        if i == 0 {
            -(self.at(1, j) - self.at(0, j)).scale(n)
        } else if i == self.ns {
            -(self.at(i, j) - self.at(i - 1, j)).scale(n)
        } else {
            -(self.at(i + 1, j) - self.at(i - 1, j)).scale(0.5 * n)
        }
    }

    pub fn min_curvature_margin(&self) -> f64 {
        (0..=self.ns)
            .into_par_iter()
            .map(|i| (0..self.cols()).map(|j| self.curvature(i, j).cone_margin()).fold(f64::INFINITY, f64::min))
            .reduce(|| f64::INFINITY, f64::min)
    }

    pub fn max_curvature_norm(&self) -> f64 {
        (0..=self.ns)
            .flat_map(|i| (0..self.cols()).map(move |j| (i, j)))
            .map(|(i, j)| self.curvature(i, j).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_nonneg_curved(&self, margin: f64) -> bool {
        self.min_curvature_margin() >= -margin
    }

    /// Π(s_i, t).
    pub fn transport_t(&self, i: usize, t: f64) -> GroupElement {
        line_transport_to(&self.row_mats(i), self.periodic, t)
    }

    pub fn holonomy_loop(&self, i: usize) -> GroupElement {
        line_transport(&self.row_mats(i), self.periodic).1.base
    }

    pub fn lifted_holonomy(&self, i: usize) -> LiftedElement {
        line_transport(&self.row_mats(i), self.periodic).1
    }

    pub fn rot_boundary(&self) -> Result<BoundaryRotation> {
        if !self.periodic {
            return Err(Error::InvalidParameter("the square has no boundary circles".into()));
        }
        let rot_inner = self.lifted_holonomy(0).rot();
        let rot_outer = self.lifted_holonomy(self.ns).rot();
        Ok(BoundaryRotation { value: rot_outer - rot_inner, rot_inner, rot_outer, convention: BOUNDARY_CONVENTION })
    }

    pub fn rot_c(&self) -> f64 {
        self.c_transport.rot()
    }

    /// rot_c as an exact integer; needs non-elliptic transport and boundary holonomies.
    pub fn rot_c_integer(&self) -> Result<i64> {
        let mut checks = vec![("c transport", self.c_transport.base)];
        if self.periodic {
            checks.push(("inner holonomy", self.holonomy_loop(0)));
            checks.push(("outer holonomy", self.holonomy_loop(self.ns)));
        }
        for (what, g) in checks {
            if let Ok(ConjClass::Elliptic { theta }) = classify(&g, TAU_CLASS) {
                return Err(Error::NonHyperbolicBoundary(format!("{what} is elliptic (theta={theta})")));
            }
        }
        Ok(self.rot_c().round() as i64)
    }

    /// Lifted transport along τ ↦ (s(τ), t(τ)), τ ∈ [0,1], starting at the identity.
    pub fn transport_curve(
        &self,
        s: impl Fn(f64) -> f64,
        t: impl Fn(f64) -> f64,
        dt: impl Fn(f64) -> f64,
        steps: usize,
    ) -> LiftedElement {
        let path = ordered_exp(|tau| self.eval(s(tau), t(tau)).scale(dt(tau)), 0.0, 1.0, steps);
        track_lift(&LiftedElement::IDENTITY, &path)
    }

    fn curve_steps(&self) -> usize {
        let max = self.grid.iter().map(LieElement::norm).fold(0.0, f64::max);
        (8 * self.ns.max(self.mt)).max((16.0 * max) as usize)
    }

    /// Applies Φ and returns the canonical form: A' = Φ₀AΦ₀⁻¹ + Φ₀'Φ₀⁻¹ with
    /// Φ₀ = Φ(0,·), and c transport Φ(1,0)·c·Φ(0,0)⁻¹ lifted along s ↦ Φ(s,0).
    pub fn gauge(&self, phi: &GaugeField) -> Result<CylinderConnection> {
        if phi.ns != self.ns || phi.mt != self.mt || phi.periodic != self.periodic {
            return Err(Error::InvalidParameter("gauge field grid does not match".into()));
        }
        let cols = self.cols();
        let row0: Vec<GroupElement> = (0..cols).map(|j| phi.at(0, j)).collect();
        let d0 = row_derivative(&row0, self.periodic, self.mt);
        let mut grid = Vec::with_capacity(self.grid.len());
        for i in 0..=self.ns {
            for j in 0..cols {
                let p = row0[j];
                grid.push(self.at(i, j).conj(&p) + LieElement::new(d0[j] * p.matrix().adj()));
            }
        }
        let base = phi.at(0, 0);
        let column: Vec<GroupElement> = (0..=self.ns).map(|i| phi.at(i, 0) * base.inverse()).collect();
        // rejects fields too coarse in s for the lift to be tracked
        let column = GroupPath::new(column, "gauge along c")?;
        let l = track_lift(&LiftedElement::IDENTITY, column.samples());
        let c = l.compose(&self.c_transport.conj(&base));
        Ok(CylinderConnection::from_grid(self.ns, self.mt, self.periodic, grid)?.with_c_transport(c))
    }

    /// Pullback by the twist (s,t) ↦ (s, t − β(s)), re-gauged to canonical form.
    ///
    /// Assumes the boundary frame loop at s = 1 is null-homotopic, which holds
    /// for every connection produced by this crate's constructors.
    pub fn dehn_twist(&self) -> Result<CylinderConnection> {
        if !self.periodic {
            return Err(Error::InvalidParameter("twisting needs a periodic t-direction".into()));
        }
        let beta = TWIST_PROFILE;
        let cols = self.cols();
        let n = self.ns as f64;
        let curv: Vec<Mat2> = (0..=self.ns)
            .flat_map(|i| (0..cols).map(move |j| (i, j)))
            .map(|(i, j)| self.curvature(i, j).matrix())
            .collect();
        let flat = curv.iter().all(|f| f.norm() == 0.0);
        let sub = 8;
        let columns: Vec<Vec<LieElement>> = (0..cols)
            .into_par_iter()
            .map(|j| {
                let t = j as f64 / self.mt as f64;
                let a0 = self.at(0, j);
                if flat {
                    return vec![a0; self.ns + 1];
                }
                // Π_C along τ ↦ (τ, t − β(τ)), sampled at the s nodes
                let gen = |tau: f64| self.eval(tau, t - beta.step(tau)).scale(-beta.bump(tau));
                let fine = ordered_exp(gen, 0.0, 1.0, self.ns * sub);
                let fprime: Vec<Mat2> = (0..=self.ns)
                    .map(|i| {
                        let p = fine[i * sub].matrix();
                        let row = &curv[i * cols..(i + 1) * cols];
                        let x = (t - beta.step(i as f64 / n)) * self.mt as f64;
                        p.adj() * interp(row, true, x) * p
                    })
                    .collect();
                let mut out = Vec::with_capacity(self.ns + 1);
                let mut acc = Mat2::ZERO;
                out.push(a0);
                for i in 1..=self.ns {
                    acc = acc + (fprime[i - 1] + fprime[i]).scale(0.5 / n);
                    out.push(a0 - LieElement::new(acc));
                }
                out
            })
            .collect();
        let mut grid = Vec::with_capacity(self.grid.len());
        for i in 0..=self.ns {
            for col in &columns {
                grid.push(col[i]);
            }
        }
        let twist = self.transport_curve(|tau| tau, |tau| -beta.step(tau), |tau| -beta.bump(tau), self.curve_steps());
        let c = self.c_transport.compose(&twist);
        Ok(CylinderConnection::from_grid(self.ns, self.mt, true, grid)?.with_c_transport(c))
    }

    /// Flat cylinder over `a` whose c transport runs along (τ, kτ/r); when a is
    /// an r-fold cover this models the framing offset k/r at the outer boundary.
    pub fn fractional_rotation(a: &LoopConnection, k: i64, r: u32, ns: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidParameter("r must be positive".into()));
        }
        let conn = Self::pullback_flat(a, ns)?;
        let slope = k as f64 / r as f64;
        let c = conn.transport_curve(|tau| tau, |tau| slope * tau, |_| slope, conn.curve_steps());
        Ok(conn.with_c_transport(c))
    }

    /// Nonnegatively curved cylinder restricting to a₀ at s = 0 whose loop
    /// holonomies follow the nonpositive path g(s).
    pub fn from_nonpositive_path(path: &GroupPath, a0: &LoopConnection) -> Result<Self> {
        let hol = a0.holonomy();
        let mismatch = hol.dist(&path.start());
        if mismatch > 1e-6 {
            return Err(Error::HolonomyMismatch(mismatch));
        }
        let transports: Vec<Mat2> = a0.node_transports()[..a0.m()].iter().map(GroupElement::matrix).collect();
        let grid = build_from_path(path, &a0.matrices(), &transports, a0.m())?;
        Self::from_grid(path.n(), a0.m(), true, grid)
    }

    /// The aperiodic square variant; `a0` holds Mt + 1 samples on [0,1] whose
    /// transport over [0,1] is g(0).
    pub fn from_nonpositive_path_square(path: &GroupPath, a0: &[LieElement]) -> Result<Self> {
        if a0.len() < MIN_NODES {
            return Err(Error::InvalidParameter(format!("square boundary needs at least {MIN_NODES} samples")));
        }
        let mats: Vec<Mat2> = a0.iter().map(LieElement::matrix).collect();
        let (nodes, lift) = line_transport(&mats, false);
        let mismatch = lift.base.dist(&path.start());
        if mismatch > 1e-6 {
            return Err(Error::HolonomyMismatch(mismatch));
        }
        let transports: Vec<Mat2> = nodes.iter().map(GroupElement::matrix).collect();
        let mt = a0.len() - 1;
        let grid = build_from_path(path, &mats, &transports, mt)?;
        Self::from_grid(path.n(), mt, false, grid)
    }
}

/// Φ'(t_j) by fourth-order central differences (second-order one-sided at
/// the ends of an aperiodic row), with neighbours sign-aligned to Φ(t_j).
fn row_derivative(row: &[GroupElement], periodic: bool, mt: usize) -> Vec<Mat2> {
    let n = row.len() as i64;
    let h = 1.0 / mt as f64;
    (0..n)
        .map(|j| {
            let c = row[j as usize];
            let at = |k: i64| -> Mat2 {
                let idx = if periodic { k.rem_euclid(n) } else { k } as usize;
                row[idx].aligned_to(&c).matrix()
            };
            if periodic || (j >= 2 && j + 2 < n) {
                (at(j - 2) - at(j + 2) + (at(j + 1) - at(j - 1)).scale(8.0)).scale(1.0 / (12.0 * h))
            } else if j < 2 {
                (at(j).scale(-3.0) + at(j + 1).scale(4.0) - at(j + 2)).scale(0.5 / h)
            } else {
                (at(j).scale(3.0) - at(j - 1).scale(4.0) + at(j - 2)).scale(0.5 / h)
            }
        })
        .collect()
}

/// A(s_i,t) = a₀(t) + w(t)·Π₀(t)·V_i(t)·Π₀(t)⁻¹ with V_i = Σ_{k<i} U_k L_k U_k⁻¹,
/// U_{k+1} = U_k exp(W(t) L_k), L_k = log(g_k⁻¹ g_{k+1}), W = ∫w.
fn build_from_path(
    path: &GroupPath,
    a0: &[Mat2],
    pi0: &[Mat2],
    mt: usize,
) -> Result<Vec<LieElement>> {
    let g = path.samples();
    let mut incs = Vec::with_capacity(path.n());
    for k in 0..path.n() {
        let m = g[k].matrix().adj() * g[k + 1].matrix();
        let size = (m - Mat2::IDENTITY).norm();
        let l = m.log_unimodular().filter(|_| size < 1.0).ok_or(Error::StepTooLarge { index: k, size })?;
        let l = LieElement::new(l);
        let margin = l.nonpositive_margin();
        if margin < -1e-9 * (1.0 + l.norm()) {
            return Err(Error::NotNonpositive { index: k, margin });
        }
        incs.push(l.matrix());
    }
    let cols = a0.len();
    let ns = path.n();
    let columns: Vec<Vec<LieElement>> = (0..cols)
        .into_par_iter()
        .map(|j| {
            let t = j as f64 / mt as f64;
            let (w, big_w) = (PATH_BUMP.bump(t), PATH_BUMP.step(t));
            let p = pi0[j];
            let pinv = p.adj();
            let mut u = Mat2::IDENTITY;
            let mut v = Mat2::ZERO;
            let mut col = Vec::with_capacity(ns + 1);
            for i in 0..=ns {
                col.push(LieElement::new(a0[j] + (p * v * pinv).scale(w)));
                if i < ns {
                    let l = incs[i];
                    v = v + u * l * u.adj();
                    u = u * l.scale(big_w).exp_traceless();
                    u = u.scale(1.0 / u.det().sqrt());
                }
            }
            col
        })
        .collect();
    let mut grid = Vec::with_capacity((ns + 1) * cols);
    for i in 0..=ns {
        for col in &columns {
            grid.push(col[i]);
        }
    }
    Ok(grid)
}
