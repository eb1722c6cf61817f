//! Seeded property sweeps. Every suite returns a report with one [`Check`] per
//! property; a check passes when its worst case has a nonnegative margin.

use std::f64::consts::PI;

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::connections::{
    milnor_wood_cylinder, milnor_wood_pants, CylinderConnection, GaugeField, LoopConnection, PantsHolonomyData,
    SmoothStep,
};
use crate::cover::LiftedElement;
use crate::error::{Error, Result};
use crate::hyperdisc as hd;
use crate::mat2::Mat2;
use crate::paths::{
    elliptic_itinerary_path, hyperbolic_itinerary_path, is_nonnegative, three_classes_t, three_classes_triple,
    two_elliptic_g1, two_elliptic_trace, unit_path, unit_path_nonnegative, unit_path_nonnegative_ok, Direction,
    GroupPath, Schedule, TripleSign,
};
use crate::sl2core::{classify, cone_test, random_in_class_with, random_lie, ConjClass, GroupElement, LieElement, Tolerances};

pub const SUITES: [&str; 12] = [
    "quasimorphism",
    "parity",
    "krein",
    "three-classes",
    "two-elliptic",
    "unit-path",
    "cylinder-constructor",
    "milnor-wood",
    "gauge",
    "dehn-twist",
    "cover",
    "hyperdisc",
];

/// Extra suite run by `verify all` and the acceptance target but not a standalone criterion name.
pub const SHARPENED: &str = "sharpened";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub tol: Tolerances,
    /// Path resolution N.
    pub n: usize,
    /// Cylinder resolution for single-instance checks.
    pub ns: usize,
    pub mt: usize,
    /// Cylinder resolution for the Milnor–Wood sweep.
    pub sweep_res: usize,
    /// Multiplies every case count (1 = the full sweep).
    pub scale: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { seed: 0, tol: Tolerances::default(), n: 1000, ns: 256, mt: 256, sweep_res: 64, scale: 1.0 }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let t = self.tol;
        if !(t.class > 0.0 && t.eq > 0.0 && t.margin > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        if self.n < 16 || self.ns < 16 || self.mt < 16 || self.sweep_res < 16 {
            return Err(Error::InvalidParameter("resolutions must be at least 16".into()));
        }
        if !(self.scale > 0.0) {
            return Err(Error::InvalidParameter("scale must be positive".into()));
        }
        Ok(())
    }

    fn count(&self, full: usize) -> usize {
        ((full as f64 * self.scale).round() as usize).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub quantity: String,
    /// Worst observed value.
    pub value: f64,
    pub bound: f64,
    /// Worst margin; ≥ 0 means the bound holds.
    pub margin: f64,
    pub convention: String,
    /// Seed of the worst case.
    pub seed: u64,
    pub cases: usize,
    pub failures: usize,
    pub failing_seeds: Vec<u64>,
    pub errors: Vec<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub config: RunConfig,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl SuiteReport {
    fn new(suite: &str, config: &RunConfig, checks: Vec<Check>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        SuiteReport { suite: suite.into(), config: *config, checks, passed }
    }

    pub fn cases(&self) -> usize {
        self.checks.iter().map(|c| c.cases).sum()
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().map(|c| c.failures).sum()
    }

    pub fn csv_header() -> &'static str {
        "suite,quantity,value,bound,margin,cases,failures,seed,passed"
    }

    pub fn csv_rows(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                format!(
                    "{},{},{},{},{},{},{},{},{}",
                    self.suite,
                    c.quantity.replace(',', ";"),
                    c.value,
                    c.bound,
                    c.margin,
                    c.cases,
                    c.failures,
                    c.seed,
                    c.passed
                )
            })
            .collect()
    }
}

/// One case: the observed value and its margin against the bound.
#[derive(Debug, Clone, Copy)]
pub struct Case {
    pub value: f64,
    pub margin: f64,
    pub ok: bool,
}

impl Case {
    /// value ≤ bound.
    pub fn at_most(value: f64, bound: f64) -> Self {
        Case { value, margin: bound - value, ok: value <= bound }
    }

    /// value ≥ bound.
    pub fn at_least(value: f64, bound: f64) -> Self {
        Case { value, margin: value - bound, ok: value >= bound }
    }

    /// value < bound.
    pub fn below(value: f64, bound: f64) -> Self {
        Case { value, margin: bound - value, ok: value < bound }
    }

    /// value == expected, exactly.
    pub fn exact(value: f64, expected: f64) -> Self {
        Case { value, margin: -(value - expected).abs(), ok: value == expected }
    }

    pub fn flag(ok: bool) -> Self {
        Case { value: if ok { 0.0 } else { 1.0 }, margin: if ok { 0.0 } else { -1.0 }, ok }
    }
}

const MAX_LISTED: usize = 20;

/// Runs `f` on seeds base..base+n in parallel and aggregates in seed order.
pub fn sweep<F>(quantity: &str, bound: f64, convention: &str, base: u64, n: usize, f: F) -> Check
where
    F: Fn(&mut ChaCha8Rng) -> Result<Case> + Sync,
{
    let results: Vec<(u64, Result<Case>)> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let seed = base.wrapping_add(i);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (seed, f(&mut rng))
        })
        .collect();
    aggregate(quantity, bound, convention, results)
}

fn aggregate(quantity: &str, bound: f64, convention: &str, results: Vec<(u64, Result<Case>)>) -> Check {
    let cases = results.len();
    let mut worst: Option<(u64, Case)> = None;
    let mut failing_seeds = Vec::new();
    let mut errors = Vec::new();
    let mut failures = 0;
    for (seed, r) in results {
        match r {
            Ok(c) => {
                if !c.ok {
                    failures += 1;
                    if failing_seeds.len() < MAX_LISTED {
                        failing_seeds.push(seed);
                    }
                }
                if worst.is_none_or(|(_, w)| c.margin < w.margin) {
                    worst = Some((seed, c));
                }
            }
            Err(e) => {
                failures += 1;
                if failing_seeds.len() < MAX_LISTED {
                    failing_seeds.push(seed);
                }
                if errors.len() < MAX_LISTED {
                    errors.push(format!("seed {seed}: {e}"));
                }
            }
        }
    }
    let (seed, value, margin) = worst.map_or((0, 0.0, 0.0), |(s, c)| (s, c.value, c.margin));
    Check {
        quantity: quantity.into(),
        value,
        bound,
        margin,
        convention: convention.into(),
        seed,
        cases,
        failures,
        failing_seeds,
        errors,
        passed: failures == 0,
    }
}

/// A deterministic check on a single instance.
pub fn single(quantity: &str, bound: f64, convention: &str, seed: u64, r: Result<Case>) -> Check {
    aggregate(quantity, bound, convention, vec![(seed, r)])
}

pub fn run_suite(name: &str, config: &RunConfig) -> Result<SuiteReport> {
    config.validate()?;
    let checks = match name {
        "quasimorphism" => quasimorphism(config),
        "parity" => parity(config),
        SHARPENED => sharpened(config),
        "krein" => krein(config),
        "three-classes" => three_classes(config),
        "two-elliptic" => two_elliptic(config),
        "unit-path" => unit_path_suite(config),
        "cylinder-constructor" => cylinder_constructor(config),
        "milnor-wood" => milnor_wood(config),
        "gauge" => gauge(config),
        "dehn-twist" => dehn_twist(config),
        "cover" => cover(config),
        "hyperdisc" => hyperdisc(config),
        other => return Err(Error::UnknownSuite(other.into())),
    };
    Ok(SuiteReport::new(name, config, checks))
}

pub fn all_suites() -> Vec<&'static str> {
    let mut v = SUITES.to_vec();
    v.insert(2, SHARPENED);
    v
}

// ---------------------------------------------------------------- samplers

pub fn random_group<R: Rng>(rng: &mut R) -> GroupElement {
    GroupElement::exp(&random_lie(rng, 1.5))
}

pub fn random_lift<R: Rng>(rng: &mut R) -> LiftedElement {
    let g = random_group(rng);
    LiftedElement::near(g, rng.gen_range(-3.0 * PI..3.0 * PI))
}

fn random_hyperbolic<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> GroupElement {
    random_in_class_with(&ConjClass::Hyperbolic { lambda: rng.gen_range(lo..hi) }, rng)
}

fn random_elliptic_lift<R: Rng>(rng: &mut R) -> LiftedElement {
    let g = random_in_class_with(&ConjClass::Elliptic { theta: rng.gen_range(0.05..PI - 0.05) }, rng);
    LiftedElement::near(g, rng.gen_range(-3.0 * PI..3.0 * PI))
}

/// A Lie element with cone margin at least `margin`.
pub fn random_positive<R: Rng>(rng: &mut R, scale: f64, margin: f64) -> LieElement {
    let r = scale * rng.gen::<f64>();
    let phi = rng.gen_range(0.0..2.0 * PI);
    LieElement::from_coords(r + margin + scale * rng.gen::<f64>(), r * phi.cos(), r * phi.sin())
}

fn is_hyperbolic(g: &GroupElement, tau: f64) -> bool {
    matches!(classify(g, tau), Ok(ConjClass::Hyperbolic { .. }))
}

// ---------------------------------------------------------------- cover

fn quasimorphism(cfg: &RunConfig) -> Vec<Check> {
    let s = cfg.seed;
    vec![
        sweep("|rot(g1 g2) - rot(g1) - rot(g2)|", 1.0 + 1e-6, "lifts anchored at a random sheet", s, cfg.count(10_000), |rng| {
            let (a, b) = (random_lift(rng), random_lift(rng));
            let d = a.compose(&b).rot() - a.rot() - b.rot();
            Ok(Case::at_most(d.abs(), 1.0 + 1e-6))
        }),
        sweep("|rot(g^k) - k rot(g)|, k<=8", 1e-6, "", s, cfg.count(1000), |rng| {
            let g = random_lift(rng);
            let k = rng.gen_range(1..=8);
            Ok(Case::at_most((g.pow(k).rot() - k as f64 * g.rot()).abs(), 1e-6))
        }),
        sweep("|rot(h g h^-1) - rot(g)|", 1e-6, "", s, cfg.count(1000), |rng| {
            let g = random_lift(rng);
            let h = random_group(rng);
            Ok(Case::at_most((g.conj(&h).rot() - g.rot()).abs(), 1e-6))
        }),
        sweep("|rot(g) - iterated rot, k=64|", 3.0 / 64.0, "translation limit at x=0", s, cfg.count(1000), |rng| {
            let g = random_lift(rng);
            Ok(Case::at_most((g.rot() - g.rot_iterative(64)).abs(), 3.0 / 64.0))
        }),
    ]
}

/// Distance of rot from the parity band edges and the trace sign it predicts.
pub fn parity_band(rot: f64) -> (f64, f64) {
    let m = rot - 2.0 * ((rot + 0.5) / 2.0).floor();
    let edge = [-0.5, 0.5, 1.5].iter().map(|e| (m - e).abs()).fold(f64::INFINITY, f64::min);
    (edge, if m < 0.5 { 1.0 } else { -1.0 })
}

fn parity(cfg: &RunConfig) -> Vec<Check> {
    vec![sweep(
        "trace sign vs rot band",
        0.0,
        "margin = distance of rot from the nearest band edge; edge cases within 1e-9 are skipped",
        cfg.seed,
        cfg.count(10_000),
        |rng| {
            let g = if rng.gen_bool(0.5) {
                random_elliptic_lift(rng)
            } else {
                let h = random_hyperbolic(rng, 1.05, 5.0);
                LiftedElement::near(h, rng.gen_range(-3.0 * PI..3.0 * PI))
            };
            let (edge, want) = parity_band(g.rot());
            if edge < 1e-9 {
                return Ok(Case { value: edge, margin: 0.0, ok: true });
            }
            let tr = g.sl2_rep()?.trace();
            Ok(if tr.signum() == want { Case::at_least(edge, 0.0) } else { Case { value: edge, margin: -edge, ok: false } })
        },
    )]
}

fn triple_sum(x: &LiftedElement, y: &LiftedElement) -> f64 {
    let z = x.compose(y).inverse();
    x.rot() + y.rot() + z.rot()
}

fn sharpened(cfg: &RunConfig) -> Vec<Check> {
    let s = cfg.seed;
    let n = cfg.count(1000);
    vec![
        sweep("|sum rot| with an elliptic member", 1.0, "g0 g1 g2 = 1; strict", s, n, |rng| {
            let e = random_elliptic_lift(rng);
            let o = random_lift(rng);
            let sum = if rng.gen_bool(0.5) { triple_sum(&e, &o) } else { triple_sum(&o, &e) };
            Ok(Case::below(sum.abs(), 1.0))
        }),
        sweep("sum rot with a nonnegative parabolic member", 1e-6, "g0 g1 g2 = 1", s, n, |rng| {
            let p = random_in_class_with(&ConjClass::ParabolicNonneg, rng);
            let p = LiftedElement::near(p, rng.gen_range(-3.0 * PI..3.0 * PI));
            let o = random_lift(rng);
            let sum = if rng.gen_bool(0.5) { triple_sum(&p, &o) } else { triple_sum(&o, &p) };
            Ok(Case::at_most(sum, 1e-6))
        }),
        sweep("sum rot with a nonpositive parabolic member", -1e-6, "g0 g1 g2 = 1", s, n, |rng| {
            let p = random_in_class_with(&ConjClass::ParabolicNonpos, rng);
            let p = LiftedElement::near(p, rng.gen_range(-3.0 * PI..3.0 * PI));
            let o = random_lift(rng);
            let sum = if rng.gen_bool(0.5) { triple_sum(&p, &o) } else { triple_sum(&o, &p) };
            Ok(Case::at_least(sum, -1e-6))
        }),
    ]
}

// ---------------------------------------------------------------- paths

fn krein(cfg: &RunConfig) -> Vec<Check> {
    let s = cfg.seed;
    let n = cfg.n;
    let paths = cfg.count(16);
    let elliptic = |rng: &mut ChaCha8Rng| -> Result<(GroupPath, Schedule)> {
        let a = rng.gen_range(0.1..1.5);
        let b = rng.gen_range(a..PI - 0.1);
        let sched = Schedule::linear(a, b);
        let g0 = random_in_class_with(&ConjClass::Elliptic { theta: a }, rng);
        Ok((elliptic_itinerary_path(&sched, &g0, n)?, sched))
    };
    let hyperbolic = |rng: &mut ChaCha8Rng| -> Result<(GroupPath, Schedule)> {
        let a = rng.gen_range(1.2..2.5);
        let b = rng.gen_range(a..4.0);
        let sched = Schedule::linear(a, b);
        let g0 = random_in_class_with(&ConjClass::Hyperbolic { lambda: a }, rng);
        let g0 = if rng.gen_bool(0.5) { g0 } else { g0.neg() };
        let dir = if g0.trace() > 0.0 { Direction::Plus } else { Direction::Minus };
        Ok((hyperbolic_itinerary_path(&sched, dir, &g0, n, 1e-3)?, sched))
    };
    let theta_err = move |p: &GroupPath, sched: &Schedule| -> Result<f64> {
        let mut err: f64 = 0.0;
        for (i, g) in p.samples().iter().enumerate() {
            let want = sched.value(i as f64 / n as f64);
            match classify(g, 1e-9)? {
                ConjClass::Elliptic { theta } => err = err.max((theta - want).abs()),
                ConjClass::Hyperbolic { lambda } => err = err.max((lambda - want).abs()),
                other => return Err(Error::ItineraryViolation { index: i, reason: other.name() }),
            }
        }
        Ok(err)
    };
    vec![
        sweep("elliptic itinerary |theta(t) - prescribed|", 1e-5, "N nodes", s, paths, |rng| {
            let (p, sched) = elliptic(rng)?;
            Ok(Case::at_most(theta_err(&p, &sched)?, 1e-5))
        }),
        sweep("elliptic itinerary cocycle cone margin", -1e-8, "", s, paths, |rng| {
            let (p, _) = elliptic(rng)?;
            Ok(Case::at_least(is_nonnegative(&p, 1e-8)?.min_cone_margin, -1e-8))
        }),
        sweep("recovered theta step (Krein monotonicity)", -1e-9, "min over nodes of theta(t_i+1) - theta(t_i)", s, paths, |rng| {
            let (p, _) = elliptic(rng)?;
            let th: Vec<f64> = p
                .samples()
                .iter()
                .map(|g| match classify(g, 1e-9) {
                    Ok(ConjClass::Elliptic { theta }) => theta,
                    _ => f64::NAN,
                })
                .collect();
            let min = th.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
            Ok(Case::at_least(min, -1e-9))
        }),
        sweep("hyperbolic itinerary |lambda(t) - prescribed|", 1e-5, "N nodes", s, paths, |rng| {
            let (p, sched) = hyperbolic(rng)?;
            Ok(Case::at_most(theta_err(&p, &sched)?, 1e-5))
        }),
        sweep("hyperbolic itinerary cocycle cone margin", -1e-8, "eta = 1e-3 sqrt(r)", s, paths, |rng| {
            let (p, _) = hyperbolic(rng)?;
            Ok(Case::at_least(is_nonnegative(&p, 1e-8)?.min_cone_margin, -1e-8))
        }),
        sweep("product of nonnegative paths, cone margin", -1e-6, "pointwise product, N=200", s, cfg.count(1000), |rng| {
            let mk = |rng: &mut ChaCha8Rng| {
                let g0 = random_group(rng);
                let x = random_positive(rng, 1.0, 0.0);
                GroupPath::from_fn(200, move |t| GroupElement::exp(&x.scale(t)) * g0, "")
            };
            let p = mk(rng)?.product(&mk(rng)?)?;
            Ok(Case::at_least(is_nonnegative(&p, 1e-6)?.min_cone_margin, -1e-6))
        }),
    ]
}

fn three_classes(cfg: &RunConfig) -> Vec<Check> {
    let s = cfg.seed;
    let grid = |i: usize| 1.2 + 0.7 * i as f64;
    let triples: Vec<(f64, f64, f64)> = (0..125).map(|k| (grid(k / 25), grid(k / 5 % 5), grid(k % 5))).collect();
    let grid_check = |quantity: &str, f: &(dyn Fn(f64, f64, f64) -> Result<Case> + Sync)| {
        let results = triples.par_iter().map(|&(a, b, c)| (s, f(a, b, c))).collect();
        aggregate(quantity, 0.0, "lambda grid 1.2..4 in 5 steps", results)
    };
    let tc2 = three_classes_triple(2.0, 2.0, 2.0, TripleSign::Minus);
    vec![
        single("t at lambda=2", 4.5, "closed form", s, Ok(Case::exact(three_classes_t(2.0, 2.0, 2.0), 4.5))),
        single(
            "classify(g1 g2) vs Hyperbolic(2)",
            1e-9,
            "",
            s,
            tc2.as_ref().map_err(Clone::clone).and_then(|tc| match classify(&(tc.g1 * tc.g2), 1e-9)? {
                ConjClass::Hyperbolic { lambda } => Ok(Case::at_most((lambda - 2.0).abs(), 1e-9)),
                other => Err(Error::InvalidParameter(other.name())),
            }),
        ),
        single("lift defect at lambda=2", -1.0, "minus sign", s, tc2.map(|tc| Case::exact(tc.defect as f64, -1.0))),
        single(
            "lift defect, plus sign",
            1.0,
            "plus sign",
            s,
            three_classes_triple(2.0, 2.0, 2.0, TripleSign::Plus).map(|tc| Case::exact(tc.defect as f64, 1.0)),
        ),
        grid_check("|lambda(g1 g2) - lambda0|", &|a, b, c| {
            let tc = three_classes_triple(a, b, c, TripleSign::Minus)?;
            match classify(&(tc.g1 * tc.g2), 1e-9)? {
                ConjClass::Hyperbolic { lambda } => Ok(Case::at_most((lambda - a).abs(), 1e-9 * a)),
                other => Err(Error::InvalidParameter(other.name())),
            }
        }),
        grid_check("lift defect over the grid", &|a, b, c| {
            Ok(Case::exact(three_classes_triple(a, b, c, TripleSign::Minus)?.defect as f64, -1.0))
        }),
        single(
            "lift defect near lambda1=lambda2=1",
            -1.0,
            "lambda1 = lambda2 = 1.001",
            s,
            three_classes_triple(2.0, 1.001, 1.001, TripleSign::Minus).map(|tc| Case::exact(tc.defect as f64, -1.0)),
        ),
    ]
}

fn two_elliptic(cfg: &RunConfig) -> Vec<Check> {
    let s = cfg.seed;
    let n = cfg.count(1000);
    vec![
        sweep("|formula - trace of product| / max(1, |trace|)", 1e-10, "g2 = standard rotation", s, n, |rng| {
            let (t1, t2) = (rng.gen_range(0.01..PI - 0.01), rng.gen_range(0.01..PI - 0.01));
            let w = C::from_polar(0.95 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI));
            let direct = (two_elliptic_g1(t1, w) * GroupElement::rotation(t2)).trace();
            let f = two_elliptic_trace(t1, t2, w);
            Ok(Case::at_most((f - direct).abs() / direct.abs().max(1.0), 1e-10))
        }),
        sweep("|value at w=0 - 2cos(theta1+theta2)|", 1e-12, "", s, n, |rng| {
            let (t1, t2) = (rng.gen_range(0.01..PI - 0.01), rng.gen_range(0.01..PI - 0.01));
            let f = two_elliptic_trace(t1, t2, C::new(0.0, 0.0));
            Ok(Case::at_most((f - 2.0 * (t1 + t2).cos()).abs(), 1e-12))
        }),
        sweep("value at w minus value at 0", 0.0, "supremum attained at w=0", s, n, |rng| {
            let (t1, t2) = (rng.gen_range(0.01..PI - 0.01), rng.gen_range(0.01..PI - 0.01));
            let w = C::from_polar(0.99 * rng.gen::<f64>(), rng.gen_range(0.0..2.0 * PI));
            let d = two_elliptic_trace(t1, t2, w) - two_elliptic_trace(t1, t2, C::new(0.0, 0.0));
            Ok(Case::at_most(d, 1e-12))
        }),
        single(
            "value at 1-|w|=1e-7, theta=pi/2",
            -1e6,
            "",
            s,
            Ok(Case::at_most(two_elliptic_trace(PI / 2.0, PI / 2.0, C::new(1.0 - 1e-7, 0.0)), -1e6)),
        ),
    ]
}

fn unit_path_suite(cfg: &RunConfig) -> Vec<Check> {
    let s = cfg.seed;
    let n = cfg.n.max(2000);
    let up = unit_path(2.0, 2.0, n);
    let get = |f: &dyn Fn(&crate::paths::UnitPathReport) -> Case| up.as_ref().map(|u| f(&u.report)).map_err(Clone::clone);
    let conv = "lambda = lambda_target = 2";
    vec![
        single("trace identity residual", 1e-6, conv, s, get(&|r| Case::at_most(r.max_trace_residual, 1e-6))),
        single("min p(t)s(t)", 0.0, conv, s, get(&|r| Case { value: r.min_ps, margin: r.min_ps, ok: r.min_ps > 0.0 })),
        single("trace(g1(1))", -2.5, conv, s, get(&|r| Case::at_most((r.end_trace + 2.5).abs(), 1e-9))),
        single(
            "k(1) hyperbolic",
            0.0,
            conv,
            s,
            get(&|r| Case::flag(r.k_end_class.map(|c| c.kind()) == Some(crate::sl2core::ClassKind::Hyperbolic))),
        ),
        single("rot of k lift", 0.0, conv, s, get(&|r| Case::exact(r.k_rot, 0.0))),
        single("rot gained by g1", 1.0, conv, s, get(&|r| Case::exact(r.g1_rot_gain, 1.0))),
        single(
            "segment A endpoint ParabolicNonneg",
            0.0,
            conv,
            s,
            get(&|r| Case::flag(r.segment_a_end_class == Some(ConjClass::ParabolicNonneg))),
        ),
        single(
            "nonnegative realization",
            0.0,
            "itinerary composition",
            s,
            unit_path_nonnegative(2.0, n).and_then(|p| unit_path_nonnegative_ok(&p, 2.0)).map(Case::flag),
        ),
    ]
}

// ---------------------------------------------------------------- connections

/// A boundary loop with hyperbolic holonomy g₀ and the nonpositive path
/// g(s) = g₀·exp(−s x₁)·exp(−s x₂) starting at that holonomy, with hyperbolic
/// endpoint. `reach` bounds |x₁|; large values let the path wind through elliptic classes.
pub fn random_cylinder_input(
    rng: &mut ChaCha8Rng,
    ns: usize,
    mt: usize,
    reach: f64,
) -> Result<(GroupPath, LoopConnection)> {
    for _ in 0..64 {
        let g = random_hyperbolic(rng, 1.5, 4.0);
        let g = if rng.gen_bool(0.5) { g } else { g.neg() };
        let a0 = LoopConnection::with_holonomy(&g, rng.gen_range(-2..=2), mt)?;
        let g0 = a0.holonomy();
        let (x1, x2) = (random_positive(rng, reach, 0.02), random_positive(rng, 0.3, 0.02));
        let path = match GroupPath::from_fn(
            ns,
            |s| g0 * GroupElement::exp(&x1.scale(-s)) * GroupElement::exp(&x2.scale(-s)),
            "g0 exp(-s x1) exp(-s x2)",
        ) {
            Err(Error::UnderSampled { .. }) => continue,
            other => other?,
        };
        if is_hyperbolic(&path.end(), 1e-6) {
            return Ok((path, a0));
        }
    }
    Err(Error::InvalidParameter("no hyperbolic sample found".into()))
}

fn cylinder_constructor(cfg: &RunConfig) -> Vec<Check> {
    let s = cfg.seed;
    let mut rng = ChaCha8Rng::seed_from_u64(s);
    let built = random_cylinder_input(&mut rng, cfg.ns, cfg.mt, 1.0)
        .and_then(|(p, a0)| Ok((CylinderConnection::from_nonpositive_path(&p, &a0)?, p)));
    let res = format!("Ns={} Mt={}", cfg.ns, cfg.mt);
    let (err, margin) = match &built {
        Ok((c, p)) => {
            let e = (0..=cfg.ns)
                .into_par_iter()
                .map(|i| c.holonomy_loop(i).dist(&p.samples()[i]))
                .reduce(|| 0.0, f64::max);
            (Ok(Case::at_most(e, 1e-5)), Ok(Case::at_least(c.min_curvature_margin(), -1e-8)))
        }
        Err(e) => (Err(e.clone()), Err(e.clone())),
    };
    let square = {
        let x = LieElement::new(Mat2::new(0.2, 0.5, 0.1, -0.2));
        let g0 = GroupElement::exp(&x);
        let gam = LieElement::from_coords(0.4, -0.1, 0.2);
        let m = cfg.ns.min(128);
        GroupPath::from_fn(m, |t| GroupElement::exp(&gam.scale(-t)) * g0, "").and_then(|p| {
            let c = CylinderConnection::from_nonpositive_path_square(&p, &vec![x; m + 1])?;
            let e = (0..=m).map(|i| c.holonomy_loop(i).dist(&p.samples()[i])).fold(0.0, f64::max);
            Ok(Case::at_most(e, 1e-5))
        })
    };
    vec![
        single("max_s |holonomy(s) - g(s)|", 1e-5, &res, s, err),
        single("min curvature cone margin", -1e-8, &res, s, margin),
        single("square variant: max |transport(s) - g(s)|", 1e-5, "aperiodic", s, square),
    ]
}

fn milnor_wood(cfg: &RunConfig) -> Vec<Check> {
    let s = cfg.seed;
    let res = cfg.sweep_res;
    let n = cfg.count(2000);
    let results: Vec<(u64, Result<Case>)> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let seed = s.wrapping_add(i);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let case = (|| {
                let (p, a0) = random_cylinder_input(&mut rng, res, res, 3.0)?;
                let c = CylinderConnection::from_nonpositive_path(&p, &a0)?;
                let rep = milnor_wood_cylinder(&c, cfg.tol.margin.max(1e-8))?;
                if !rep.hypothesis_ok {
                    return Err(Error::InvalidParameter("hypothesis not met".into()));
                }
                Ok(Case { value: rep.value, margin: rep.margin, ok: rep.passed })
            })();
            (seed, case)
        })
        .collect();
    let winding = results.iter().filter(|(_, r)| matches!(r, Ok(c) if c.value <= -1.0)).count();
    let conv = crate::connections::BOUNDARY_CONVENTION;
    let cyl = aggregate("rot_boundary on nonnegatively curved cylinders", 0.0, conv, results);
    let nontrivial = single(
        "instances with rot_boundary <= -1",
        1.0,
        &format!("out of {n}; guards against a sweep that never winds"),
        s,
        Ok(Case::at_least(winding as f64, 1.0)),
    );
    let pants = sweep(
        "|rot sum| on flat pants tuples",
        1.0,
        crate::connections::PANTS_CONVENTION,
        s,
        cfg.count(1000),
        |rng| {
            for _ in 0..32 {
                let a = LiftedElement::near(random_hyperbolic(rng, 1.1, 4.0), rng.gen_range(-3.0 * PI..3.0 * PI));
                let b = LiftedElement::near(random_hyperbolic(rng, 1.1, 4.0), rng.gen_range(-3.0 * PI..3.0 * PI));
                let data = PantsHolonomyData::from_product(vec![a, b]);
                let rep = milnor_wood_pants(&data, true);
                if rep.hypothesis_ok {
                    return Ok(Case { value: rep.value.abs(), margin: rep.margin, ok: rep.passed });
                }
            }
            Err(Error::InvalidParameter("no hyperbolic product found".into()))
        },
    );
    let flat = single(
        "rot_boundary of a flat cylinder",
        0.0,
        crate::connections::BOUNDARY_CONVENTION,
        s,
        LoopConnection::spiral(1, LieElement::new(Mat2::diag(0.3, -0.3)), 64)
            .and_then(|a| CylinderConnection::pullback_flat(&a, 32))
            .and_then(|c| Ok(Case::exact(c.rot_boundary()?.value, 0.0))),
    );
    vec![cyl, nontrivial, pants, flat]
}

fn flat_hyperbolic_cylinder(r: i64, m: usize, ns: usize) -> Result<CylinderConnection> {
    CylinderConnection::pullback_flat(&LoopConnection::spiral(r, LieElement::new(Mat2::diag(0.3, -0.3)), m)?, ns)
}

fn gauge(cfg: &RunConfig) -> Vec<Check> {
    let s = cfg.seed;
    let (ns, mt) = (256, 64);
    let beta = SmoothStep::new(0.2, 0.8);
    let field = move |rng: &mut ChaCha8Rng| {
        let n = rng.gen_range(-3i64..=3);
        let x = random_lie(rng, 0.5);
        let freq = rng.gen_range(1..=3) as f64;
        let h = GroupElement::exp(&random_lie(rng, 0.5));
        let phi = GaugeField::from_fn(ns, mt, true, move |s, t| {
            let bump = beta.step(s) * (1.0 - beta.step(s)) * (2.0 * PI * freq * t).sin();
            h * GroupElement::rotation(n as f64 * PI * beta.step(s)) * GroupElement::exp(&x.scale(bump))
        });
        (n, phi)
    };
    vec![
        sweep("rot_c shift minus winding of the gauge along c", 0.0, "flat hyperbolic cylinder", s, cfg.count(100), |rng| {
            let c = flat_hyperbolic_cylinder(rng.gen_range(-2..=2), mt, ns)?;
            let (n, phi) = field(rng);
            let d = c.gauge(&phi)?;
            let shift = d.rot_c_integer()? - c.rot_c_integer()?;
            Ok(Case::exact((shift - n) as f64, 0.0))
        }),
        sweep("rot_boundary change under gauge", 0.0, crate::connections::BOUNDARY_CONVENTION, s, cfg.count(100), |rng| {
            let (p, a0) = random_cylinder_input(rng, ns, mt, 0.3)?;
            let c = CylinderConnection::from_nonpositive_path(&p, &a0)?;
            let (_, phi) = field(rng);
            let d = c.gauge(&phi)?;
            Ok(Case::exact(d.rot_boundary()?.value - c.rot_boundary()?.value, 0.0))
        }),
        sweep("|curvature margin change| under constant gauge", 1e-7, "", s, cfg.count(100), |rng| {
            let (p, a0) = random_cylinder_input(rng, ns, mt, 0.3)?;
            let c = CylinderConnection::from_nonpositive_path(&p, &a0)?;
            let h = random_group(rng);
            let d = c.gauge(&GaugeField::from_fn(ns, mt, true, |_, _| h))?;
            let rel = (d.min_curvature_margin() - c.min_curvature_margin()).abs();
            Ok(Case::at_most(rel, 1e-7))
        }),
    ]
}

fn dehn_twist(cfg: &RunConfig) -> Vec<Check> {
    let s = cfg.seed;
    let mut checks = Vec::new();
    for r in 0..=4i64 {
        let run = || -> Result<(f64, f64)> {
            let a = LoopConnection::spiral(1, LieElement::new(Mat2::diag(0.3, -0.3)), 32)?;
            let a = if r == 0 { LoopConnection::spiral(0, LieElement::new(Mat2::diag(0.3, -0.3)), 64)? } else { a.cover(r)? };
            let c = CylinderConnection::pullback_flat(&a, 32)?;
            let once = c.dehn_twist()?;
            let twice = once.dehn_twist()?;
            let base = c.rot_c_integer()?;
            Ok(((once.rot_c_integer()? - base) as f64, (twice.rot_c_integer()? - base) as f64))
        };
        let res = run();
        checks.push(single(
            &format!("rot_c change after one twist, r={r}"),
            -r as f64,
            "pullback by (s, t - beta(s))",
            s,
            res.clone().map(|(a, _)| Case::exact(a, -r as f64)),
        ));
        checks.push(single(
            &format!("rot_c change after two twists, r={r}"),
            -2.0 * r as f64,
            "pullback by (s, t - beta(s))",
            s,
            res.map(|(_, b)| Case::exact(b, -2.0 * r as f64)),
        ));
    }
    checks.push(sweep("twisted curved cylinder: rot_boundary change", 0.0, "", s, cfg.count(8), |rng| {
        let (p, a0) = random_cylinder_input(rng, 32, 64, 1.0)?;
        let c = CylinderConnection::from_nonpositive_path(&p, &a0)?;
        let d = c.dehn_twist()?;
        Ok(Case::exact(d.rot_boundary()?.value - c.rot_boundary()?.value, 0.0))
    }));
    checks
}

fn cover(cfg: &RunConfig) -> Vec<Check> {
    let s = cfg.seed;
    vec![
        sweep("|rot(a^mu) - mu rot(a)|, mu in -3..3", 1e-6, "a^mu_t = mu a_(mu t)", s, cfg.count(50), |rng| {
            let x = random_lie(rng, 0.6);
            let r = rng.gen_range(-2..=2);
            let a = LoopConnection::spiral(r, x, 64)?;
            let mut worst: f64 = 0.0;
            for mu in [-3i64, -2, -1, 1, 2, 3] {
                worst = worst.max((a.cover(mu)?.rot() - mu as f64 * a.rot()).abs());
            }
            Ok(Case::at_most(worst, 1e-6))
        }),
        sweep("fractional rotation: rot_c - k mod r", 0.0, "radial framing offset k/r", s, cfg.count(20), |rng| {
            let r = rng.gen_range(1..=4u32);
            let k = rng.gen_range(0..r as i64);
            let a = LoopConnection::spiral(1, LieElement::new(Mat2::diag(0.3, -0.3)), 16)?.cover(r as i64)?;
            let c = CylinderConnection::fractional_rotation(&a, k, r, 16)?;
            Ok(Case::exact((c.rot_c_integer()? - k).rem_euclid(r as i64) as f64, 0.0))
        }),
    ]
}

// ---------------------------------------------------------------- disc

/// Poisson defects at h, h/2, h/4 and the fitted order.
pub fn poisson_richardson(h: f64) -> (f64, [f64; 3]) {
    let a = hd::DiscLieElement::new(1.0, C::new(0.0, 0.0));
    let b = hd::DiscLieElement::new(0.0, C::new(1.0, 0.0));
    let w = C::new(0.2, 0.1);
    let d = [h, h / 2.0, h / 4.0].map(|h| hd::poisson_defect(&a, &b, w, h));
    ((d[0] / d[1]).log2() * 0.5 + (d[1] / d[2]).log2() * 0.5, d)
}

fn hyperdisc(cfg: &RunConfig) -> Vec<Check> {
    let s = cfg.seed;
    let (slope, defects) = poisson_richardson(4e-3);
    vec![
        sweep("cone_test vs alpha >= |beta| - 1e-9", 0.0, "Cayley K = [[1,-i],[1,i]] after diag(1,-1)", s, cfg.count(1000), |rng| {
            let x = random_lie(rng, 1.0);
            let d = hd::cayley_lie(&x);
            Ok(Case::flag(cone_test(&x, cfg.tol.margin).is_nonnegative() == d.in_cone(1e-9)))
        }),
        sweep("cayley(gh) vs cayley(g)cayley(h)", 1e-10, "modulo sign", s, cfg.count(1000), |rng| {
            let (g, h) = (random_group(rng), random_group(rng));
            let d = hd::cayley(&(g * h)).dist(&hd::cayley(&g).compose(&hd::cayley(&h)));
            let tr = (hd::cayley(&g).trace().abs() - g.trace().abs()).abs();
            Ok(Case::at_most(d.max(tr), 1e-10))
        }),
        sweep("min H on 10^3 disc points, cone elements", 0.0, "", s, cfg.count(100), |rng| {
            let b = C::from_polar(rng.gen::<f64>(), rng.gen_range(0.0..2.0 * PI));
            let g = hd::DiscLieElement::new(b.norm() * (1.0 + rng.gen::<f64>()), b);
            let mut min = f64::INFINITY;
            for _ in 0..1000 {
                let w = C::from_polar(0.999 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI));
                min = min.min(hd::hamiltonian(&g, w));
            }
            Ok(Case::at_least(min, -1e-12))
        }),
        sweep("|d/dt mobius(exp(t gamma), w) - X(w)|", 1e-6, "central difference, step 1e-5", s, cfg.count(1000), |rng| {
            let g = hd::cayley_lie(&random_lie(rng, 1.0));
            let w = C::from_polar(0.9 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI));
            let h = 1e-5;
            let fd = (hd::mobius(&hd::disc_exp(&g, h), w) - hd::mobius(&hd::disc_exp(&g, -h), w)) / (2.0 * h);
            Ok(Case::at_most((fd - hd::vector_field(&g, w)).norm(), 1e-6))
        }),
        sweep("dH vs omega(X, .) with sigma=-1", 1e-5, "omega = sigma (1-|w|^2)^-2 dx^dy", s, cfg.count(1000), |rng| {
            let g = hd::cayley_lie(&random_lie(rng, 1.0));
            let w = C::from_polar(0.8 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI));
            Ok(Case::at_most(hd::hamiltonian_field_defect(&g, w, 1e-4, hd::symplectic_sign()), 1e-5))
        }),
        single(
            "Poisson defect at h=1e-3",
            1e-5,
            "alpha=1 and beta=1 elements at w=0.2+0.1i",
            s,
            Ok(Case::at_most(
                hd::poisson_defect(
                    &hd::DiscLieElement::new(1.0, C::new(0.0, 0.0)),
                    &hd::DiscLieElement::new(0.0, C::new(1.0, 0.0)),
                    C::new(0.2, 0.1),
                    1e-3,
                ),
                1e-5,
            )),
        ),
        single(
            "|Richardson order - 2|",
            0.2,
            &format!("defects {:e}, {:e}, {:e} at h=4e-3,2e-3,1e-3", defects[0], defects[1], defects[2]),
            s,
            Ok(Case::at_most((slope - 2.0).abs(), 0.2)),
        ),
        sweep("isometry |dist(gw1, gw2) - dist(w1, w2)|", 1e-9, "curvature -4", s, cfg.count(1000), |rng| {
            let g = hd::cayley(&random_group(rng));
            let mut pt = || C::from_polar(0.9 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI));
            let (w1, w2) = (pt(), pt());
            let d = (hd::dist_hyp(hd::mobius(&g, w1), hd::mobius(&g, w2)) - hd::dist_hyp(w1, w2)).abs();
            Ok(Case::at_most(d, 1e-9))
        }),
        sweep("|sinh d(p,q) - sin(theta) sinh 2d(p,w)|", 1e-10, "q = rotation of p by 2 theta about w", s, cfg.count(100), |rng| {
            let th = rng.gen_range(0.05..PI - 0.05);
            let c = random_group(rng);
            let g = hd::cayley(&GroupElement::rotation(th).conj(&c));
            let w = hd::mobius(&hd::cayley(&c), C::new(0.0, 0.0));
            let p = C::from_polar(0.8 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI));
            let q = hd::mobius(&g, p);
            let lhs = hd::dist_hyp(p, q).sinh();
            let rhs = th.sin() * (2.0 * hd::dist_hyp(p, w)).sinh();
            Ok(Case::at_most((lhs - rhs).abs() / rhs.max(1.0), 1e-10))
        }),
        single(
            "hyp_cylinder_max_length(e) - pi/2",
            1e-12,
            "",
            s,
            Ok(Case::at_most((hd::hyp_cylinder_max_length(std::f64::consts::E) - PI / 2.0).abs(), 1e-12)),
        ),
        single(
            "elliptic_cylinder_radius_bound(pi/2, pi/2) - 1/2",
            1e-12,
            "",
            s,
            Ok(Case::at_most((hd::elliptic_cylinder_radius_bound(PI / 2.0, PI / 2.0) - 0.5).abs(), 1e-12)),
        ),
    ]
}
