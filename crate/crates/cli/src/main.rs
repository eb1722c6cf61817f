use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sl2rotor::cover::act_angle;
use sl2rotor::io::{encode_f64, parse_matrix, Artifact};
use sl2rotor::paths::{
    elliptic_itinerary_path, hyperbolic_itinerary_path, is_nonnegative, spiral_path, unit_path, unit_path_nonnegative, Direction, Schedule,
};
use sl2rotor::verify::{all_suites, run_suite, SuiteReport};
use sl2rotor::{
    classify, cone_test, CylinderConnection, Error, GroupElement, LieElement, LiftedElement, LoopConnection, Mat2,
    GroupPath, RunConfig, Tolerances,
};

#[derive(Parser)]
#[command(name = "sl2rotor", version, about = "Rotation numbers, nonnegative paths and curved connections for PSL(2,R)")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Base seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Classification band for `classify`, cone margin for `check` and `verify`.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Grid resolution: Ns = Mt for `verify`, N or M for `build`.
    #[arg(long, global = true)]
    res: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report or artifact here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Conjugacy class, trace, T and cone data of a matrix such as "[[2,0],[0,0.5]]".
    Classify { matrix: String },
    /// Rotation number of a lift, given by its matrix and the value of the lift at 0.
    Rot {
        matrix: String,
        #[arg(long, allow_hyphen_values = true)]
        anchor: Option<f64>,
    },
    /// Run a property sweep: one of the suite names, or `all`.
    Verify {
        suite: String,
        /// Fraction of the default case counts.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
    /// Construct an artifact and write it as JSON.
    Build {
        /// Emit paths traversed backwards, t -> g(1 - t), which turns nonnegative into nonpositive.
        #[arg(long)]
        reversed: bool,
        #[command(subcommand)]
        kind: BuildKind,
    },
    /// Load an artifact, re-verify it and report its invariants.
    Check {
        file: PathBuf,
        /// Fail unless the path cocycle / connection curvature has this sign.
        #[arg(long, value_enum)]
        require: Option<Requirement>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Requirement {
    Nonnegative,
    Nonpositive,
    Flat,
}

#[derive(Subcommand)]
enum BuildKind {
    /// R(r pi t) exp(t gamma).
    SpiralPath {
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long, default_value = "[[0,0],[0,0]]")]
        gamma: String,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Nonnegative path through Elliptic(theta(t)), theta linear.
    EllipticPath {
        #[arg(long)]
        theta0: f64,
        #[arg(long)]
        theta1: f64,
        /// Start point; defaults to the rotation by theta0.
        #[arg(long)]
        g0: Option<String>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Nonnegative path through Hyperbolic(lambda(t)), lambda linear.
    HyperbolicPath {
        #[arg(long)]
        lambda0: f64,
        #[arg(long)]
        lambda1: f64,
        /// Start point; defaults to diag(lambda0, 1/lambda0).
        #[arg(long)]
        g0: Option<String>,
        #[arg(long, value_enum)]
        direction: Option<Dir>,
        #[arg(long, default_value_t = 1e-3)]
        eta: f64,
        #[arg(long)]
        n: Option<usize>,
    },
    /// The g1 path (or the conjugator k) of the unit-path construction.
    UnitPath {
        #[arg(long, default_value_t = 2.0)]
        lambda_target: f64,
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
        #[arg(long, conflicts_with = "nonnegative")]
        conjugator: bool,
        /// Emit the nonnegative path through the same class itinerary instead of g1.
        #[arg(long)]
        nonnegative: bool,
        #[arg(long)]
        n: Option<usize>,
    },
    /// A loop connection with the given holonomy and winding.
    Loop {
        #[arg(long)]
        holonomy: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        r: i64,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Nonnegatively curved cylinder from a stored nonpositive path.
    Cylinder {
        #[arg(long)]
        path: PathBuf,
        /// Boundary loop at s=0; by default a spiral with holonomy g(0) and winding --r.
        #[arg(long = "loop")]
        boundary: Option<PathBuf>,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        r: i64,
        #[arg(long)]
        m: Option<usize>,
    },
    /// The mu-fold cover of a stored loop.
    Cover {
        #[arg(long = "loop")]
        boundary: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        mu: i64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Dir {
    Plus,
    Minus,
}

enum Failure {
    Usage(String),
    Assertion,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(n) = std::env::var("SL2ROTOR_THREADS") {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: SL2ROTOR_THREADS must be a positive integer");
                return ExitCode::from(2);
            }
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Assertion) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let g = &cli.global;
    match &cli.command {
        Command::Classify { matrix } => emit(g, &classify_report(matrix, g.tol.unwrap_or(1e-9))?),
        Command::Rot { matrix, anchor } => {
            let base = GroupElement::unimodular(parse_matrix(matrix)?, 1e-9)?;
            let lift = match anchor {
                Some(a) => LiftedElement::new(base, *a)?,
                None => LiftedElement::near(base, act_angle(&base, 0.0)),
            };
            emit(g, &lift_report(&lift))
        }
        Command::Verify { suite, scale } => verify(g, suite, *scale),
        Command::Build { reversed, kind } => build(g, kind, *reversed),
        Command::Check { file, require } => check(g, file, *require),
    }
}

fn write_out(g: &Global, text: &str) -> Result<(), Failure> {
    match &g.out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, rows);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), x, rows);
            }
        }
        Value::String(s) => rows.push((prefix.into(), s.replace(',', ";"))),
        other => rows.push((prefix.into(), other.to_string())),
    }
}

fn emit(g: &Global, v: &Value) -> Result<(), Failure> {
    let text = match g.format {
        Format::Json => serde_json::to_string_pretty(v).expect("report") + "\n",
        Format::Csv => {
            let mut rows = Vec::new();
            flatten("", v, &mut rows);
            let mut s = String::from("key,value\n");
            for (k, x) in rows {
                s += &format!("{k},{x}\n");
            }
            s
        }
    };
    write_out(g, &text)
}

fn lie_report(x: &LieElement) -> Value {
    json!({
        "alpha": x.alpha(),
        "delta": x.delta(),
        "epsilon": x.epsilon(),
        "cone": cone_test(x, 1e-9),
        "cone_margin": x.cone_margin(),
    })
}

fn classify_report(matrix: &str, tol: f64) -> Result<Value, Failure> {
    if !(tol > 0.0) {
        return Err(Failure::Usage("--tol must be positive".into()));
    }
    let m = parse_matrix(matrix)?;
    let g = GroupElement::unimodular(m, 1e-9)?;
    let class = classify(&g, tol)?;
    let log = g.trace_positive().matrix().log_unimodular().map(|x| lie_report(&LieElement::new(x)));
    Ok(json!({
        "matrix": [[m.a, m.b], [m.c, m.d]],
        "class": class,
        "trace": g.trace(),
        "t_function": sl2rotor::sl2core::t_function(&g),
        "tolerance": tol,
        "log": log,
    }))
}

fn lift_report(l: &LiftedElement) -> Value {
    let rep = l.sl2_rep();
    json!({
        "anchor": l.anchor,
        "anchor_hex": encode_f64(l.anchor),
        "class": classify(&l.base, 1e-9).ok(),
        "rot": l.rot(),
        "sl2_trace": rep.as_ref().map(|m| m.trace()).ok(),
        "parity_flag": rep.is_err(),
    })
}

fn verify(g: &Global, suite: &str, scale: f64) -> Result<(), Failure> {
    let mut cfg = RunConfig { seed: g.seed, scale, ..RunConfig::default() };
    if let Some(t) = g.tol {
        cfg.tol = Tolerances { margin: t, ..cfg.tol };
    }
    if let Some(r) = g.res {
        cfg.ns = r;
        cfg.mt = r;
    }
    let names: Vec<&str> = if suite == "all" { all_suites() } else { vec![suite] };
    let mut reports = Vec::new();
    for name in names {
        reports.push(run_suite(name, &cfg)?);
    }
    let passed = reports.iter().all(|r| r.passed);
    let text = match g.format {
        Format::Json => {
            let v = if reports.len() == 1 {
                serde_json::to_value(&reports[0])
            } else {
                serde_json::to_value(&reports)
            };
            serde_json::to_string_pretty(&v.expect("report")).expect("report") + "\n"
        }
        Format::Csv => {
            let mut s = format!("{}\n", SuiteReport::csv_header());
            for r in &reports {
                for row in r.csv_rows() {
                    s += &row;
                    s.push('\n');
                }
            }
            s
        }
    };
    write_out(g, &text)?;
    for r in &reports {
        eprintln!(
            "{}: {} ({} cases, {} failures)",
            r.suite,
            if r.passed { "pass" } else { "FAIL" },
            r.cases(),
            r.failures()
        );
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Assertion)
    }
}

fn matrix_or(s: &Option<String>, default: GroupElement) -> Result<GroupElement, Failure> {
    match s {
        Some(s) => Ok(GroupElement::unimodular(parse_matrix(s)?, 1e-9)?),
        None => Ok(default),
    }
}

fn build(g: &Global, kind: &BuildKind, reversed: bool) -> Result<(), Failure> {
    let path_art = |p: GroupPath| Artifact::from_path(&if reversed { p.reversed() } else { p });
    if reversed && matches!(kind, BuildKind::Loop { .. } | BuildKind::Cylinder { .. } | BuildKind::Cover { .. }) {
        return Err(Failure::Usage("--reversed applies to path kinds only".into()));
    }
    let art = match kind {
        BuildKind::SpiralPath { r, gamma, n } => {
            let x = parse_matrix(gamma)?;
            if x.trace().abs() > 1e-12 {
                return Err(Failure::Usage("gamma must be traceless".into()));
            }
            path_art(spiral_path(*r, LieElement::new(x), n.or(g.res).unwrap_or(1000))?)
        }
        BuildKind::EllipticPath { theta0, theta1, g0, n } => {
            let start = matrix_or(g0, GroupElement::rotation(*theta0))?;
            let p = elliptic_itinerary_path(&Schedule::linear(*theta0, *theta1), &start, n.or(g.res).unwrap_or(1000))?;
            path_art(p)
        }
        BuildKind::HyperbolicPath { lambda0, lambda1, g0, direction, eta, n } => {
            let start = matrix_or(g0, GroupElement::diag(*lambda0))?;
            let rising = lambda1 >= lambda0;
            let dir = match direction {
                Some(Dir::Plus) => Direction::Plus,
                Some(Dir::Minus) => Direction::Minus,
                None if (start.trace() > 0.0) == rising => Direction::Plus,
                None => Direction::Minus,
            };
            let p = hyperbolic_itinerary_path(
                &Schedule::linear(*lambda0, *lambda1),
                dir,
                &start,
                n.or(g.res).unwrap_or(1000),
                *eta,
            )?;
            path_art(p)
        }
        BuildKind::UnitPath { lambda_target, nonnegative: true, n, .. } => {
            path_art(unit_path_nonnegative(*lambda_target, n.or(g.res).unwrap_or(2000))?)
        }
        BuildKind::UnitPath { lambda_target, lambda, conjugator, n, .. } => {
            let up = unit_path(*lambda_target, *lambda, n.or(g.res).unwrap_or(2000))?;
            path_art(if *conjugator { up.k } else { up.g1 })
        }
        BuildKind::Loop { holonomy, r, m } => {
            let h = GroupElement::unimodular(parse_matrix(holonomy)?, 1e-9)?;
            Artifact::from_loop(&LoopConnection::with_holonomy(&h, *r, m.or(g.res).unwrap_or(256))?)
        }
        BuildKind::Cylinder { path, boundary, r, m } => {
            let p = Artifact::read(path)?.to_path()?;
            let a0 = match boundary {
                Some(f) => Artifact::read(f)?.to_loop()?,
                None => LoopConnection::with_holonomy(&p.start(), *r, m.or(g.res).unwrap_or(p.n()))?,
            };
            Artifact::from_connection(&CylinderConnection::from_nonpositive_path(&p, &a0)?)
        }
        BuildKind::Cover { boundary, mu } => {
            if *mu == 0 {
                return Err(Failure::Usage("mu must be nonzero".into()));
            }
            Artifact::from_loop(&Artifact::read(boundary)?.to_loop()?.cover(*mu)?)
        }
    };
    write_out(g, &(art.to_json() + "\n"))
}

fn mat_json(m: &Mat2) -> Value {
    json!([[m.a, m.b], [m.c, m.d]])
}

fn check(g: &Global, file: &Path, require: Option<Requirement>) -> Result<(), Failure> {
    let art = Artifact::read(file)?;
    let margin = g.tol.unwrap_or(1e-8);
    let (report, ok) = match &art {
        Artifact::Path { .. } => {
            let p = art.to_path()?;
            let rep = is_nonnegative(&p, margin)?;
            let ok = match require {
                None => true,
                Some(Requirement::Nonnegative) => rep.nonnegative,
                Some(Requirement::Nonpositive) => rep.nonpositive,
                Some(Requirement::Flat) => rep.nonnegative && rep.nonpositive,
            };
            let v = json!({
                "kind": "path",
                "N": p.n(),
                "description": p.description(),
                "min_cone_margin": rep.min_cone_margin,
                "min_nonpositive_margin": rep.min_nonpositive_margin,
                "nonnegative": rep.nonnegative,
                "positive": rep.positive,
                "nonpositive": rep.nonpositive,
                "rot_gain": rep.rot_gain,
                "endpoint_class": rep.endpoint_class,
                "itinerary": rep.kinds(),
            });
            (v, ok)
        }
        Artifact::Loop { .. } => {
            let a = art.to_loop()?;
            let h = a.lifted_holonomy();
            let v = json!({
                "kind": "loop",
                "M": a.m(),
                "holonomy": mat_json(&h.base.matrix()),
                "class": classify(&h.base, 1e-9).ok(),
                "rot": a.rot(),
            });
            (v, require.is_none())
        }
        Artifact::Connection { .. } => {
            let c = art.to_connection()?;
            let min = c.min_curvature_margin();
            let max = c.max_curvature_norm();
            let nonneg = c.is_nonneg_curved(margin);
            let nonpos = (0..=c.ns())
                .all(|i| (0..c.cols()).all(|j| c.curvature(i, j).nonpositive_margin() >= -margin));
            let ok = match require {
                None => true,
                Some(Requirement::Nonnegative) => nonneg,
                Some(Requirement::Nonpositive) => nonpos,
                Some(Requirement::Flat) => max <= margin,
            };
            let rb = c.rot_boundary().ok();
            let v = json!({
                "kind": "connection",
                "Ns": c.ns(),
                "Mt": c.mt(),
                "periodic": c.periodic(),
                "min_curvature_margin": min,
                "max_curvature_norm": max,
                "nonnegatively_curved": nonneg,
                "holonomy_inner": mat_json(&c.holonomy_loop(0).matrix()),
                "holonomy_outer": mat_json(&c.holonomy_loop(c.ns()).matrix()),
                "rot_boundary": rb,
                "rot_c": c.rot_c(),
            });
            (v, ok)
        }
        Artifact::Lift(_) => (lift_report(&art.to_lift()?), require.is_none()),
    };
    emit(g, &report)?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Assertion)
    }
}
