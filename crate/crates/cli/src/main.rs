//! `holonomy`: compute open-path subspace holonomies from tripod path
//! specifications or discrete curve files, and run the self-check suite.
//!
//! Exit codes: 0 success, 2 orthogonal endpoints, 3 curve too coarse,
//! 4 input/output problems, 5 verification failure.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use holonomy_cli::document::{JobEcho, OracleReport, ResultDocument};
use holonomy_cli::io::{read_frame_file, read_projector_file, FileError};
use holonomy_cli::verify::{run_all, Mutation};
use holonomy_core::adiabatic::{evolve, evolve_traced, extract_gate};
use holonomy_core::tripod::{dark_curve, SpherePath, TripodModel};
use holonomy_core::{
    compute_holonomy, connection_at, continuation_frames, discrete_gamma, overlap, sample_curve,
    Error as CoreError, Frame, FrameCurve, OverlapClass, C64, DEFAULT_FD_STEP, DEFAULT_RANK_TOL,
};

const EXIT_ORTHOGONAL: u8 = 2;
const EXIT_TOO_COARSE: u8 = 3;
const EXIT_INPUT: u8 = 4;
const EXIT_VERIFY: u8 = 5;

const USAGE: &str = "\
usage:
  holonomy run tripod --kind <meridian-latitude|latitude-loop|great-circle|piecewise>
                [--theta1 A] [--phi1 A] [--theta A] [--azimuth A] [--arc A]
                [--waypoint T,P ...] [common flags]
  holonomy run frames <file>      [common flags]
  holonomy run projectors <file>  [common flags]
  holonomy verify [--inject <ordering-flip|rank-tol>]

common flags:
  --n-steps N      integration steps (default 4096 for tripod paths, rounded
                   up to the path's segment count; stored resolution for
                   discrete files)
  --rank-tol X     overlap rank tolerance in (0, 1e-2] (default 1e-8)
  --oracle NAME    repeatable: analytic | adiabatic | gamma
  --t-total X      adiabatic total time (default 500)
  --time-steps N   adiabatic RK4 steps (default 100000)
  --output PATH    write the result document here instead of stdout
  --plot-csv STEM  write STEM.connection.csv (s, |A|) and, with the
                   adiabatic oracle, STEM.leakage.csv (t, leakage, defect)

angles accept plain floats or pi expressions: pi, pi/2, 3pi/4, -0.5pi";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match dispatch(&args) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<CoreError> for Failure {
    fn from(error: CoreError) -> Self {
        let code = match &error {
            CoreError::OrthogonalEndpoints => EXIT_ORTHOGONAL,
            CoreError::CurveTooCoarse { .. }
            | CoreError::CurveNotSmooth { .. }
            | CoreError::ResampleTooFine { .. } => EXIT_TOO_COARSE,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: error.to_string(),
        }
    }
}

impl From<FileError> for Failure {
    fn from(error: FileError) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: error.to_string(),
        }
    }
}

fn dispatch(args: &[String]) -> Result<u8, Failure> {
    match args.first().map(String::as_str) {
        Some("run") => cmd_run(&args[1..]),
        Some("verify") => cmd_verify(&args[1..]),
        Some("--help" | "-h" | "help") => {
            println!("{USAGE}");
            Ok(0)
        }
        Some(other) => Err(Failure::input(format!(
            "unknown command {other:?}\n{USAGE}"
        ))),
        None => Err(Failure::input(format!("missing command\n{USAGE}"))),
    }
}

// ---------------------------------------------------------------------------
// argument handling

fn parse_angle(text: &str) -> Result<f64, Failure> {
    if let Ok(v) = text.parse::<f64>() {
        return Ok(v);
    }
    // [coef] "pi" [/ denominator]
    let body = text.trim();
    let (sign, body) = match body.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, body),
    };
    if let Some(idx) = body.find("pi") {
        let (coef_text, rest) = (&body[..idx], &body[idx + 2..]);
        let coef = if coef_text.is_empty() {
            1.0
        } else {
            coef_text
                .parse::<f64>()
                .map_err(|_| Failure::input(format!("cannot parse angle {text:?}")))?
        };
        let den = if rest.is_empty() {
            1.0
        } else if let Some(den_text) = rest.strip_prefix('/') {
            den_text
                .parse::<f64>()
                .map_err(|_| Failure::input(format!("cannot parse angle {text:?}")))?
        } else {
            return Err(Failure::input(format!("cannot parse angle {text:?}")));
        };
        return Ok(sign * coef * std::f64::consts::PI / den);
    }
    Err(Failure::input(format!("cannot parse angle {text:?}")))
}

#[derive(Default)]
struct CommonFlags {
    n_steps: Option<usize>,
    rank_tol: Option<f64>,
    oracles: Vec<String>,
    t_total: Option<f64>,
    time_steps: Option<usize>,
    output: Option<PathBuf>,
    plot_csv: Option<String>,
}

struct FlagParser<'a> {
    args: &'a [String],
    pos: usize,
}

impl<'a> FlagParser<'a> {
    fn new(args: &'a [String]) -> Self {
        FlagParser { args, pos: 0 }
    }

    fn next(&mut self) -> Option<&'a str> {
        let item = self.args.get(self.pos).map(String::as_str);
        self.pos += item.is_some() as usize;
        item
    }

    fn value(&mut self, flag: &str) -> Result<&'a str, Failure> {
        self.next()
            .ok_or_else(|| Failure::input(format!("flag {flag} needs a value")))
    }
}

fn parse_usize(flag: &str, text: &str) -> Result<usize, Failure> {
    text.parse()
        .map_err(|_| Failure::input(format!("flag {flag}: cannot parse {text:?} as an integer")))
}

// ---------------------------------------------------------------------------
// holonomy run

enum Source {
    Tripod(Box<SpherePath>, String),
    Frames(Vec<Frame>, String),
    Projectors(Vec<holonomy_core::CMatrix>, usize, String),
}

fn cmd_run(args: &[String]) -> Result<u8, Failure> {
    let mut parser = FlagParser::new(args);
    let source_kind = parser
        .next()
        .ok_or_else(|| Failure::input(format!("run needs a source\n{USAGE}")))?;

    let mut kind: Option<String> = None;
    let mut theta1 = None;
    let mut phi1 = None;
    let mut theta = None;
    let mut azimuth = None;
    let mut arc = None;
    let mut waypoints: Vec<(f64, f64)> = Vec::new();
    let mut file: Option<PathBuf> = None;
    let mut flags = CommonFlags::default();

    if matches!(source_kind, "frames" | "projectors") {
        let path = parser.value(source_kind)?;
        file = Some(PathBuf::from(path));
    } else if source_kind != "tripod" {
        return Err(Failure::input(format!(
            "unknown source {source_kind:?} (expected tripod, frames, or projectors)"
        )));
    }

    while let Some(flag) = parser.next() {
        match flag {
            "--kind" => kind = Some(parser.value(flag)?.to_string()),
            "--theta1" => theta1 = Some(parse_angle(parser.value(flag)?)?),
            "--phi1" => phi1 = Some(parse_angle(parser.value(flag)?)?),
            "--theta" => theta = Some(parse_angle(parser.value(flag)?)?),
            "--azimuth" => azimuth = Some(parse_angle(parser.value(flag)?)?),
            "--arc" => arc = Some(parse_angle(parser.value(flag)?)?),
            "--waypoint" => {
                let pair = parser.value(flag)?;
                let (t, p) = pair.split_once(',').ok_or_else(|| {
                    Failure::input(format!("--waypoint expects T,P with angles, got {pair:?}"))
                })?;
                waypoints.push((parse_angle(t)?, parse_angle(p)?));
            }
            "--n-steps" => flags.n_steps = Some(parse_usize(flag, parser.value(flag)?)?),
            "--rank-tol" => {
                let text = parser.value(flag)?;
                let v: f64 = text.parse().map_err(|_| {
                    Failure::input(format!("flag --rank-tol: cannot parse {text:?}"))
                })?;
                flags.rank_tol = Some(v);
            }
            "--oracle" => flags.oracles.push(parser.value(flag)?.to_string()),
            "--t-total" => {
                let text = parser.value(flag)?;
                let v: f64 = text.parse().map_err(|_| {
                    Failure::input(format!("flag --t-total: cannot parse {text:?}"))
                })?;
                flags.t_total = Some(v);
            }
            "--time-steps" => flags.time_steps = Some(parse_usize(flag, parser.value(flag)?)?),
            "--output" => flags.output = Some(PathBuf::from(parser.value(flag)?)),
            "--plot-csv" => flags.plot_csv = Some(parser.value(flag)?.to_string()),
            other => return Err(Failure::input(format!("unknown flag {other:?}\n{USAGE}"))),
        }
    }

    let source = match source_kind {
        "tripod" => {
            let kind = kind.ok_or_else(|| Failure::input("tripod sources need --kind"))?;
            let (path, label) = match kind.as_str() {
                "meridian-latitude" => {
                    let t1 =
                        theta1.ok_or_else(|| Failure::input("meridian-latitude needs --theta1"))?;
                    let p1 =
                        phi1.ok_or_else(|| Failure::input("meridian-latitude needs --phi1"))?;
                    (
                        SpherePath::meridian_then_latitude(t1, p1)?,
                        format!("tripod meridian-latitude theta1={t1} phi1={p1}"),
                    )
                }
                "latitude-loop" => {
                    let t = theta.ok_or_else(|| Failure::input("latitude-loop needs --theta"))?;
                    (
                        SpherePath::latitude_loop(t)?,
                        format!("tripod latitude-loop theta={t}"),
                    )
                }
                "great-circle" => {
                    let arc = arc.ok_or_else(|| Failure::input("great-circle needs --arc"))?;
                    let az = azimuth.unwrap_or(0.0);
                    (
                        SpherePath::great_circle(az, arc)?,
                        format!("tripod great-circle azimuth={az} arc={arc}"),
                    )
                }
                "piecewise" => {
                    let path = SpherePath::piecewise_linear(&waypoints)?;
                    let label = format!("tripod piecewise waypoints={waypoints:?}");
                    (path, label)
                }
                other => {
                    return Err(Failure::input(format!("unknown tripod kind {other:?}")));
                }
            };
            Source::Tripod(Box::new(path), label)
        }
        "frames" => {
            let path = file.expect("set above");
            let frames = read_frame_file(&path)?;
            Source::Frames(frames, format!("frames {}", path.display()))
        }
        "projectors" => {
            let path = file.expect("set above");
            let (projectors, dim_sub) = read_projector_file(&path)?;
            Source::Projectors(
                projectors,
                dim_sub,
                format!("projectors {}", path.display()),
            )
        }
        _ => unreachable!(),
    };

    run_job(source, flags)
}

fn run_job(source: Source, flags: CommonFlags) -> Result<u8, Failure> {
    let rank_tol = flags.rank_tol.unwrap_or(DEFAULT_RANK_TOL);
    if !(rank_tol > 0.0 && rank_tol <= 1e-2) {
        return Err(Failure::input(format!(
            "--rank-tol must lie in (0, 1e-2], got {rank_tol}"
        )));
    }
    for oracle in &flags.oracles {
        if !matches!(oracle.as_str(), "analytic" | "adiabatic" | "gamma") {
            return Err(Failure::input(format!(
                "unknown oracle {oracle:?} (expected analytic, adiabatic, or gamma)"
            )));
        }
    }

    let (curve, tripod_path, label) = match source {
        Source::Tripod(path, label) => {
            let curve = dark_curve(&path);
            (curve, Some(*path), label)
        }
        Source::Frames(frames, label) => {
            // report orthogonal endpoints as such before the smoothness rule
            // gets a chance to reject the same pair as "too coarse"
            let first = frames.first().expect("parser enforces >= 2 samples");
            let last = frames.last().expect("parser enforces >= 2 samples");
            let endpoint = overlap(first, last, rank_tol)?;
            if endpoint.classification == OverlapClass::Orthogonal {
                return Err(CoreError::OrthogonalEndpoints.into());
            }
            (FrameCurve::discrete(frames)?, None, label)
        }
        Source::Projectors(projectors, dim_sub, label) => {
            let initial = Frame::from_projector(&projectors[0], dim_sub, 0)?;
            (continuation_frames(&projectors, &initial)?, None, label)
        }
    };

    let n_steps = match (flags.n_steps, &tripod_path, curve.sample_count()) {
        (Some(n), Some(path), _) => path.aligned_steps(n),
        (Some(n), None, _) => n,
        (None, Some(path), _) => path.aligned_steps(4096),
        (None, None, Some(stored)) => stored - 1,
        (None, None, None) => 4096,
    };
    if n_steps < 2 {
        return Err(Failure::input(format!(
            "--n-steps must be at least 2, got {n_steps}"
        )));
    }

    let result = compute_holonomy(&curve, n_steps, rank_tol)?;

    let mut oracles = OracleReport::default();
    let t_total = flags.t_total.unwrap_or(500.0);
    let time_steps = flags.time_steps.unwrap_or(100_000);
    let mut leakage_rows = None;
    for oracle in &flags.oracles {
        match oracle.as_str() {
            "analytic" => {
                let path = tripod_path
                    .as_ref()
                    .ok_or_else(|| Failure::input("the analytic oracle needs a tripod source"))?;
                let expected = holonomy_core::tripod::analytic_holonomy(path)?;
                oracles.analytic_deviation = Some((&result.u_g - &expected).norm());
            }
            "gamma" => {
                let frames = sample_curve(&curve, n_steps)?;
                let gamma = discrete_gamma(&frames)?;
                oracles.discrete_gamma_deviation = Some((gamma - &result.gamma_operator).norm());
            }
            "adiabatic" => {
                let path = tripod_path
                    .as_ref()
                    .ok_or_else(|| Failure::input("the adiabatic oracle needs a tripod source"))?;
                let model = TripodModel::from_path(path);
                let k = result.initial_frame.dim_sub();
                let mut runs = Vec::with_capacity(k);
                for l in 0..k {
                    let psi0 = result.initial_frame.columns().column(l).into_owned();
                    if l == 0 && flags.plot_csv.is_some() {
                        let trace_path = path.clone();
                        let (run, rows) = evolve_traced(
                            |s| model.hamiltonian(s),
                            move |s| {
                                Ok(holonomy_core::tripod::dark_frame(&trace_path, s)?.projector())
                            },
                            t_total,
                            time_steps,
                            &psi0,
                            (time_steps / 500).max(1),
                        )?;
                        leakage_rows = Some(rows);
                        runs.push(run);
                    } else {
                        runs.push(evolve(
                            |s| model.hamiltonian(s),
                            t_total,
                            time_steps,
                            &psi0,
                        )?);
                    }
                }
                let (gate, fidelity) = extract_gate(&runs, &result, C64::new(1.0, 0.0))?;
                oracles.adiabatic_fidelity = Some(fidelity);
                oracles.adiabatic_gate_deviation = Some((gate - &result.u_g).norm());
            }
            _ => unreachable!(),
        }
    }

    let job = JobEcho {
        source: label,
        n_steps,
        rank_tol,
        oracles: flags.oracles.clone(),
        t_total: flags
            .oracles
            .iter()
            .any(|o| o == "adiabatic")
            .then_some(t_total),
        time_steps: flags
            .oracles
            .iter()
            .any(|o| o == "adiabatic")
            .then_some(time_steps),
    };
    let document = ResultDocument::new(&result, job, oracles)?;
    let text = document.to_json();
    match &flags.output {
        Some(path) => std::fs::write(path, &text)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }

    if let Some(stem) = &flags.plot_csv {
        write_connection_csv(stem, &curve, n_steps)?;
        if let Some(rows) = leakage_rows {
            let mut csv = String::from("t,leakage,norm_defect\n");
            for row in rows {
                writeln!(csv, "{},{},{}", row.t, row.leakage, row.norm_defect).unwrap();
            }
            let path = format!("{stem}.leakage.csv");
            std::fs::write(&path, csv)
                .map_err(|e| Failure::input(format!("cannot write {path}: {e}")))?;
        }
    }
    Ok(0)
}

fn write_connection_csv(stem: &str, curve: &FrameCurve, n_steps: usize) -> Result<(), Failure> {
    let mut csv = String::from("s,connection_norm\n");
    let samples = n_steps.min(2048);
    for j in 0..samples {
        let s = (j as f64 + 0.5) / samples as f64;
        let a = connection_at(curve, s, DEFAULT_FD_STEP)?;
        writeln!(csv, "{},{}", a.s, a.a_matrix.norm()).unwrap();
    }
    let path = format!("{stem}.connection.csv");
    std::fs::write(&path, csv).map_err(|e| Failure::input(format!("cannot write {path}: {e}")))
}

// ---------------------------------------------------------------------------
// holonomy verify

fn cmd_verify(args: &[String]) -> Result<u8, Failure> {
    let mut parser = FlagParser::new(args);
    let mut mutation = Mutation::None;
    while let Some(flag) = parser.next() {
        match flag {
            "--inject" => {
                let value = parser.value(flag)?;
                mutation = Mutation::parse(value).ok_or_else(|| {
                    Failure::input(format!(
                        "unknown mutation {value:?} (expected ordering-flip or rank-tol)"
                    ))
                })?;
            }
            other => return Err(Failure::input(format!("unknown flag {other:?}\n{USAGE}"))),
        }
    }
    if mutation != Mutation::None {
        println!("running with injected fault: {mutation:?}");
    }
    let checks = run_all(mutation);
    let mut failed = 0;
    for check in &checks {
        println!("{}", check.line());
        failed += usize::from(!check.passed);
    }
    let total = checks.len();
    if failed == 0 {
        println!("all {total} checks passed");
        Ok(0)
    } else {
        println!("{failed} of {total} checks failed");
        Ok(EXIT_VERIFY)
    }
}
