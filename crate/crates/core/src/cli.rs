//! Command-line front end: `solve`, `trajectory`, `sweep`, `verify`, `oracle`.
//!
//! Exit codes: 0 pass, 1 usage or parse error, 2 numerical failure, 3 no
//! journey time within the horizon.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::bloch::BlochPoint;
use crate::horizontality::stabilizer_basis;
use crate::linalg::{projective_fidelity, variance};
use crate::oracle::{optimality_certificate, CertificateConfig, CertificateReport, OracleError, DEFAULT_FID_THRESHOLD};
use crate::problem::{ComplexMatrixJson, ComplexVectorJson, LoadedProblem, ProblemError, ProblemFile};
use crate::solver::{solve, Check, Diagnostics, NavigationProblem, NavigationSolution, RootReport, SolveError};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_HORIZON: i32 = 3;

/// Final-sample fidelity a trajectory export must reach.
pub const TRAJECTORY_ARRIVAL_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "zermelo", version, about = "Time-optimal navigation of pure quantum states through a background Hamiltonian")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    /// Problem file (JSON).
    #[arg(long)]
    pub problem: PathBuf,
    /// Hermiticity tolerance applied to h0 on load.
    #[arg(long)]
    pub tol_linalg: Option<f64>,
    /// Search horizon for the journey time.
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Also write the normalized problem file to this path.
    #[arg(long)]
    pub dump_normalized: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Journey time, optimal initial control, and diagnostics as JSON.
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Add this multiple of a stabiliser generator of ψ_I to the control.
        #[arg(long, allow_negative_numbers = true)]
        perturb: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form optimal trajectory sampled on a uniform grid, as CSV.
    Trajectory {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Journey time over the wind family ε·h0, as CSV.
    Sweep {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        eps_min: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        eps_max: f64,
        /// Number of ε values, endpoints included.
        #[arg(long, default_value_t = 101)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// PASS/FAIL table of every residual check (stderr) and the diagnostics JSON.
    Verify {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, allow_negative_numbers = true)]
        perturb: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sampled optimality certificate as JSON.
    Oracle {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Samples per competitor family.
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_FID_THRESHOLD)]
        fid_threshold: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        let solve_code = |e: &SolveError| match e {
            SolveError::HorizonExceeded { .. } => EXIT_HORIZON,
            SolveError::InvalidProblem(_) => EXIT_USAGE,
            _ => EXIT_NUMERICAL,
        };
        match self {
            CliError::Usage(_) | CliError::Io { .. } => EXIT_USAGE,
            CliError::Problem(ProblemError::Solve(e)) | CliError::Solve(e) | CliError::Oracle(OracleError::Solve(e)) => {
                solve_code(e)
            }
            CliError::Problem(_) => EXIT_USAGE,
            CliError::Oracle(_) | CliError::Csv(_) => EXIT_NUMERICAL,
        }
    }
}

/// Parses `args` (program name first), runs the command, and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

/// Runs one command. `Ok` carries the exit code of a completed run, which is
/// nonzero when a check failed.
pub fn execute(command: &Command) -> Result<i32, CliError> {
    match command {
        Command::Solve { problem, perturb, out } => cmd_solve(problem, *perturb, out.as_deref()),
        Command::Trajectory { problem, dt, out } => cmd_trajectory(problem, *dt, out.as_deref()),
        Command::Sweep { problem, eps_min, eps_max, steps, out } => {
            cmd_sweep(problem, *eps_min, *eps_max, *steps, out.as_deref())
        }
        Command::Verify { problem, perturb, out } => cmd_verify(problem, *perturb, out.as_deref()),
        Command::Oracle { problem, samples, dt, seed, fid_threshold, out } => {
            let config = CertificateConfig { n_samples: *samples, dt: *dt, fid_threshold: *fid_threshold, seed: *seed };
            cmd_oracle(problem, &config, out.as_deref())
        }
    }
}

fn load(args: &ProblemArgs) -> Result<LoadedProblem, CliError> {
    if let Some(tol) = args.tol_linalg {
        if !(tol >= 0.0) {
            return Err(CliError::Usage(format!("--tol-linalg must be non-negative, got {tol}")));
        }
    }
    let loaded = ProblemFile::read(&args.problem)?.load(args.tol_linalg)?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(path) = &args.dump_normalized {
        write_output(Some(path), &(loaded.normalized.to_json_pretty() + "\n"))?;
    }
    Ok(loaded)
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes") + "\n"
}

/// Solves the problem and, if asked, replaces the control by a perturbed one.
fn solve_with_perturbation(
    loaded: &LoadedProblem,
    t_max: Option<f64>,
    perturb: Option<f64>,
) -> Result<(NavigationProblem, NavigationSolution), CliError> {
    let p = loaded.navigation_problem(t_max)?;
    let sol = solve(&p)?;
    let sol = match perturb {
        Some(amount) => {
            let g = &stabilizer_basis(p.psi_i())[0];
            let h1 = &sol.h1_initial + &g.scale(amount);
            sol.with_initial_control(&p, h1)
        }
        None => sol,
    };
    Ok((p, sol))
}

#[derive(Debug, Serialize)]
pub struct SolutionDocument {
    pub epsilon: f64,
    pub t_star: f64,
    pub theta: f64,
    pub h1_initial: ComplexMatrixJson,
    pub aligned_psi_f: ComplexVectorJson,
    pub root: RootReport,
    pub diagnostics: Diagnostics,
    pub failures: Vec<&'static str>,
    pub pass: bool,
}

impl SolutionDocument {
    pub fn new(epsilon: f64, sol: &NavigationSolution) -> Self {
        Self {
            epsilon,
            t_star: sol.t_star,
            theta: sol.theta,
            h1_initial: ComplexMatrixJson::from_matrix(sol.h1_initial.matrix()),
            aligned_psi_f: ComplexVectorJson::from_slice(sol.aligned_psi_f.amplitudes()),
            root: sol.root,
            diagnostics: sol.diagnostics,
            failures: sol.diagnostics.failures(),
            pass: sol.diagnostics.passed(),
        }
    }
}

fn report_failures(failures: &[&str]) -> i32 {
    if failures.is_empty() {
        EXIT_PASS
    } else {
        eprintln!("FAIL: {}", failures.join(", "));
        EXIT_NUMERICAL
    }
}

pub fn cmd_solve(args: &ProblemArgs, perturb: Option<f64>, out: Option<&Path>) -> Result<i32, CliError> {
    let loaded = load(args)?;
    let (_, sol) = solve_with_perturbation(&loaded, args.t_max, perturb)?;
    let doc = SolutionDocument::new(loaded.epsilon(), &sol);
    write_output(out, &to_json(&doc))?;
    Ok(report_failures(&doc.failures))
}

fn check_table(checks: &[Check]) -> String {
    let mut s = format!("{:<24} {:>14} {:>16}  {}\n", "check", "value", "limit", "result");
    for c in checks {
        let verdict = if c.pass { "PASS" } else { "FAIL" };
        // Fidelities are shown as their distance from 1.
        let (value, limit) = if c.at_least {
            (format!("1 - {:.3e}", 1.0 - c.value), format!(">= 1 - {:.1e}", 1.0 - c.limit))
        } else {
            (format!("{:.6e}", c.value), format!("< {:.1e}", c.limit))
        };
        s.push_str(&format!("{:<24} {:>14} {:>16}  {}\n", c.name, value, limit, verdict));
    }
    s
}

#[derive(Debug, Serialize)]
struct VerifyDocument {
    t_star: f64,
    checks: Vec<Check>,
    diagnostics: Diagnostics,
    failures: Vec<&'static str>,
    pass: bool,
}

pub fn cmd_verify(args: &ProblemArgs, perturb: Option<f64>, out: Option<&Path>) -> Result<i32, CliError> {
    let loaded = load(args)?;
    let (_, sol) = solve_with_perturbation(&loaded, args.t_max, perturb)?;
    let d = sol.diagnostics;
    let checks = d.checks();
    eprint!("{}", check_table(&checks));
    let doc = VerifyDocument { t_star: sol.t_star, checks, diagnostics: d, failures: d.failures(), pass: d.passed() };
    write_output(out, &to_json(&doc))?;
    Ok(report_failures(&doc.failures))
}

/// Shortest round-trip decimal, switching to exponent notation for very
/// small or large magnitudes.
fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn csv_text(header: &[String], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv of UTF-8 fields is UTF-8"))
}

/// Header and rows of the trajectory export.
pub fn trajectory_table(p: &NavigationProblem, sol: &NavigationSolution, dt: f64) -> Result<(Vec<String>, Vec<Vec<String>>), CliError> {
    let traj = sol.trajectory(dt)?;
    let dim = p.dim();
    let mut header = vec!["t".to_string()];
    for k in 0..dim {
        header.push(format!("re_psi{k}"));
        header.push(format!("im_psi{k}"));
    }
    header.push("fidelity_to_target".into());
    header.push("throttle_residual".into());
    if dim == 2 {
        header.extend(["bloch_x", "bloch_y", "bloch_z"].map(String::from));
    }

    let mut rows = Vec::with_capacity(traj.len());
    for ((t, psi), control) in traj.times().iter().zip(traj.states()).zip(traj.controls()) {
        let mut row = vec![num(*t)];
        for z in psi.amplitudes() {
            row.push(num(z.re));
            row.push(num(z.im));
        }
        row.push(num(projective_fidelity(psi, p.psi_f()).unwrap_or(f64::NAN)));
        let throttle = if sol.root.trivial {
            0.0
        } else {
            (4.0 * variance(control, psi).unwrap_or(f64::NAN) - 1.0).abs()
        };
        row.push(num(throttle));
        if dim == 2 {
            let b = BlochPoint::from_state(*t, psi).expect("two-level state");
            row.extend([b.x, b.y, b.z].map(num));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

pub fn cmd_trajectory(args: &ProblemArgs, dt: f64, out: Option<&Path>) -> Result<i32, CliError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(CliError::Usage(format!("--dt must be positive, got {dt}")));
    }
    let loaded = load(args)?;
    let p = loaded.navigation_problem(args.t_max)?;
    let sol = solve(&p)?;
    let (header, rows) = trajectory_table(&p, &sol, dt)?;
    write_output(out, &csv_text(&header, &rows)?)?;
    let final_state = sol.propagate_closed_form(sol.t_star);
    let fidelity = projective_fidelity(&final_state, p.psi_f()).unwrap_or(0.0);
    if fidelity >= 1.0 - TRAJECTORY_ARRIVAL_TOL {
        Ok(EXIT_PASS)
    } else {
        eprintln!("FAIL: final fidelity {fidelity} below 1 - {TRAJECTORY_ARRIVAL_TOL:e}");
        Ok(EXIT_NUMERICAL)
    }
}

/// One row of a journey-time sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub t_star: Option<f64>,
    pub theta: Option<f64>,
    pub arrival_fidelity: Option<f64>,
    /// `pass`, `fail` (solved but a check failed), or `error` (not solved).
    pub status: &'static str,
    pub error: String,
}

/// `steps` equally spaced values from `eps_min` to `eps_max` inclusive.
pub fn sweep_epsilons(eps_min: f64, eps_max: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![eps_min],
        n => (0..n).map(|k| eps_min + (eps_max - eps_min) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Solves the family `ε·h0` for each ε, concurrently, keeping ε order.
pub fn sweep(loaded: &LoadedProblem, epsilons: &[f64], t_max: Option<f64>) -> Vec<SweepRow> {
    epsilons
        .par_iter()
        .map(|&epsilon| {
            let solved = loaded
                .navigation_problem_with_wind_scale(epsilon, t_max)
                .map_err(|e| e.to_string())
                .and_then(|p| solve(&p).map_err(|e| e.to_string()));
            match solved {
                Ok(sol) => {
                    let failures = sol.diagnostics.failures();
                    SweepRow {
                        epsilon,
                        t_star: Some(sol.t_star),
                        theta: Some(sol.theta),
                        arrival_fidelity: Some(sol.diagnostics.arrival_fidelity),
                        status: if failures.is_empty() { "pass" } else { "fail" },
                        error: failures.join(";"),
                    }
                }
                Err(error) => SweepRow {
                    epsilon,
                    t_star: None,
                    theta: None,
                    arrival_fidelity: None,
                    status: "error",
                    error,
                },
            }
        })
        .collect()
}

pub fn cmd_sweep(args: &ProblemArgs, eps_min: f64, eps_max: f64, steps: usize, out: Option<&Path>) -> Result<i32, CliError> {
    if steps == 0 || !eps_min.is_finite() || !eps_max.is_finite() || eps_min > eps_max {
        return Err(CliError::Usage(format!(
            "need --steps >= 1 and finite --eps-min <= --eps-max, got {steps}, {eps_min}, {eps_max}"
        )));
    }
    let loaded = load(args)?;
    let rows = sweep(&loaded, &sweep_epsilons(eps_min, eps_max, steps), args.t_max);
    let header: Vec<String> =
        ["epsilon", "t_star", "theta", "arrival_fidelity", "status", "error"].map(String::from).to_vec();
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                num(r.epsilon),
                opt(r.t_star),
                opt(r.theta),
                opt(r.arrival_fidelity),
                r.status.to_string(),
                r.error.clone(),
            ]
        })
        .collect();
    write_output(out, &csv_text(&header, &table)?)?;
    let bad = rows.iter().filter(|r| r.status != "pass").count();
    if bad == 0 {
        Ok(EXIT_PASS)
    } else {
        eprintln!("FAIL: {bad} of {} rows did not pass", rows.len());
        Ok(EXIT_NUMERICAL)
    }
}

fn certificate_table(r: &CertificateReport) -> String {
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "none".into());
    let mut s = String::new();
    s.push_str(&format!("t_star                 {:.9}\n", r.t_star));
    s.push_str(&format!("solver arrival         {}\n", opt(r.solver_arrival)));
    s.push_str(&format!("orbit competitors      {} arrived, earliest {}\n", r.orbit_arrivals, opt(r.orbit_min_arrival)));
    s.push_str(&format!(
        "piecewise competitors  {} arrived, earliest {}\n",
        r.piecewise_arrivals,
        opt(r.piecewise_min_arrival)
    ));
    s.push_str(&format!("bound                  t_star - {:.3e}\n", r.margin));
    s.push_str(&format!("result                 {}\n", if r.pass { "PASS" } else { "FAIL" }));
    s
}

pub fn cmd_oracle(args: &ProblemArgs, config: &CertificateConfig, out: Option<&Path>) -> Result<i32, CliError> {
    if !(config.dt > 0.0 && config.dt.is_finite()) {
        return Err(CliError::Usage(format!("--dt must be positive, got {}", config.dt)));
    }
    let loaded = load(args)?;
    let p = loaded.navigation_problem(args.t_max)?;
    let report = optimality_certificate(&p, config)?;
    eprint!("{}", certificate_table(&report));
    write_output(out, &to_json(&report))?;
    Ok(if report.pass { EXIT_PASS } else { EXIT_NUMERICAL })
}
