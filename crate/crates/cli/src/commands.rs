//! Subcommands. Each writes its files into the configured output directory
//! and returns the process exit code.

use std::path::Path;

use motility_core::domain::{IntervalSet, SpaceGrid};
use motility_core::hj::{cutoff_initial, explicit_zero_set, hj_solve, max_gradient};
use motility_core::pde::run_simulation;
use motility_core::spectral::{build_h_table, compute_cstar, dispersion_curve};
use motility_core::verify::{run_verification, Outcome, VerificationReport};
use thiserror::Error;

use crate::config::{ConfigError, RunConfig};
use crate::output::{fmt_f64, require_dir, CsvDoc, OutputError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error(transparent)]
    Compute(#[from] motility_core::Error),
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Compute(
                motility_core::Error::InvalidParameter { .. } | motility_core::Error::Config(_),
            ) => EXIT_CONFIG,
            CliError::Compute(_) => EXIT_FAILED,
            _ => EXIT_CONFIG,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectral,
    Simulate,
    Hj,
    Verify,
}

/// Runs `cmd` on a pool of `cfg.workers()` threads.
pub fn run(cmd: Command, cfg: &RunConfig) -> Result<i32, CliError> {
    let out = cfg.out_dir();
    require_dir(&out)?;
    let body = || match cmd {
        Command::Spectral => cmd_spectral(cfg, &out),
        Command::Simulate => cmd_simulate(cfg, &out),
        Command::Hj => cmd_hj(cfg, &out),
        Command::Verify => {
            cmd_verify(cfg, &out).map(|r| if r.any_failed() { EXIT_FAILED } else { EXIT_OK })
        }
    };
    match cfg.workers() {
        0 => body(),
        n => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Pool(e.to_string()))?
            .install(body),
    }
}

/// dispersion.csv and cstar.csv.
pub fn cmd_spectral(cfg: &RunConfig, out: &Path) -> Result<i32, CliError> {
    let params = cfg.params()?;
    let grid = cfg.theta_grid()?;
    let curve = dispersion_curve(&cfg.lambdas(), &params, &grid)?;
    let mut doc = CsvDoc::new(["lambda", "c", "H", "gamma"]);
    for s in &curve.samples {
        doc.floats(&[s.lambda, s.c, s.h, s.gamma]);
    }
    doc.write(out, "dispersion.csv")?;

    let front = compute_cstar(&params, &grid, &cfg.cstar_options())?;
    let mut doc = CsvDoc::new(["c_star", "lambda_star", "lower_bound", "upper_bound"]);
    doc.comment(&format!("H(0) = r = {}", fmt_f64(params.r)));
    doc.floats(&[
        front.c_star,
        front.lambda_star,
        params.kpp_lower(),
        params.kpp_upper(),
    ]);
    doc.write(out, "cstar.csv")?;
    println!(
        "c* = {} at lambda* = {}",
        fmt_f64(front.c_star),
        fmt_f64(front.lambda_star)
    );
    Ok(EXIT_OK)
}

/// snapshot_<k>.csv, front_track.csv and sup_track.csv.
pub fn cmd_simulate(cfg: &RunConfig, out: &Path) -> Result<i32, CliError> {
    let sim = cfg.sim_config()?;
    let traj = run_simulation(&sim)?;
    let thetas = sim.theta.nodes();
    for (k, field) in traj.snapshots.iter().enumerate() {
        let mut header = vec!["x".to_string()];
        header.extend(thetas.iter().map(|&t| fmt_f64(t)));
        let mut doc = CsvDoc::new(&header);
        doc.comment(&format!("t = {}", fmt_f64(field.time)));
        let mut row = Vec::with_capacity(thetas.len() + 1);
        for (i, column) in field.columns().enumerate() {
            row.clear();
            row.push(field.space.node(i));
            row.extend_from_slice(column);
            doc.floats(&row);
        }
        doc.write(out, &format!("snapshot_{k}.csv"))?;
    }
    let mut doc = CsvDoc::new(["t", "x_front"]);
    for &(t, x) in &traj.front_track {
        doc.floats(&[t, x]);
    }
    doc.write(out, "front_track.csv")?;
    let mut doc = CsvDoc::new(["t", "sup_n"]);
    for &(t, s) in &traj.sup_track {
        doc.floats(&[t, s]);
    }
    doc.write(out, "sup_track.csv")?;
    println!(
        "{} steps of {}; {} snapshots; {} front positions",
        traj.steps,
        fmt_f64(traj.dt),
        traj.snapshots.len(),
        traj.front_track.len()
    );
    Ok(EXIT_OK)
}

/// hj_fronts.csv: numeric and explicit zero-set boundaries at `T/3`, `2T/3`
/// and `T` with `c* T = hj_reach`. hj_profile.csv: `u` at `T` for every
/// amplitude.
pub fn cmd_hj(cfg: &RunConfig, out: &Path) -> Result<i32, CliError> {
    let params = cfg.params()?;
    let hj = cfg.hj_config();
    let c_star = compute_cstar(&params, &cfg.theta_grid()?, &cfg.cstar_options())?.c_star;
    let omega = IntervalSet::single(hj.omega.0, hj.omega.1);
    let space = SpaceGrid::with_max_spacing(hj.x_min, hj.x_max, hj.dx)?;
    let mu_max = *hj.mu_list.last().expect("validated nonempty");
    let steepest = cutoff_initial(&omega, mu_max, hj.options.ramp_width, &space)?;
    let lambda_max = 1.1 * max_gradient(&steepest.u, space.spacing()).max(1.0);
    let samples = ((lambda_max / hj.table_step).ceil() as usize + 1).max(16);
    let table = build_h_table(lambda_max, samples, &params, &cfg.theta_grid()?)?;
    let horizon = hj.reach / c_star;

    let mut fronts = CsvDoc::new([
        "t",
        "mu",
        "left",
        "right",
        "explicit_left",
        "explicit_right",
    ]);
    fronts.comment(&format!("c* = {}", fmt_f64(c_star)));
    let mut last = None;
    for k in 1..=3 {
        let t = horizon * k as f64 / 3.0;
        let sol = hj_solve(&omega, &hj.mu_list, t, &space, &table, &hj.options)?;
        let (a, b) = explicit_zero_set(&omega, c_star, t)
            .hull()
            .expect("nonempty omega");
        for run in &sol.runs {
            let (l, r) = match run.boundaries {
                Some((l, r)) => (fmt_f64(l), fmt_f64(r)),
                None => (String::new(), String::new()),
            };
            fronts.row([fmt_f64(t), fmt_f64(run.mu), l, r, fmt_f64(a), fmt_f64(b)]);
        }
        last = Some(sol);
    }
    fronts.write(out, "hj_fronts.csv")?;

    let sol = last.expect("three probe times");
    let mut header = vec!["x".to_string()];
    header.extend(sol.runs.iter().map(|r| format!("u_mu{}", fmt_f64(r.mu))));
    let mut profile = CsvDoc::new(&header);
    profile.comment(&format!("t = {}", fmt_f64(horizon)));
    let mut row = Vec::with_capacity(sol.runs.len() + 1);
    for i in 0..space.node_count {
        row.clear();
        row.push(space.node(i));
        row.extend(sol.runs.iter().map(|r| r.field.u[i]));
        profile.floats(&row);
    }
    profile.write(out, "hj_profile.csv")?;
    println!(
        "c* = {}; T = {}; {} amplitudes",
        fmt_f64(c_star),
        fmt_f64(horizon),
        sol.runs.len()
    );
    Ok(EXIT_OK)
}

/// report.csv. Wall-clock times go to stderr only, so the file depends on
/// the configuration alone.
pub fn cmd_verify(cfg: &RunConfig, out: &Path) -> Result<VerificationReport, CliError> {
    let report = run_verification(&cfg.verify_config()?)?;
    report_csv(&report).write(out, "report.csv")?;
    for (r, t) in report.results.iter().zip(&report.wall_clock) {
        println!("{:<17} {:<12} {}", r.name, r.outcome.to_string(), r.notes);
        eprintln!("{} took {:.2} s", r.name, t.as_secs_f64());
        if r.outcome == Outcome::Inconclusive {
            println!(
                "note: {} is inconclusive and does not affect the exit code",
                r.name
            );
        }
    }
    Ok(report)
}

pub fn report_csv(report: &VerificationReport) -> CsvDoc {
    let mut doc = CsvDoc::new([
        "check",
        "passed",
        "measured",
        "expected",
        "tolerance",
        "notes",
    ]);
    doc.comment(&format!("fingerprint {}", report.fingerprint));
    for r in &report.results {
        let passed = match r.outcome {
            Outcome::Pass => "true",
            Outcome::Fail => "false",
            Outcome::Inconclusive => "inconclusive",
        };
        let measured = r
            .measured
            .iter()
            .map(|&v| fmt_f64(v))
            .collect::<Vec<_>>()
            .join(";");
        doc.row([
            r.name.clone(),
            passed.to_string(),
            measured,
            r.expected.to_string(),
            fmt_f64(r.tolerance),
            r.notes.clone(),
        ]);
    }
    doc
}
