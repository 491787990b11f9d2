use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use motility_cli::config::ConfigError;
use motility_cli::RunConfig;
use motility_core::pde::run_simulation;
use proptest::prelude::*;

fn motility(args: &[&str], out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_motility"));
    cmd.args(args);
    if let Some(dir) = out {
        cmd.arg("--out").arg(dir);
    }
    cmd.output().expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// First non-comment line.
fn header(text: &str) -> &str {
    text.lines().find(|l| !l.starts_with('#')).unwrap()
}

#[test]
fn empty_config_gives_defaults() {
    let cfg = RunConfig::parse_str("").unwrap();
    let p = cfg.params().unwrap();
    assert_eq!(
        (p.theta_min, p.theta_max, p.alpha, p.r),
        (1.0, 2.0, 1.0, 1.0)
    );
    assert_eq!(cfg.sim_config().unwrap().epsilon, 1.0);
    assert_eq!(cfg, RunConfig::default());
    let comments_only = RunConfig::parse_str("# nothing\n\n   # still nothing\n").unwrap();
    assert_eq!(comments_only, cfg);
}

#[test]
fn inverted_trait_interval_names_both_keys() {
    let err = RunConfig::parse_str("theta_min = 3\ntheta_max = 2\n").unwrap_err();
    let msg = err.to_string();
    assert!(
        msg.contains("theta_min") && msg.contains("theta_max"),
        "{msg}"
    );
}

#[test]
fn parse_errors_carry_line_numbers() {
    match RunConfig::parse_str("alpha = 2\n# fine\nno equals sign here\n") {
        Err(ConfigError::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    match RunConfig::parse_str("\nunknown_key = 1\n") {
        Err(ConfigError::Parse { line, message, .. }) => {
            assert_eq!(line, 2);
            assert!(message.contains("unknown_key"));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn range_errors_name_key_and_interval() {
    for (text, key, interval) in [
        ("alpha = -1", "alpha", "(0, inf)"),
        ("epsilon = 1.5", "epsilon", "(0, 1]"),
        ("theta_nodes = 2", "theta_nodes", "[3, 1000000]"),
        ("cfl_factor = 1", "cfl_factor", "(0, 1)"),
        ("scheme = rk4", "scheme", "imex, explicit"),
        ("r = nan", "r", "(0, inf)"),
    ] {
        let msg = RunConfig::parse_str(text).unwrap_err().to_string();
        assert!(msg.contains(key) && msg.contains(interval), "{text}: {msg}");
    }
    let msg = RunConfig::parse_str("hj_mu_list = 40,10")
        .unwrap_err()
        .to_string();
    assert!(msg.contains("hj_mu_list"), "{msg}");
}

#[test]
fn inline_comments_and_overrides() {
    let cfg = RunConfig::load(None, &["alpha=3".into(), "alpha = 4 # last wins".into()]).unwrap();
    assert_eq!(cfg.params().unwrap().alpha, 4.0);
    let err = RunConfig::load(None, &["alpha".into()])
        .unwrap_err()
        .to_string();
    assert!(err.contains("--set #1"), "{err}");
}

#[test]
fn default_round_trip_and_reference() {
    let cfg = RunConfig::default();
    assert_eq!(RunConfig::parse_str(&cfg.serialize()).unwrap(), cfg);
    assert_eq!(RunConfig::parse_str(&RunConfig::reference()).unwrap(), cfg);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialized_config_reparses_identically(
        theta_min in 0.01f64..10.0,
        width in 1e-6f64..10.0,
        alpha in 1e-6f64..1e3,
        eps in 1e-3f64..=1.0,
        mu0 in 0.1f64..50.0,
        gap in 1e-3f64..100.0,
        nodes in 3usize..500,
        explicit in any::<bool>(),
    ) {
        let overrides = vec![
            format!("theta_min = {theta_min}"),
            format!("theta_max = {}", theta_min + width),
            format!("alpha = {alpha:e}"),
            format!("epsilon = {eps}"),
            format!("hj_mu_list = {mu0}, {}", mu0 + gap),
            format!("sim_theta_nodes = {nodes}"),
            format!("scheme = {}", if explicit { "explicit" } else { "imex" }),
            "verify_checks = hj_agreement, cstar_bounds".to_string(),
        ];
        let cfg = RunConfig::load(None, &overrides).unwrap();
        let again = RunConfig::parse_str(&cfg.serialize()).unwrap();
        prop_assert_eq!(&again, &cfg);
        prop_assert_eq!(again.serialize(), cfg.serialize());
    }
}

#[test]
fn spectral_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = motility(&["spectral"], Some(dir.path()));
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let disp = read(dir.path(), "dispersion.csv");
    assert_eq!(header(&disp), "lambda,c,H,gamma");
    let rows: Vec<Vec<f64>> = disp
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 50);
    assert!(rows.iter().all(|r| r[0] > 0.0));
    assert_eq!((rows[0][0], rows[49][0]), (0.05, 10.0));
    // c = H / lambda survives the text round trip exactly
    assert!(rows.iter().all(|r| r[1] == r[2] / r[0]));

    let cstar = read(dir.path(), "cstar.csv");
    let mut lines = cstar.lines();
    assert_eq!(lines.next(), Some("# H(0) = r = 1"));
    assert_eq!(
        lines.next(),
        Some("c_star,lambda_star,lower_bound,upper_bound")
    );
    let v: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(v[2], 2.0);
    assert_eq!(v[3], 2.0 * 2f64.sqrt());
    assert!(v[2] <= v[0] && v[0] <= v[3]);

    let again = tempfile::tempdir().unwrap();
    motility(&["spectral"], Some(again.path()));
    for name in ["dispersion.csv", "cstar.csv"] {
        assert_eq!(read(dir.path(), name), read(again.path(), name), "{name}");
    }
    let leftovers = fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(leftovers, 2);
}

const SMALL_SIM: &[&str] = &[
    "--set",
    "x_min=-5",
    "--set",
    "x_max=15",
    "--set",
    "x_nodes=101",
    "--set",
    "sim_theta_nodes=9",
    "--set",
    "x_halfwidth=1",
    "--set",
    "horizon=2",
    "--set",
    "snapshot_stride=40",
];

#[test]
fn simulate_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["simulate"];
    args.extend_from_slice(SMALL_SIM);
    let out = motility(&args, Some(dir.path()));
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let overrides: Vec<String> = SMALL_SIM.chunks(2).map(|c| c[1].to_string()).collect();
    let cfg = RunConfig::load(None, &overrides)
        .unwrap()
        .sim_config()
        .unwrap();
    let traj = run_simulation(&cfg).unwrap();

    let front = read(dir.path(), "front_track.csv");
    assert_eq!(header(&front), "t,x_front");
    assert_eq!(front.lines().count() - 1, traj.front_track.len());
    let sup = read(dir.path(), "sup_track.csv");
    assert_eq!(header(&sup), "t,sup_n");
    assert_eq!(sup.lines().count() - 1, traj.steps + 1);

    for k in 0..traj.snapshots.len() {
        let snap = read(dir.path(), &format!("snapshot_{k}.csv"));
        let head: Vec<&str> = header(&snap).split(',').collect();
        assert_eq!(head[0], "x");
        let thetas: Vec<f64> = head[1..].iter().map(|v| v.parse().unwrap()).collect();
        assert_eq!(thetas, cfg.theta.nodes());
        let body: Vec<&str> = snap
            .lines()
            .filter(|l| !l.starts_with('#'))
            .skip(1)
            .collect();
        assert_eq!(body.len(), cfg.space.node_count);
        let first: Vec<f64> = body[3].split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(first[0], cfg.space.node(3));
        assert_eq!(&first[1..], traj.snapshots[k].column(3));
    }
    assert!(!dir
        .path()
        .join(format!("snapshot_{}.csv", traj.snapshots.len()))
        .exists());

    let again = tempfile::tempdir().unwrap();
    motility(&args, Some(again.path()));
    for name in ["front_track.csv", "sup_track.csv", "snapshot_1.csv"] {
        assert_eq!(read(dir.path(), name), read(again.path(), name), "{name}");
    }
}

#[test]
fn simulate_horizon_zero_writes_one_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["simulate"];
    args.extend_from_slice(SMALL_SIM);
    args.extend_from_slice(&["--set", "horizon=0"]);
    let out = motility(&args, Some(dir.path()));
    assert_eq!(out.status.code(), Some(0));
    let snapshots = fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .file_name()
                .to_string_lossy()
                .starts_with("snapshot_")
        })
        .count();
    assert_eq!(snapshots, 1);
}

#[test]
fn hj_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = motility(
        &["hj", "--set", "hj_dx=0.1", "--set", "hj_mu_list=5,20"],
        Some(dir.path()),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let fronts = read(dir.path(), "hj_fronts.csv");
    assert_eq!(
        header(&fronts),
        "t,mu,left,right,explicit_left,explicit_right"
    );
    assert_eq!(
        fronts.lines().filter(|l| !l.starts_with('#')).count(),
        1 + 3 * 2
    );
    let profile = read(dir.path(), "hj_profile.csv");
    assert_eq!(header(&profile), "x,u_mu5,u_mu20");
    for line in profile.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(v[1] <= 0.0 && v[2] <= 0.0);
        // larger amplitude lies below
        assert!(v[2] <= v[1]);
    }
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = motility(
        &["verify", "--set", "verify_checks=cstar_bounds"],
        Some(dir.path()),
    );
    assert_eq!(ok.status.code(), Some(0));
    let report = read(dir.path(), "report.csv");
    assert_eq!(
        header(&report),
        "check,passed,measured,expected,tolerance,notes"
    );
    assert!(report.lines().any(|l| l.starts_with("cstar_bounds,true,")));

    let sabotaged = motility(
        &[
            "verify",
            "--set",
            "verify_checks=cstar_bounds",
            "--set",
            "cstar_shift=5",
        ],
        Some(dir.path()),
    );
    assert_eq!(sabotaged.status.code(), Some(1));
    assert!(read(dir.path(), "report.csv")
        .lines()
        .any(|l| l.starts_with("cstar_bounds,false,")));

    let missing = dir.path().join("does-not-exist");
    let out = motility(
        &["verify", "--set", "verify_checks=cstar_bounds"],
        Some(&missing),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("does-not-exist"));
}

#[test]
fn inconclusive_check_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = motility(
        &[
            "verify",
            "--set",
            "verify_checks=front_speed",
            "--set",
            "amplitude=0",
            "--set",
            "horizon=1",
        ],
        Some(dir.path()),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(read(dir.path(), "report.csv")
        .lines()
        .any(|l| l.starts_with("front_speed,inconclusive,")));
    assert!(String::from_utf8_lossy(&out.stdout).contains("inconclusive"));
}

#[test]
fn config_file_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    fs::write(&path, "# run\nalpha = 1\ntheta_min = zero\n").unwrap();
    let out = motility(
        &["spectral", "--config", path.to_str().unwrap()],
        Some(dir.path()),
    );
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(":3:") && err.contains("theta_min"), "{err}");

    let out = motility(
        &["spectral", "--config", "/nonexistent/run.cfg"],
        Some(dir.path()),
    );
    assert_eq!(out.status.code(), Some(2));

    fs::write(&path, "lambda_samples = 3\ntheta_nodes = 21\n").unwrap();
    let out = motility(
        &["spectral", "--config", path.to_str().unwrap()],
        Some(dir.path()),
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(read(dir.path(), "dispersion.csv").lines().count(), 4);
}
