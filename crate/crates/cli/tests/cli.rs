use std::fs;
use std::path::Path;
use std::process::Command;

const QSL: &str = env!("CARGO_BIN_EXE_qsl");

fn qsl(args: &[&str]) -> std::process::Output {
    Command::new(QSL).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, json: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, json).unwrap();
    path.to_string_lossy().into_owned()
}

fn rows(path: &Path) -> Vec<csv::StringRecord> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|x| x.unwrap()).collect()
}

#[test]
fn sweep_csv_has_stable_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"jc": {"gamma0_grid": [0.4, 3.0]}}"#);
    let out = dir.path().join("out");
    let o = qsl(&["--config", &cfg, "--out", out.to_str().unwrap(), "jc-sweep"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("jc_sweep.csv")).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "gamma0,lambda,tau,theta_r,tau_hat,tau_hat_m,bound_previous,bound_max,bound_beta,beta,non_markovianity,bound_final1,beta_estimate"
    );
    assert_eq!(text.lines().count(), 3);
    assert!(out.join("jc_sweep.svg").exists());
}

#[test]
fn weak_point_saturates_and_is_markovian() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"jc": {"gamma0_grid": [0.4]}}"#);
    let out = dir.path().join("out");
    assert!(qsl(&["--config", &cfg, "--out", out.to_str().unwrap(), "jc-sweep"])
        .status
        .success());
    let r = &rows(&out.join("jc_sweep.csv"))[0];
    assert_eq!(r[4].parse::<f64>().unwrap(), 10.0);
    assert_eq!(&r[5], "");
    assert_eq!(r[10].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn beta_estimate_approaches_two_over_pi() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"jc": {"gamma0_grid": [200.0]}}"#);
    let out = dir.path().join("out");
    assert!(qsl(&["--config", &cfg, "--out", out.to_str().unwrap(), "jc-sweep"])
        .status
        .success());
    let r = &rows(&out.join("jc_sweep.csv"))[0];
    let beta: f64 = r[12].parse().unwrap();
    assert!((beta - 2.0 / std::f64::consts::PI).abs() <= 0.05, "{beta}");
}

#[test]
fn outputs_are_byte_identical_across_runs_and_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"jc": {"points": 16}}"#);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(qsl(&[
        "--config",
        &cfg,
        "--out",
        a.to_str().unwrap(),
        "--jobs",
        "1",
        "jc-sweep"
    ])
    .status
    .success());
    assert!(qsl(&[
        "--config",
        &cfg,
        "--out",
        b.to_str().unwrap(),
        "--jobs",
        "3",
        "jc-sweep"
    ])
    .status
    .success());
    for name in ["jc_sweep.csv", "jc_sweep.svg"] {
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
    for out in [&a, &b] {
        assert!(qsl(&[
            "--out",
            out.to_str().unwrap(),
            "ineq-check",
            "--trials",
            "50",
            "--seed",
            "9"
        ])
        .status
        .success());
    }
    assert_eq!(
        fs::read(a.join("ineq_report.txt")).unwrap(),
        fs::read(b.join("ineq_report.txt")).unwrap()
    );
}

#[test]
fn trajectory_reports_first_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = qsl(&["--out", out.to_str().unwrap(), "jc-trajectory", "--gamma0", "10"]);
    assert!(o.status.success());
    let txt = fs::read_to_string(out.join("jc_trajectory.txt")).unwrap();
    let line = txt.lines().find(|l| l.starts_with("rho11 first reaches 0")).unwrap();
    let t: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!((t - 0.8242034311692071).abs() < 1e-3);
    let header = fs::read_to_string(out.join("jc_trajectory.csv")).unwrap();
    assert!(header.starts_with("t,rho11,theta_r,dissipator_opnorm,gamma_rate\n"));
}

#[test]
fn small_dot_run_writes_report_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"dot": {"n1": 40, "n2": 40, "coupling": 0.08, "tau": 3.0, "n_steps": 150, "seeds": [0, 1]}}"#,
    );
    let out = dir.path().join("out");
    let o = qsl(&[
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "dot-run",
        "--kind",
        "coherent",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = rows(&out.join("dot_coherent_summary.csv"));
    // One row per seed and Hamiltonian-spread convention, configured one first.
    assert_eq!(summary.len(), 4);
    assert_eq!(&summary[0][1], "half");
    assert_eq!(&summary[1][1], "full");
    let report = fs::read_to_string(out.join("dot_coherent_report.txt")).unwrap();
    assert!(report.contains("ensemble mean +- stdev"));
    // Non-default physics has no published reference to compare with.
    assert!(!report.contains("closest h_spread convention"));
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), r#"{"jc": {"lamda": 1.0}}"#);
    let o = qsl(&["--config", &bad, "jc-sweep"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());

    let o = qsl(&[
        "--config",
        dir.path().join("missing.json").to_str().unwrap(),
        "jc-sweep",
    ]);
    assert_eq!(o.status.code(), Some(2));

    let negative = write_config(dir.path(), r#"{"jc": {"tau": -1.0}}"#);
    assert_eq!(qsl(&["--config", &negative, "jc-sweep"]).status.code(), Some(2));

    let out = dir.path().join("out");
    let o = qsl(&["--out", out.to_str().unwrap(), "--beta", "0.5,1", "jc-sweep"]);
    assert_eq!(o.status.code(), Some(2));
}
