//! End-to-end runs of the `sepvol` binary.

use std::path::Path;
use std::process::{Command, Output};

fn sepvol(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sepvol"))
        .current_dir(dir)
        .arg("-q")
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn without_timestamp(text: &str) -> String {
    text.lines()
        .filter(|l| !l.contains("created"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn zero_points_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = sepvol(dir.path(), &["estimate", "--points", "0"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("points"));
}

#[test]
fn distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&sepvol(dir.path(), &["estimate", "--bogus"])), 2);
    assert_eq!(
        code(&sepvol(dir.path(), &["fit", "--input", "missing.csv"])),
        3
    );
    std::fs::write(dir.path().join("bad.csv"), "mu,nu,n_sep,F\n0,0,x,0\n").unwrap();
    assert_eq!(code(&sepvol(dir.path(), &["fit", "--input", "bad.csv"])), 4);
    std::fs::write(dir.path().join("bad.toml"), "points = \"many\"\n").unwrap();
    assert_eq!(
        code(&sepvol(dir.path(), &["--config", "bad.toml", "estimate"])),
        4
    );
    assert_eq!(
        code(&sepvol(dir.path(), &["integrate", "--model", "guess"])),
        2
    );
}

#[test]
fn estimate_fit_integrate_chain() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = sepvol(
        d,
        &[
            "estimate", "--case", "real", "--points", "200000", "--grid", "41", "--out", "f.csv",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(d.join("f.csv")).unwrap();
    assert!(csv.starts_with("mu,nu,n_sep,F\n"));
    assert!(csv.contains("# config={"));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("f.csv.json")).unwrap()).unwrap();
    assert_eq!(summary["points"], 200000);
    assert_eq!(summary["config"]["grid"], 41);

    assert_eq!(
        code(&sepvol(
            d,
            &["fit", "--input", "f.csv", "--out", "fit.json"]
        )),
        0
    );
    let fit: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("fit.json")).unwrap()).unwrap();
    let a = fit["report"]["model"]["a"].as_f64().unwrap();
    assert!((a - 0.5).abs() < 0.1);
    let residuals = std::fs::read_to_string(d.join("fit.residuals.csv")).unwrap();
    assert!(residuals.starts_with("nu,residual\n"));
    assert_eq!(
        residuals.lines().filter(|l| !l.starts_with('#')).count(),
        42
    );

    let o = sepvol(
        d,
        &["integrate", "--model", "fitted:fit.json", "--out", "v.json"],
    );
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("V_sep"));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("v.json")).unwrap()).unwrap();
    assert_eq!(v["report"]["case"], "real");
}

#[test]
fn integrate_closed_form_complex() {
    let dir = tempfile::tempdir().unwrap();
    let o = sepvol(
        dir.path(),
        &["integrate", "--case", "complex", "--model", "paper"],
    );
    assert_eq!(code(&o), 0);
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("2.7382757"), "{out}");
}

#[test]
fn embedded_config_reproduces_output() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = sepvol(
        d,
        &[
            "estimate",
            "--case",
            "complex",
            "--points",
            "30000",
            "--grid",
            "11",
            "--workers",
            "2",
            "--out",
            "a.csv",
        ],
    );
    assert_eq!(code(&o), 0);
    let first = std::fs::read_to_string(d.join("a.csv")).unwrap();
    let config = first
        .lines()
        .find_map(|l| l.strip_prefix("# config="))
        .unwrap();
    std::fs::rename(d.join("a.csv"), d.join("original.csv")).unwrap();
    std::fs::write(d.join("cfg.json"), config).unwrap();
    assert_eq!(code(&sepvol(d, &["--config", "cfg.json", "estimate"])), 0);
    let second = std::fs::read_to_string(d.join("a.csv")).unwrap();
    assert_eq!(without_timestamp(&first), without_timestamp(&second));
}

#[test]
fn toml_config_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("c.toml"),
        "case = \"real\"\npoints = 5000\ngrid = 7\n",
    )
    .unwrap();
    assert_eq!(
        code(&sepvol(
            d,
            &["--config", "c.toml", "estimate", "--grid", "9", "--out", "o.csv"]
        )),
        0
    );
    let csv = std::fs::read_to_string(d.join("o.csv")).unwrap();
    assert!(csv.contains("# points=5000"));
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 10);
}

#[test]
fn jacobian_table_and_dump() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = sepvol(d, &["jacobian", "--rows", "4", "--nu-max", "2"]);
    assert_eq!(code(&o), 0);
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.starts_with("nu,jac_real,jac_complex\n"));
    assert_eq!(out.lines().filter(|l| !l.starts_with('#')).count(), 5);

    let o = sepvol(
        d,
        &[
            "estimate",
            "--points",
            "100",
            "--grid",
            "3",
            "--dump-points",
            "p.bin",
            "--out",
            "e.csv",
        ],
    );
    assert_eq!(code(&o), 0);
    assert_eq!(
        std::fs::metadata(d.join("p.bin")).unwrap().len(),
        100 * 6 * 8
    );
}

#[test]
fn verify_subset_and_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = sepvol(d, &["verify", "--only", "4,8,9", "--out", "v.json"]);
    assert_eq!(code(&o), 0);
    let out = String::from_utf8_lossy(&o.stdout);
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 3);

    let o = sepvol(
        d,
        &[
            "verify", "--case", "real", "--points", "200000", "--only", "1",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));

    let o = sepvol(
        d,
        &[
            "pipeline", "--case", "real", "--points", "100000", "--grid", "51", "--out", "run",
        ],
    );
    assert_eq!(code(&o), 0);
    for f in [
        "real_fgrid.csv",
        "real_fit.json",
        "real_fit.residuals.csv",
        "real_volume_fitted.json",
        "real_volume_closed_form.json",
    ] {
        assert!(d.join("run").join(f).exists(), "{f}");
    }
}
