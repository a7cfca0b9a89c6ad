use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ebmono(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ebmono")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) {
    let out = ebmono(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn write_data(dir: &Path, body: &str) -> String {
    let path = dir.join("data.txt");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn fit_writes_grenander_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let data = write_data(tmp.path(), "1.0\n3.0\n");
    let out = tmp.path().join("out");
    ok(&["fit", "--data", &data, "--out", out.to_str().unwrap(), "--iters", "1", "--burnin", "0"]);
    let csv = read(&out, "grenander.csv");
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(csv.lines().next().unwrap(), "component,knot,height,weight,location");
    assert_eq!(rows, vec![vec![1.0, 1.0, 0.5, 0.25, 1.0], vec![2.0, 3.0, 0.25, 0.75, 3.0]]);
    let band = read(&out, "band.csv");
    assert_eq!(band.lines().count(), 513);
    let meta: serde_json::Value = serde_json::from_str(&read(&out, "meta.json")).unwrap();
    assert_eq!(meta["summary"]["n"], 2);
    assert_eq!(meta["summary"]["S"], 2);
    assert!(meta["summary"]["c"].is_f64() && meta["summary"]["delta"].is_f64());
    assert!(meta["wall_clock_seconds"].is_f64());
    assert!(!out.join("draws.csv").exists());
}

#[test]
fn fit_is_deterministic_and_replayable() {
    let tmp = tempfile::tempdir().unwrap();
    let data = write_data(tmp.path(), "x\n0.2\n0.9\n0.1\n1.7\n0.4\n0.35\n");
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    for dir in [&a, &b] {
        ok(&["fit", "--data", &data, "--out", dir.to_str().unwrap(), "--iters", "300", "--burnin", "100", "--seed", "9", "--emit-draws"]);
    }
    assert_eq!(read(&a, "band.csv"), read(&b, "band.csv"));
    assert_eq!(read(&a, "draws.csv"), read(&b, "draws.csv"));
    let components = read(&a, "grenander.csv").lines().count() - 1;
    assert_eq!(read(&a, "draws.csv").lines().count(), 1 + 300 * components);

    let meta = a.join("meta.json");
    ok(&["replay", "--meta", meta.to_str().unwrap(), "--out", c.to_str().unwrap()]);
    for name in ["grenander.csv", "band.csv", "draws.csv"] {
        assert_eq!(read(&a, name), read(&c, name), "{name}");
    }

    let d = tmp.path().join("d");
    ok(&["fit", "--data", &data, "--out", d.to_str().unwrap(), "--iters", "300", "--burnin", "100", "--seed", "10"]);
    assert_ne!(read(&a, "band.csv"), read(&d, "band.csv"));
}

#[test]
fn failures_leave_no_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let missing = tmp.path().join("missing.txt");
    let res = ebmono(&["fit", "--data", missing.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(!res.status.success());
    assert!(!out.exists());

    let data = write_data(tmp.path(), "0.5\n-1.0\n");
    let res = ebmono(&["grenander", "--data", &data, "--out", out.to_str().unwrap()]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("data.txt:2:"));
    assert!(!out.exists());
}

#[test]
fn invalid_truth_lists_valid_names() {
    let tmp = tempfile::tempdir().unwrap();
    let res = ebmono(&["simulate", "--truth", "gamma", "--n", "100", "--x", "1", "--out", tmp.path().to_str().unwrap()]);
    assert!(!res.status.success());
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("exponential") && err.contains("halfnormal"), "{err}");
}

#[test]
fn simulate_report_shape_and_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        ok(&[
            "simulate", "--truth", "exponential", "--n", "100", "--x", "1.0", "--reps", "20", "--seed", "7",
            "--burnin", "200", "--iters", "400", "--out", dir.to_str().unwrap(),
        ]);
    }
    let csv = read(&a, "coverage.csv");
    assert_eq!(csv, read(&b, "coverage.csv"));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    let header: Vec<&str> = lines[0].split(',').collect();
    let row: Vec<&str> = lines[1].split(',').collect();
    let field = |name: &str| row[header.iter().position(|h| *h == name).unwrap()];
    let coverage: f64 = field("coverage").parse().unwrap();
    assert!((0.0..=1.0).contains(&coverage));
    assert_eq!(field("replications"), "20");
    assert!(a.join("meta.json").exists());
}

#[test]
fn rate_report_has_one_row_per_n() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("r");
    ok(&[
        "rate", "--truth", "exponential", "--n", "100,400,1600", "--reps", "5", "--burnin", "100", "--iters", "200",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(read(&out, "rate.csv").lines().count(), 4);
}

#[test]
fn grenander_command_matches_fit() {
    let tmp = tempfile::tempdir().unwrap();
    let data = write_data(tmp.path(), "2.0\n3.0\n");
    let out = tmp.path().join("g");
    ok(&["grenander", "--data", &data, "--out", out.to_str().unwrap()]);
    let csv = read(&out, "grenander.csv");
    let row: Vec<f64> = csv.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(csv.lines().count(), 2);
    assert_eq!(row, vec![1.0, 3.0, 1.0 / 3.0, 1.0, 3.0]);
}
