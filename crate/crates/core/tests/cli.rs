use std::path::Path;
use std::process::{Command, Output};

fn nilflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilflow"))
        .args(args)
        .env_remove("NILFLOW_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn check_emitted_catalog_file() {
    let dir = tempfile::tempdir().unwrap();
    let doc = nilflow(&["catalog", "emit", "metivier5"]);
    assert!(doc.status.success());
    let path = write(dir.path(), "metivier5.json", &stdout(&doc));
    let o = nilflow(&["check", &path]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("carnot: true, metivier: true, h_type: false"));
}

#[test]
fn jacobi_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = r#"{"dim": 3, "basis": ["a", "b", "c"],
        "brackets": [{"i": 0, "j": 1, "out": [{"k": 2, "c": 1.0}]},
                     {"i": 0, "j": 2, "out": [{"k": 0, "c": 1.0}]}],
        "metric": [[1,0,0],[0,1,0],[0,0,1]]}"#;
    let path = write(dir.path(), "bad.json", bad);
    let o = nilflow(&["check", &path]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("E_JACOBI"), "{}", stderr(&o));
}

#[test]
fn missing_file_exits_three() {
    let o = nilflow(&["check", "/nonexistent/algebra.json"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("E_IO"));
}

#[test]
fn hr_reports_and_failures() {
    let dir = tempfile::tempdir().unwrap();
    let diag = write(dir.path(), "diag.csv", "1,0\n0,2\n");
    let o = nilflow(&["hr", &diag, "1,1", "1,1"]);
    assert!(stdout(&o).contains("(d)= (1,0,0,1), type (2,0,0)"), "{}", stdout(&o));
    let anti = write(dir.path(), "anti.csv", "0,1.5\n0.7,0\n");
    let o = nilflow(&["hr", &anti, "1,1", "1,1"]);
    assert!(stdout(&o).contains("type (0,2,0)"), "{}", stdout(&o));
    let complex = write(dir.path(), "complex.csv", "1,1\n1,-1\n");
    let o = nilflow(&["hr", &complex, "1,1", "1,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("E_NOT_DIAGONALIZABLE"));
}

#[test]
fn simulate_writes_csv_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("traj.csv");
    let o = nilflow(&[
        "simulate",
        "builtin:heisenberg3",
        "--y0",
        "1,0|1",
        "--t",
        "6.283185307179586",
        "--samples",
        "100",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header, ["t", "Y_1", "Y_2", "Y_3", "H", "dH", "dJ"]);
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 100);
    for r in &rows {
        assert!(r[5].abs() <= 1e-12);
    }
    let (first, last) = (&rows[0], rows.last().unwrap());
    assert!((first[1] - last[1]).abs() < 1e-12 && (first[2] - last[2]).abs() < 1e-12);
}

#[test]
fn simulate_group_and_negative_time() {
    let o = nilflow(&[
        "simulate", "builtin:heisenberg3", "--y0", "1,0,1", "--t", "10", "--samples", "11", "--group", "4096",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r[9] <= 1e-6));
    let o = nilflow(&["simulate", "builtin:heisenberg3", "--y0", "1,0,1", "--t", "-3", "--samples", "4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("-3.0000000000000000e0"));
}

#[test]
fn seed_comes_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_nilflow"))
        .args(["--format", "json", "cartan", "D", "2", "2", "--l", "1", "--trials", "4"])
        .env("NILFLOW_SEED", "42")
        .output()
        .unwrap();
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["seed"], 42);
    assert_eq!(v["report"]["matches"], 4);
    let again = Command::new(env!("CARGO_BIN_EXE_nilflow"))
        .args(["--format", "json", "cartan", "D", "2", "2", "--l", "1", "--trials", "4"])
        .env("NILFLOW_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn cartan_parameter_errors() {
    let o = nilflow(&["cartan", "D", "3", "3", "--l", "2", "--k", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("E_PARAMS") && stderr(&o).contains("usage"));
}
