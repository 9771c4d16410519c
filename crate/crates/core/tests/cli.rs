use std::path::Path;
use std::process::Command;

use anisoflow::io::{cmd_run, FieldFile, CSV_NAME, MANIFEST_NAME};
use anisoflow::spectral::{Grid, RealField, L2_COEFF_FACTOR};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_anisoflow"))
}

fn write_config(dir: &Path, init: &str, extra: &str) -> std::path::PathBuf {
    let path = dir.join("run.cfg");
    let text = format!(
        "# small run\ngrid.n = 16\nsolver.nu = 0.1\nsolver.dt = 0.01\nsolver.t_end = 0.05\n\
         init.kind = {init}\ninit.seed = 3\ninit.amplitude = 0.5\noutput.dir = out\n{extra}"
    );
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn norms_of_a_sine() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sine.afld");
    let g = Grid::cubic(16).unwrap();
    FieldFile::Real(vec![RealField::from_fn(g, |x| x[0].sin())]).write(&path).unwrap();
    let out = bin().arg("norms").arg(&path).args(["L2", "H(1)", "Linf"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let values: Vec<f64> = text.lines().map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap()).collect();
    let l2 = L2_COEFF_FACTOR / 2f64.sqrt();
    assert!((values[0] - l2).abs() < 1e-12 * l2, "{text}");
    assert!((values[1] - 0.5f64.sqrt()).abs() < 1e-14, "{text}");
    assert!((values[2] - 1.0).abs() < 1e-14, "{text}");
}

#[test]
fn decompose_lists_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.afld");
    let g = Grid::cubic(16).unwrap();
    FieldFile::Real(vec![RealField::from_fn(g, |x| (2.0 * x[2]).cos())]).write(&path).unwrap();
    let out = bin().arg("decompose").arg(&path).args(["--mode", "hv"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("component,k,l,lp"));
    // a horizontal-mean field has no horizontal block content
    assert!(text.lines().skip(1).all(|l| l.ends_with("0.0000000000000000e0")));
}

#[test]
fn check_reports_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("k.csv");
    let out = bin()
        .args(["check", "k", "--count", "4", "--resolution", "16", "--param", "r=1.7", "--csv"])
        .arg(&csv)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8(out.stdout).unwrap().contains("PASS"));
    let rows = std::fs::read_to_string(csv).unwrap();
    assert_eq!(rows.lines().count(), 1 + 8);
    let out = bin().args(["check", "k", "--param", "q=3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_config_exits_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "zero", "monitor.theta = 0.5\n");
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("run.cfg:10:") && err.contains("α(r)["), "{err}");
}

#[test]
fn zero_field_run_gives_zero_series() {
    let dir = tempfile::tempdir().unwrap();
    let out = cmd_run(write_config(dir.path(), "zero", "")).unwrap();
    assert!(out.failure.is_none());
    assert_eq!(out.records.len(), 6);
    let csv = std::fs::read_to_string(&out.csv_path).unwrap();
    for row in csv.lines().skip(1) {
        let cells: Vec<&str> = row.split(',').collect();
        let n = cells.len();
        for c in &cells[2..n - 2] {
            assert_eq!(c.parse::<f64>().unwrap(), 0.0, "{row}");
        }
        assert_eq!(cells[n - 2], "1");
    }
    assert_eq!(out.snapshots.len(), 6);
}

#[test]
fn reruns_are_bit_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = cmd_run(write_config(a.path(), "random", "output.snapshot_every = 2\n")).unwrap();
    let rb = cmd_run(write_config(b.path(), "random", "output.snapshot_every = 2\n")).unwrap();
    let read = |p: &Path| std::fs::read(p).unwrap();
    assert_eq!(read(&ra.csv_path), read(&rb.csv_path));
    assert_eq!(ra.snapshots.len(), 4);
    for (x, y) in ra.snapshots.iter().zip(&rb.snapshots) {
        assert_eq!(read(x), read(y));
    }
    let manifest = std::fs::read_to_string(a.path().join("out").join(MANIFEST_NAME)).unwrap();
    assert!(manifest.contains("status = ok") && manifest.contains("snapshot = snap_00000005.afld"));
    assert!(a.path().join("out").join(CSV_NAME).exists());
}

#[test]
fn run_subcommand_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "taylor_green", "");
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out").join(CSV_NAME)).unwrap();
    assert_eq!(csv.lines().count(), 7);
}
