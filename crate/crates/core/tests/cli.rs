use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use aoi_mesh::experiment::compare;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_aoi-mesh"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const SMALL: &str = "\
# tiny sweep
lambda = 2e-2
window = 40
warmup_slots = 100
measure_slots = 400
topology_count = 2
sweep_axis = xi
sweep_values = 0.4, 0.8
";

#[test]
fn sweep_writes_all_columns_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "s.cfg", SMALL);
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for out in [&a, &b] {
        let o = run(&["sweep", "--spec", &spec, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (ta, tb) = (fs::read_to_string(&a).unwrap(), fs::read_to_string(&b).unwrap());
    assert_eq!(ta, tb);
    let body: Vec<&str> = ta.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "swept_value,sim_aoi,sim_stderr,analytic_aoi,meanfield_aoi,flags,seed,git_describe");
    assert_eq!(body.len(), 3);
    for row in &body[1..] {
        let cells: Vec<&str> = row.split(',').collect();
        assert!(cells[1..5].iter().all(|c| c.parse::<f64>().is_ok()), "{row}");
        assert_eq!(cells[6], "1");
    }
    assert!(ta.contains("# sweep_values = 0.4,0.8"));
    assert!(ta.contains("# topology_count = 2"));

    let o = run(&["compare", a.to_str().unwrap(), b.to_str().unwrap(), "--tolerance", "0"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("max_gap = 0 "));
}

#[test]
fn seed_flag_overrides_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "s.cfg", SMALL);
    let o1 = run(&["simulate", "--spec", &spec]);
    let o2 = run(&["simulate", "--spec", &spec, "--seed", "7"]);
    assert!(o1.status.success() && o2.status.success());
    let (s1, s2) = (String::from_utf8(o1.stdout).unwrap(), String::from_utf8(o2.stdout).unwrap());
    assert!(s2.contains("# seed = 7"));
    let r = compare(&s1, &s2, "sim_aoi", "sim_aoi", 0.5).unwrap();
    assert!(r.max_gap > 0.0);
}

#[test]
fn parse_errors_exit_2_and_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never.csv");
    for (text, needle) in [
        ("sweep_axis = xi\nsweep_values =\n", "line 2"),
        ("mode = analyze\nxi = 0\n", "xi out of (0,1]"),
        ("mode = analyze\nalpha = 2\n", "alpha must exceed 2"),
        ("mode = analyze\nbogus = 1\n", "unknown key"),
        ("mode = analyze\nxi = 0.5\nxi = 0.6\n", "more than once"),
    ] {
        let spec = write(dir.path(), "bad.cfg", text);
        let o = run(&["analyze", "--spec", &spec, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{text}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(needle), "{text}: {err}");
        assert!(!out.exists());
    }
}

#[test]
fn sweep_subcommand_needs_a_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "s.cfg", "mode = analyze\n");
    assert_eq!(run(&["sweep", "--spec", &spec]).status.code(), Some(2));
    let bare = write(dir.path(), "bare.cfg", "lambda = 1e-6\n");
    assert_eq!(run(&["sweep", "--spec", &bare]).status.code(), Some(2));
    let o = run(&["analyze", "--spec", &bare]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn missing_spec_and_unwritable_output_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.cfg");
    assert_eq!(run(&["analyze", "--spec", missing.to_str().unwrap()]).status.code(), Some(4));
    let spec = write(dir.path(), "s.cfg", "mode = analyze\nlambda = 1e-6\n");
    let out = dir.path().join("no/such/dir/out.csv");
    assert_eq!(run(&["analyze", "--spec", &spec, "--out", out.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn all_rows_failing_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    // so dense that most of the success distribution falls below the grid
    let spec = write(dir.path(), "s.cfg", "mode = analyze\nxi = 1\np = 1\nlambda = 3\n");
    let o = run(&["analyze", "--spec", &spec]);
    assert_eq!(o.status.code(), Some(3));
    let csv = String::from_utf8(o.stdout).unwrap();
    assert!(csv.lines().last().unwrap().contains("divergence_suspected"));
}

#[test]
fn compare_reports_gaps_and_grid_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.csv", "swept_value,sim_aoi,analytic_aoi\n0.1,10,11\n0.2,5,5\n");
    let b = write(dir.path(), "b.csv", "swept_value,sim_aoi\n0.1,1\n0.3,2\n");
    let o = run(&["compare", &a, &a, "--column-b", "analytic_aoi"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("0.1,10,11,0.0909"));
    let o = run(&["compare", &a, &a, "--column-b", "analytic_aoi", "--tolerance", "0.05"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["compare", &a, &b]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("grids differ"));
}

#[test]
fn version_reports_build() {
    let o = run(&["--version"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("aoi-mesh "));
}
