use std::fs;
use std::process::Command;

fn drag() -> Command {
    Command::new(env!("CARGO_BIN_EXE_drag"))
}

#[test]
fn run_then_summarize() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("exp.spec");
    fs::write(&spec, "agent = all_on\nn_sbs = 3\ndays = 30\n").unwrap();
    let out = dir.path().join("out");
    let status = drag()
        .args(["run", "--spec"])
        .arg(&spec)
        .arg("--out")
        .arg(&out)
        .args(["--agent", "sota", "--days", "2", "--traces", "2", "--seed", "5"])
        .env("DRAG_WORKERS", "2")
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let text = fs::read_to_string(out.join("spec.txt")).unwrap();
    assert!(text.contains("agent = sota") && text.contains("days = 2") && text.contains("seed = 5"));

    let summary = drag().args(["summarize", "--in"]).arg(&out).output().unwrap();
    assert!(summary.status.success());
    let stdout = String::from_utf8(summary.stdout).unwrap();
    assert!(stdout.starts_with("sota / stationary: 2 days, 2 traces, seed 5"), "{stdout}");
}

#[test]
fn config_errors_exit_nonzero_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.spec");
    fs::write(&spec, "agent = sota\n\nn_sbs = ten\n").unwrap();
    let out = drag()
        .args(["run", "--spec"])
        .arg(&spec)
        .arg("--out")
        .arg(dir.path().join("o"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn placement_failure_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("crowded.spec");
    fs::write(&spec, "agent = all_on\nn_sbs = 200\nsbs_min_dist_m = 900\nplacement_retries = 20\n").unwrap();
    let out = drag()
        .args(["run", "--spec"])
        .arg(&spec)
        .arg("--out")
        .arg(dir.path().join("o"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("placed only"));
}

#[test]
fn summarize_missing_dir_fails() {
    let out = drag().args(["summarize", "--in", "/nonexistent/run"]).output().unwrap();
    assert!(!out.status.success());
}
