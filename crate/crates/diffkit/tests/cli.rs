//! Black-box tests of the command-line binary: output shapes and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_diffkit"))
}

fn scenario_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn print_defaults_emits_a_loadable_scenario() {
    let out = bin().arg("--print-defaults").output().unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("[signal]"));
    assert!(text.contains("[[families]]"));
    // the template must be accepted by run itself
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("default.toml");
    std::fs::write(&path, &text).unwrap();
    let out = bin()
        .args(["run", path.to_str().unwrap(), "--format", "csv"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn run_writes_trajectory_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let scn = scenario_dir().join("first_order_chatter.toml");
    let out = bin()
        .args([
            "run",
            scn.to_str().unwrap(),
            "--out-dir",
            dir.path().to_str().unwrap(),
            "--format",
            "csv",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("label,settling_time_e1"));
    assert!(text.contains("sliding-mode,"));
    for label in ["sliding-mode", "linear", "power"] {
        let file = dir.path().join(format!("first-order-chatter_{label}.csv"));
        let body = std::fs::read_to_string(&file).unwrap();
        assert!(body.starts_with("t,x1,x2,v0,dv0,v_meas,e1,e2\n"));
        assert_eq!(body.lines().count(), 3002);
    }
}

#[test]
fn missing_scenario_exits_4_and_bad_scenario_exits_2() {
    let out = bin().args(["run", "/nonexistent/x.toml"]).output().unwrap();
    assert_eq!(out.status.code(), Some(4));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "name = \"x\"\n").unwrap();
    let out = bin().args(["run", path.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn diverging_run_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("diverge.toml");
    std::fs::write(
        &path,
        r#"
name = "diverge"

[signal]
kind = "constant"
offset = 0.0

[sim]
dt = 0.1
t_end = 50.0
method = "euler"
x0 = { x1 = 1.0, x2 = 0.0 }

[[families]]
kind = "linear"
params = { a1 = 2.0, a2 = 1.0, tau = 1e-6 }
"#,
    )
    .unwrap();
    let out = bin().args(["run", path.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("non-finite"));
}

#[test]
fn certify_flags_failed_hypotheses_with_exit_5() {
    let scn = scenario_dir().join("hybrid_clean.toml");
    let out = bin().args(["certify", scn.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(5));
    let text = stdout(&out);
    assert!(text.contains("FAILED-HYPOTHESIS"));
    assert!(text.contains("lambda_min(Omega1)"));
    assert!(text.contains("Gamma1"));
}

#[test]
fn certify_passes_on_linear_only_scenario() {
    let scn = scenario_dir().join("tau_scaling.toml");
    let out = bin().args(["certify", scn.to_str().unwrap()]).output().unwrap();
    assert!(out.status.success());
    assert!(stdout(&out).contains("decay rate lambda"));
}

#[test]
fn freq_prints_linearization_tables() {
    let scn = scenario_dir().join("family_comparison_noisy.toml");
    let out = bin()
        .args(["freq", scn.to_str().unwrap(), "--amplitudes", "0.5,2.0"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("equivalent linearization"));
    assert!(text.contains("frequency response"));
    // levant damping is amplitude-free: both rows show the same zeta
    let zetas: Vec<&str> = text
        .lines()
        .skip_while(|l| !l.starts_with("## levant"))
        .skip(2)
        .take(2)
        .map(|l| l.split_whitespace().last().unwrap())
        .collect();
    assert_eq!(zetas[0], zetas[1]);
}

#[test]
fn sweep_emits_one_row_per_value_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let scn = scenario_dir().join("first_order_chatter.toml");
    let out = bin()
        .args([
            "sweep",
            scn.to_str().unwrap(),
            "--path",
            "sim.dt",
            "--values",
            "1e-2,1e-3",
            "--out-dir",
            dir.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    // 3 families x 2 values
    assert_eq!(text.lines().filter(|l| l.contains("e-2,") || l.contains("e-3,")).count(), 6);
    let table = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert!(table.starts_with("sim.dt,label,"));
    assert_eq!(table.lines().count(), 7);

    let out = bin()
        .args([
            "sweep",
            scn.to_str().unwrap(),
            "--path",
            "does.not.exist",
            "--values",
            "1.0",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_override_changes_the_noise_path() {
    let scn = scenario_dir().join("levant_noisy.toml");
    let base = bin()
        .args(["run", scn.to_str().unwrap(), "--format", "csv"])
        .output()
        .unwrap();
    let same = bin()
        .args(["run", scn.to_str().unwrap(), "--format", "csv"])
        .output()
        .unwrap();
    let other = bin()
        .args([
            "run",
            scn.to_str().unwrap(),
            "--format",
            "csv",
            "--seed-override",
            "7",
        ])
        .output()
        .unwrap();
    assert!(base.status.success() && same.status.success() && other.status.success());
    assert_eq!(stdout(&base), stdout(&same));
    assert_ne!(stdout(&base), stdout(&other));
}
