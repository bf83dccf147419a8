use std::io::Write;
use std::process::{Command, Output, Stdio};

use tempfile::NamedTempFile;

use shared_asymmetry::states;

fn shasym() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_shasym"));
    cmd.env_remove("SHASYM_TOLERANCES");
    cmd
}

fn file(contents: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

fn state_file(rho: &shared_asymmetry::DensityOperator) -> NamedTempFile {
    file(&serde_json::to_string(&rho.to_json()).unwrap())
}

fn qubit_spectra() -> NamedTempFile {
    file(r#"{"spectrum_s": {"charges": [0, 1]}, "spectrum_r": {"charges": [0, 1]}}"#)
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn path(f: &NamedTempFile) -> &str {
    f.path().to_str().unwrap()
}

#[test]
fn compute_shared_asymmetry_of_ebit() {
    let state = state_file(&states::ebit());
    let spectra = qubit_spectra();
    let out = shasym()
        .args(["compute", "shared-asymmetry", "--state", path(&state), "--spectra", path(&spectra)])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["name"], "shared_asymmetry");
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["log_base"].as_f64().unwrap(), 2.0);
}

#[test]
fn log_base_flag_and_env_override() {
    let state = state_file(&states::ebit());
    let spectra = qubit_spectra();
    let args = ["compute", "shared-asymmetry", "--state", path(&state), "--spectra", path(&spectra)];
    let out = shasym().args(args).arg("--log-base").arg("e").output().unwrap();
    assert!((json(&out)["value"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-12);

    let out = shasym().args(args).env("SHASYM_TOLERANCES", "log_base=e").output().unwrap();
    assert!((json(&out)["value"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-12);

    let out = shasym().args(args).env("SHASYM_TOLERANCES", "no_such_key=1").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn input_errors_exit_one() {
    let spectra = qubit_spectra();
    let missing = shasym()
        .args(["compute", "entropy", "--state", "/nonexistent/state.json", "--spectra", path(&spectra)])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(1));

    let not_psd = file(r#"{"dim": 2, "re": [[1.5, 0.0], [0.0, -0.5]], "im": [[0, 0], [0, 0]]}"#);
    let out = shasym()
        .args(["compute", "entropy", "--state", path(&not_psd), "--spectra", path(&spectra)])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    let usage = shasym().args(["compute", "no-such-measure"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(1));

    let scenario = shasym().args(["scenario", "no-such-scenario"]).output().unwrap();
    assert_eq!(scenario.status.code(), Some(1));
}

#[test]
fn failed_check_exits_two() {
    // An eigenvalue cut of 0.3 drops every 1/4 probability of |+>|+>, so the
    // computed shared asymmetry no longer matches 1/2 or the sector sum.
    let cut = ("SHASYM_TOLERANCES", "eig_clip_tol=0.3");
    let out = shasym().args(["scenario", "qubit-clock"]).env(cut.0, cut.1).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let clean = shasym().args(["scenario", "qubit-clock"]).output().unwrap();
    assert_eq!(clean.status.code(), Some(0));

    let state = state_file(&states::refbit());
    let spectra = qubit_spectra();
    let args = ["verify-theorem", "--state", path(&state), "--spectra", path(&spectra)];
    let out = shasym().args(args).env(cut.0, cut.1).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(json(&out)["difference"].as_f64().unwrap() > 0.5);

    let ok = shasym().args(args).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(json(&ok)["difference"].as_f64().unwrap() < 1e-12);
}

#[test]
fn scenario_csv_and_export_round_trip() {
    let out = shasym().args(["scenario", "gap-sweep", "--d", "6"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let sweep = String::from_utf8(out.stdout).unwrap();

    let mut export = shasym()
        .args(["export", "--format", "csv"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    export.stdin.take().unwrap().write_all(sweep.as_bytes()).unwrap();
    let out = export.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("param,measure,value,log_base,bound,pass"));
    assert_eq!(lines.count(), 5);

    let direct = shasym().args(["scenario", "gap-sweep", "--d", "6", "--format", "csv"]).output().unwrap();
    assert_eq!(String::from_utf8(direct.stdout).unwrap(), csv);
}

#[test]
fn seeded_scenarios_repeat_exactly() {
    let run = || {
        shasym()
            .args(["scenario", "theorem-random", "--seed", "5", "--param", "samples=15"])
            .output()
            .unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn oracle_reports_seed_and_restarts() {
    let state = state_file(&states::ebit());
    let out = shasym()
        .args(["oracle", "--state", path(&state), "--restarts", "4", "--seed", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["K"], 16);
    assert_eq!(v["restarts"], 4);
    assert_eq!(v["seed"], 3);
    assert_eq!(v["converged"], true);
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 5e-3);
}
