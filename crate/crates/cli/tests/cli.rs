use std::path::Path;
use std::process::{Command, Output};

fn sweep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sweep")).args(args).output().expect("binary runs")
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn lists_presets() {
    let out = sweep(&["--list-presets"]);
    assert!(out.status.success());
    let list: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let names: Vec<_> = list.as_array().unwrap().iter().map(|p| p["name"].as_str().unwrap().to_string()).collect();
    assert_eq!(names.len(), 16);
    assert!(names.iter().any(|n| n == "fig4b"));
}

#[test]
fn runs_an_analytic_preset() {
    let dir = tempfile::tempdir().unwrap();
    let out = sweep(&["--preset", "fig2a", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("data.csv")).unwrap();
    assert_eq!(csv.lines().count(), 202);
    let m = manifest(dir.path());
    assert_eq!(m["preset"], "fig2a");
    assert!(m["cutoffs"].is_null());
}

#[test]
fn config_file_with_solver_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("weak.json");
    std::fs::write(
        &cfg,
        r#"{"params":{"omega_a":1,"omega_c":1,"omega_m":1,"g_ac":0,"g_om":0.05},
            "axes":[{"variable":"g_ac","start":0.1,"stop":0.5,"count":3}],
            "solvers":["exact","grwa","rwa"],
            "labels":{"families":["doublet"],"n":[0],"m":[0]}}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = sweep(&[
        "--config",
        cfg.to_str().unwrap(),
        "--solvers",
        "grwa,exact",
        "--workers",
        "2",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = manifest(&out_dir);
    assert_eq!(m["config"]["name"], "weak");
    assert_eq!(m["config"]["solvers"], serde_json::json!(["grwa", "exact"]));
    assert_eq!(m["config"]["workers"], 2);
    // 3 points × 2 signs × 2 solvers
    assert_eq!(m["diagnostics"]["rows"], 12);
    let csv = std::fs::read_to_string(out_dir.join("data.csv")).unwrap();
    assert!(!csv.contains(",rwa,"));
}

#[test]
fn dry_run_prints_the_resolved_config() {
    let out = sweep(&["--preset", "fig4b", "--dry-run", "--levels", "40"]);
    assert!(out.status.success());
    let cfg: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cfg["params"]["g_ac"], 2.5);
    assert_eq!(cfg["levels"], 40);
}

#[test]
fn rejects_bad_invocations() {
    let out = sweep(&["--preset", "fig9z"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown preset"));
    assert!(!sweep(&[]).status.success());
    assert!(!sweep(&["--preset", "fig2a", "--config", "x.json"]).status.success());
    assert!(!sweep(&["--preset", "fig2a", "--solvers", "exact,qrm", "--dry-run"]).status.success());
    assert!(!sweep(&["--preset", "fig2a", "--workers", "0", "--dry-run"]).status.success());
}
