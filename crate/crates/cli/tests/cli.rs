use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn shimorin(config: &str, out: &Path, extra: &[&str]) -> std::process::Output {
    let dir = out.parent().unwrap();
    let path = dir.join(format!("{}.json", out.file_name().unwrap().to_string_lossy()));
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_shimorin"))
        .args(["run", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

fn report(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

fn result<'a>(report: &'a Value, task: &str) -> &'a Value {
    let entry = report["tasks"].as_array().unwrap().iter().find(|t| t["task"] == task).unwrap();
    assert_eq!(entry["status"], "ok", "{entry}");
    &entry["result"]
}

const HARDY: &str = r#"{"measure": {"atoms": [{"at": 0.0, "mass": 1.0}]}, "tasks": ["classify"]}"#;
const BERGMAN: &str =
    r#"{"measure": {"atoms": [{"at": 1.0, "mass": 1.0}]}, "tasks": ["coefficients", "fit-h"], "max-n": 4}"#;

#[test]
fn hardy_is_classified_as_not_bergman() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("hardy");
    let output = shimorin(HARDY, &out, &[]);
    assert!(output.status.success());
    let r = report(&out);
    assert_eq!(r["schema_version"], "shimorin-report/1");
    let classify = result(&r, "classify");
    assert_eq!(classify["prw"], "Converges");
    assert_eq!(classify["bergman_kernel"], false);
}

#[test]
fn bergman_coefficients_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bergman");
    assert!(shimorin(BERGMAN, &out, &[]).status.success());
    let csv = std::fs::read_to_string(out.join("coefficients.csv")).unwrap();
    let rows: Vec<(usize, f64)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let (n, c) = l.split_once(',').unwrap();
            (n.parse().unwrap(), c.parse().unwrap())
        })
        .collect();
    assert_eq!(rows, vec![(0, 1.0), (1, 2.0), (2, 3.0), (3, 4.0), (4, 5.0)]);
    assert!(csv.starts_with("n,c_n\n0,1.0000000000000000\n"));
    let r = report(&out);
    let fit = result(&r, "fit-h");
    assert_eq!(fit["verdict"], "Feasible");
    assert!(fit["max_residual"].as_f64().unwrap() <= 1e-8);
    let residuals = std::fs::read_to_string(out.join("fit_residuals.csv")).unwrap();
    assert!(residuals.starts_with("n,target,achieved,relative_residual\n"));
    assert_eq!(residuals.lines().count(), 25);
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("flags");
    let config = r#"{"measure": {"atoms": [{"at": 0.0, "mass": 1.0}]}, "tasks": ["coefficients", "kernel-eval"]}"#;
    assert!(shimorin(config, &out, &["--max-n", "3", "--eval", "x=0.25", "--eval", "x=-0.5"]).status.success());
    assert_eq!(std::fs::read_to_string(out.join("coefficients.csv")).unwrap().lines().count(), 5);
    let r = report(&out);
    let points = result(&r, "kernel-eval")["points"].as_array().unwrap().clone();
    assert_eq!(points.len(), 2);
    assert!((points[0]["integral"][0].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-12);
    assert!((points[1]["series"][0].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-10);
}

#[test]
fn malformed_configs_fail_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bad");
    let output = shimorin("{\n  \"tasks\": [\"classify\"],\n  \"max-n\": -1\n}", &out, &[]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("line 3"), "{stderr}");
    assert!(!out.join("report.json").exists());

    let output =
        shimorin(r#"{"measure": {"atoms": [{"at": 1.0, "mass": 1.0}]}, "tasks": ["weight-moments"]}"#, &out, &[]);
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("requires a weight"));

    let output = shimorin(HARDY, &out, &["--eval", "0.3"]);
    assert!(!output.status.success());
}

#[test]
fn failed_verdicts_are_data_and_task_errors_set_the_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("verdicts");
    let config = r#"{"measure": {"atoms": [{"at": 0.0, "mass": 1.0}]}, "tasks": ["dhat", "fit-h", "round-trip"]}"#;
    assert!(shimorin(config, &out, &[]).status.success());
    let r = report(&out);
    assert_eq!(result(&r, "dhat")["applicable"], false);
    assert_eq!(result(&r, "fit-h")["verdict"], "PrecheckRejected");
    assert_eq!(result(&r, "round-trip")["match"], "Skipped");

    // ∫ ω = ∞ for this profile, so the zeroth moment is a task error
    let out = dir.path().join("errors");
    let config =
        r#"{"weight": {"kind": "from-h", "t": [0, 1, 2], "log_h": [0, -0.25, -0.5]}, "tasks": ["weight-moments"]}"#;
    let output = shimorin(config, &out, &[]);
    assert_eq!(output.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["tasks"][0]["status"], "error");
}

#[test]
fn weight_tasks() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("weight");
    let config = r#"{"weight": {"kind": "constant", "c": 1.0}, "tasks": ["weight-moments", "dhat"], "max-n": 10}"#;
    assert!(shimorin(config, &out, &[]).status.success());
    let r = report(&out);
    assert_eq!(result(&r, "weight-moments")["rkhs"], true);
    let tail = &result(&r, "dhat")["tail"];
    assert!((tail["constant"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    let csv = std::fs::read_to_string(out.join("weight_moments.csv")).unwrap();
    assert_eq!(csv.lines().nth(2).unwrap(), "1,0.50000000000000000");
}

#[test]
fn shipped_configs_run_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["round_trip", "hardy", "lebesgue_weight"] {
        let config =
            std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(format!("{name}.json")))
                .unwrap();
        let out = dir.path().join(name);
        let output = shimorin(&config, &out, &[]);
        assert!(output.status.success(), "{name}: {}", String::from_utf8_lossy(&output.stdout));
    }
}
