use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_retcheck"))
}

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("config.json");
    std::fs::write(&p, text).unwrap();
    p
}

fn verify(config: &Path, extra: &[&str]) -> Output {
    bin().arg("verify").arg("--config").arg(config).args(extra).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn passing_config_exits_zero_with_json_report() {
    let out = verify(&example("juttner.json"), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["status"], "pass");
    assert_eq!(report["provenance"]["seed"], 7);
    assert_eq!(report["suites"].as_array().unwrap().len(), 8);
}

#[test]
fn violated_compatibility_exits_one() {
    let out = verify(&example("juttner_perturbed.json"), &["--suite", "compatibility"]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["suites"][0]["status"], "fail");
}

#[test]
fn unknown_key_exits_two_with_pointer() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"transport": {"chi": 1, "mu": 1, "nu": 1, "zeta": 2}}"#);
    let out = verify(&cfg, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("/transport/zeta"), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
}

#[test]
fn missing_config_file_exits_two() {
    let out = verify(Path::new("/nonexistent/config.json"), &[]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn table_outside_its_range_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{
  "model": {"kind": "polyatomic", "omega_perturbation": [[1, 0], [10, 0], [100, 0]]},
  "closure": {"kind": "polyatomic_acpr"},
  "transport": {"chi": 1, "mu": 1, "nu": 1},
  "grid": {"rho": {"min": 1, "max": 1, "count": 1}, "temperature": {"min": 0.001, "max": 0.001, "count": 1}},
  "suites": ["compatibility"]
}"#,
    );
    let out = verify(&cfg, &[]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn report_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = verify(&example("geroch_lindblom.json"), &["--report", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(report["suites"][0]["status"], "skip-with-diagnostics");
}

const THREE_POINTS: &str = r#"{
  "model": {"kind": "juttner"},
  "closure": {"kind": "monatomic_juttner"},
  "transport": {"chi": 1, "mu": 1, "nu": 1},
  "grid": {"rho": {"min": 0.5, "max": 2, "count": 3}, "temperature": {"min": 1, "max": 1, "count": 1}},
  "field_points": {"count": 4},
  "classical": {"states": [[1, 1]]}
}"#;

#[test]
fn export_writes_tables_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), THREE_POINTS);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (out, threads) in [(&a, "1"), (&b, "3")] {
        let o = bin()
            .env("RET_THREADS", threads)
            .args(["export", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let csv = std::fs::read_to_string(a.join("coefficients.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    let header: Vec<&str> = lines[0].split(',').collect();
    for col in ["rho", "T", "a1", "a2", "a3", "B1_pi", "B3", "B4"] {
        assert!(header.contains(&col), "missing column {col}");
    }
    assert!(!csv.contains('\r'));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(a.join("coefficients.json")).unwrap()).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 3);
    for name in ["coefficients", "projection", "classical"] {
        for ext in ["csv", "json"] {
            let file = format!("{name}.{ext}");
            assert_eq!(
                std::fs::read(a.join(&file)).unwrap(),
                std::fs::read(b.join(&file)).unwrap(),
                "{file} differs between runs"
            );
        }
    }
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let out = verify(&example("juttner.json"), &["--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}
