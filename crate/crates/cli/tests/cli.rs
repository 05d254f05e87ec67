use std::path::Path;
use std::process::{Command, Output};

fn shepard(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shepard"))
        .current_dir(dir)
        .env_remove("SHEPARD_OUTPUT_DIR")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.records()
        .map(|rec| rec.unwrap().iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn constants_match_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let out = shepard(
        dir.path(),
        &["constants", "--d", "2", "--alpha", "3", "--c", "1", "--C", "1"],
    );
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout(&out));
    let get = |name: &str, variant: &str| -> f64 {
        rows.iter()
            .find(|r| r[0] == name && r[1] == variant)
            .map(|r| r[2].parse().unwrap())
            .unwrap()
    };
    assert!((get("K_d", "closed_form") - 2f64.powf(4.5)).abs() < 1e-12);
    // 1 + 2 * 6/5 + 5/4
    assert!((get("C_alpha_d", "closed_form") - 68.0 / 15.0).abs() < 1e-12);
    assert!(get("C_alpha_d", "tight") < get("C_alpha_d", "closed_form"));
}

#[test]
fn hex_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let gen = shepard(
        dir.path(),
        &["gen", "--family", "hex", "--n", "4096", "-o", "hex.csv"],
    );
    assert_eq!(gen.status.code(), Some(0));
    assert!(dir.path().join("hex.csv.domain.json").exists());

    let out = shepard(
        dir.path(),
        &["metrics", "--points", "hex.csv", "--format", "json"],
    );
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let row = &doc["rows"][0];
    let c = row["c_est"].as_f64().unwrap();
    let big_c = row["C_est"].as_f64().unwrap();
    assert!((c - 2.0).abs() < 0.05, "c_est {c}");
    assert!((big_c - 2.0 / 3f64.sqrt()).abs() < 0.05, "C_est {big_c}");
}

#[test]
fn lens_check_passes_in_three_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let out = shepard(
        dir.path(),
        &[
            "lens-check",
            "--d",
            "3",
            "--grid",
            "20",
            "--mc",
            "200000",
            "--seed",
            "7",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 20);
    assert!(rows.iter().all(|r| r.last().unwrap() == "true"));
}

#[test]
fn violations_exit_one() {
    // A single Monte Carlo sample has zero variance, so any miss is rejected.
    let dir = tempfile::tempdir().unwrap();
    let out = shepard(
        dir.path(),
        &[
            "lens-check",
            "--d",
            "2",
            "--grid",
            "3",
            "--mc",
            "1",
            "--seed",
            "1",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(csv_rows(&stdout(&out)).len(), 3);
}

#[test]
fn bad_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["metrics"],
        vec!["constants", "--d", "0"],
        vec!["gen", "--domain", "box:1,0"],
        vec!["converge", "--n-list", "256,64"],
        vec!["metrics", "--points", "missing.csv"],
        vec!["frobnicate"],
    ] {
        let out = shepard(dir.path(), &args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["gen", "--family", "poisson", "--n", "300", "--seed", "11"];
    let a = shepard(dir.path(), &args);
    let b = shepard(dir.path(), &args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = shepard(
        dir.path(),
        &["gen", "--family", "poisson", "--n", "300", "--seed", "12"],
    );
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"d": 3, "alpha": 4.0, "format": "json"}"#,
    )
    .unwrap();
    let from_cfg = shepard(dir.path(), &["constants", "--config", "cfg.json"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&from_cfg)).unwrap();
    assert_eq!(doc["summary"]["d"], 3);

    let flagged = shepard(
        dir.path(),
        &["constants", "--config", "cfg.json", "--d", "1", "--format", "csv"],
    );
    let direct = shepard(dir.path(), &["constants", "--d", "1", "--alpha", "4"]);
    assert_eq!(flagged.stdout, direct.stdout);
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_shepard"))
        .current_dir(dir.path())
        .env("SHEPARD_OUTPUT_DIR", dir.path().join("reports"))
        .args(["constants"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(dir.path().join("reports/constants.csv")).unwrap();
    assert!(written.starts_with("constant,variant,value"));
}

#[test]
fn approximate_and_converge_report_within_bound() {
    let dir = tempfile::tempdir().unwrap();
    shepard(
        dir.path(),
        &["gen", "--family", "grid", "--n", "256", "-o", "g.csv"],
    );
    let out = shepard(
        dir.path(),
        &[
            "approximate",
            "--points",
            "g.csv",
            "--probes",
            "2000",
            "--export",
            "model.json",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(csv_rows(&stdout(&out)).iter().all(|r| r[4] == "true"));
    let model: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("model.json")).unwrap()).unwrap();
    assert_eq!(model["values"].as_array().unwrap().len(), 256);

    let out = shepard(
        dir.path(),
        &[
            "converge",
            "--d",
            "1",
            "--n-list",
            "16,64,256",
            "--probes",
            "2000",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r[7].parse::<f64>().unwrap() <= 1.0));
}
