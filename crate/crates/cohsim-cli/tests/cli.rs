//! End-to-end tests of the `cohsim` binary: exit codes, output formats,
//! determinism, and the shipped JSON schema.

use std::path::Path;
use std::process::{Command, Output};

fn cohsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cohsim"))
        .args(args)
        .env_remove("COHSIM_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn run_teleport_circuit_reports_two_bit_peak() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = dir.path().join("teleport.qc");
    let emit = cohsim(&["protocol", "teleport", "--emit", circuit.to_str().unwrap()]);
    assert_eq!(emit.status.code(), Some(0), "{}", stderr(&emit));

    let run = cohsim(&["run", circuit.to_str().unwrap(), "--input", "zero"]);
    assert_eq!(run.status.code(), Some(0), "{}", stderr(&run));
    let body = stdout(&run);
    let max_total = body
        .lines()
        .skip(1)
        .map(|line| line.split(',').nth(2).unwrap().to_string())
        .max()
        .unwrap();
    assert_eq!(max_total, "2.000000000000");
}

#[test]
fn run_reports_diagnostics_with_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.qc");
    std::fs::write(&path, "qubits 1\nh 3\n").unwrap();
    let run = cohsim(&["run", path.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(1));
    let err = stderr(&run);
    assert!(err.contains("line 2"), "stderr was: {err}");
    assert!(err.contains("index 3 out of range"), "stderr was: {err}");
}

#[test]
fn run_missing_file_is_a_diagnostic() {
    let run = cohsim(&["run", "/nonexistent/never.qc"]);
    assert_eq!(run.status.code(), Some(1));
}

#[test]
fn run_ghz_circuit_holds_one_bit() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = dir.path().join("ghz5.qc");
    let emit = cohsim(&[
        "protocol",
        "ghz",
        "--n",
        "5",
        "--emit",
        circuit.to_str().unwrap(),
    ]);
    assert_eq!(emit.status.code(), Some(0));
    let run = cohsim(&["run", circuit.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(0));
    let body = stdout(&run);
    let last = body.lines().last().unwrap();
    assert!(last.contains("1.000000000000"), "final stage row: {last}");
}

#[test]
fn protocol_w_emits_coherence() {
    let out = cohsim(&["protocol", "w", "--n", "8", "--emit-coherence"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "3.000000000000");
}

#[test]
fn protocol_teleport_two_gadgets_peaks_at_four() {
    let out = cohsim(&["protocol", "teleport", "--n", "2", "--theta", "0", "--run"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("4.000000000000"));
}

#[test]
fn protocol_swap_reports_pre_measurement_three() {
    let out = cohsim(&["protocol", "swap", "--run"]);
    assert_eq!(out.status.code(), Some(0));
    let body = stdout(&out);
    let pre = body.lines().find(|l| l.contains("pre-measure")).unwrap();
    assert!(pre.contains("3.000000000000"), "row: {pre}");
}

#[test]
fn protocol_rejects_bad_params_with_usage_exit() {
    assert_eq!(cohsim(&["protocol", "nope"]).status.code(), Some(1));
    assert_eq!(
        cohsim(&["protocol", "superdense", "--bits", "21"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        cohsim(&[
            "protocol",
            "teleport",
            "--werner",
            "0.5",
            "--emit",
            "/tmp/x.qc"
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(
        cohsim(&["protocol", "repeater", "--links", "9"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn sweep_angle_matches_binary_entropy_endpoints() {
    let out = cohsim(&["sweep", "angle", "--steps", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let body = stdout(&out);
    let mut lines = body.lines();
    assert_eq!(lines.next().unwrap(), "phi,peak_coherence,message_term");
    let terms: Vec<&str> = lines.map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(
        terms,
        vec!["0.000000000000", "1.000000000000", "0.000000000000"]
    );
}

#[test]
fn sweep_size_tracks_log_n() {
    let out = cohsim(&["sweep", "size"]);
    assert_eq!(out.status.code(), Some(0));
    let body = stdout(&out);
    for line in body.lines().skip(1) {
        let mut fields = line.split(',');
        let n: f64 = fields.next().unwrap().parse().unwrap();
        let w: f64 = fields.next().unwrap().parse().unwrap();
        let ghz: f64 = fields.next().unwrap().parse().unwrap();
        assert!((w - n.log2()).abs() < 1e-9);
        assert!((ghz - 1.0).abs() < 1e-9);
    }
    assert_eq!(body.lines().count(), 10);
}

#[test]
fn sweep_werner_peaks_are_nonincreasing() {
    let out = cohsim(&["sweep", "werner", "--values", "1.0,0.8,0.6"]);
    assert_eq!(out.status.code(), Some(0));
    let body = stdout(&out);
    let peaks: Vec<f64> = body
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(peaks.len(), 3);
    assert!(peaks[0] + 1e-9 >= peaks[1]);
    assert!(peaks[1] + 1e-9 >= peaks[2]);
}

#[test]
fn sweep_rejects_invalid_range() {
    assert_eq!(
        cohsim(&["sweep", "angle", "--start", "1.0", "--stop", "0.5"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(cohsim(&["sweep", "nope"]).status.code(), Some(1));
}

#[test]
fn verify_suites_pass_and_print_seed_header() {
    for suite in ["scaling", "branching", "monotone"] {
        let out = cohsim(&["verify", suite, "--seed", "7"]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "suite {suite}: {}",
            stderr(&out)
        );
        let body = stdout(&out);
        assert!(body.starts_with(&format!("# suite {suite} seed 7")));
        assert!(body.contains("PASS"));
        assert!(!body.contains("FAIL"));
    }
}

#[test]
fn verify_reads_seed_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_cohsim"))
        .args(["verify", "branching"])
        .env("COHSIM_SEED", "123")
        .output()
        .unwrap();
    assert!(stdout(&out).starts_with("# suite branching seed 123"));
}

#[test]
fn outputs_are_deterministic_for_fixed_seed_and_command() {
    let first = cohsim(&["verify", "scaling", "--seed", "11"]);
    let second = cohsim(&["verify", "scaling", "--seed", "11"]);
    assert_eq!(first.stdout, second.stdout);

    let a = cohsim(&["sweep", "angle", "--steps", "9"]);
    let b = cohsim(&["sweep", "angle", "--steps", "9"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_output_matches_schema_and_csv_numerals() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("profile.json");
    let csv_path = dir.path().join("profile.csv");
    let json_run = cohsim(&[
        "protocol",
        "teleport",
        "--run",
        "--format",
        "json",
        "--output",
        json_path.to_str().unwrap(),
    ]);
    assert_eq!(json_run.status.code(), Some(0));
    let csv_run = cohsim(&[
        "protocol",
        "teleport",
        "--run",
        "--format",
        "csv",
        "--output",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(csv_run.status.code(), Some(0));

    let json_text = std::fs::read_to_string(&json_path).unwrap();
    let document: serde_json::Value = serde_json::from_str(&json_text).unwrap();

    let schema_path =
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schema/profile.schema.json");
    let schema: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(schema_path).unwrap()).unwrap();
    let mut violations = Vec::new();
    validate(&schema, &document, "$", &mut violations);
    assert!(violations.is_empty(), "schema violations: {violations:?}");

    // The same formatted numerals appear in both emissions.
    let csv_text = std::fs::read_to_string(&csv_path).unwrap();
    for row in csv_text.lines().skip(1) {
        let total = row.split(',').nth(2).unwrap();
        assert!(json_text.contains(total), "{total} missing from JSON");
    }
    // And the profile values themselves agree row by row.
    let stages = document["stages"].as_array().unwrap();
    assert_eq!(stages.len(), csv_text.lines().count() - 1);
}

/// Minimal JSON-Schema interpreter covering the subset the shipped schema
/// uses: type, required, properties, items, minimum, minItems.
fn validate(
    schema: &serde_json::Value,
    value: &serde_json::Value,
    path: &str,
    violations: &mut Vec<String>,
) {
    if let Some(expected) = schema.get("type").and_then(|t| t.as_str()) {
        let matches = match expected {
            "object" => value.is_object(),
            "array" => value.is_array(),
            "string" => value.is_string(),
            "integer" => value.is_i64() || value.is_u64(),
            "number" => value.is_number(),
            "boolean" => value.is_boolean(),
            _ => true,
        };
        if !matches {
            violations.push(format!("{path}: expected {expected}, got {value}"));
            return;
        }
    }
    if let Some(minimum) = schema.get("minimum").and_then(|m| m.as_f64()) {
        if let Some(number) = value.as_f64() {
            if number < minimum {
                violations.push(format!("{path}: {number} below minimum {minimum}"));
            }
        }
    }
    if let Some(required) = schema.get("required").and_then(|r| r.as_array()) {
        for key in required {
            let key = key.as_str().unwrap();
            if value.get(key).is_none() {
                violations.push(format!("{path}: missing required property '{key}'"));
            }
        }
    }
    if let Some(properties) = schema.get("properties").and_then(|p| p.as_object()) {
        for (key, subschema) in properties {
            if let Some(subvalue) = value.get(key) {
                validate(subschema, subvalue, &format!("{path}.{key}"), violations);
            }
        }
    }
    if let Some(min_items) = schema.get("minItems").and_then(|m| m.as_u64()) {
        if let Some(items) = value.as_array() {
            if (items.len() as u64) < min_items {
                violations.push(format!("{path}: fewer than {min_items} items"));
            }
        }
    }
    if let Some(item_schema) = schema.get("items") {
        if let Some(items) = value.as_array() {
            for (i, item) in items.iter().enumerate() {
                validate(item_schema, item, &format!("{path}[{i}]"), violations);
            }
        }
    }
}

#[test]
fn run_accepts_bloch_and_list_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pair.qc");
    std::fs::write(&path, "qubits 2\ncnot 0 1\nstage out\n").unwrap();
    let ok = cohsim(&[
        "run",
        path.to_str().unwrap(),
        "--input",
        "bloch(1.5707963267948966,0),zero",
    ]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));

    let wrong_count = cohsim(&["run", path.to_str().unwrap(), "--input", "zero,zero,zero"]);
    assert_eq!(wrong_count.status.code(), Some(1));

    let bad_token = cohsim(&["run", path.to_str().unwrap(), "--input", "sideways"]);
    assert_eq!(bad_token.status.code(), Some(1));
}
