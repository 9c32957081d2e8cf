//! End-to-end tests of the `laminar` binary: exit codes, output formats,
//! and determinism.

use assert_cmd::Command;
use predicates::prelude::*;

fn laminar() -> Command {
    Command::cargo_bin("laminar").unwrap()
}

/// Path to a bundled example complex relative to the workspace root.
fn example(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../examples")
        .join(name)
}

#[test]
fn diagram_json_has_expected_structure() {
    let out = laminar()
        .args(["diagram", "3/11"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(v["vertices"].as_array().unwrap().len(), 8);
    assert_eq!(v["triangles"].as_array().unwrap().len(), 6);
    assert_eq!(v["target"], "3/11");
}

#[test]
fn diagram_dot_output() {
    laminar()
        .args(["diagram", "3/11", "--format", "dot"])
        .assert()
        .success()
        .stdout(predicate::str::starts_with("graph"));
}

#[test]
fn dot_rejected_outside_diagram() {
    laminar()
        .args(["path", "3/11", "--format", "dot"])
        .assert()
        .code(2);
}

#[test]
fn degenerate_target_exits_3() {
    laminar().args(["diagram", "2/1"]).assert().code(3);
    laminar().args(["diagram", "1/0"]).assert().code(3);
}

#[test]
fn unparseable_target_exits_2() {
    laminar().args(["diagram", "three"]).assert().code(2);
}

#[test]
fn output_is_deterministic() {
    let run = || {
        laminar()
            .args(["path", "3/11"])
            .assert()
            .success()
            .get_output()
            .stdout
            .clone()
    };
    assert_eq!(run(), run());
}

#[test]
fn classify_knot_persistent_example() {
    laminar()
        .args(["classify-knot", "1/3", "1/3", "-1/4", "--mode", "persistent"])
        .assert()
        .success()
        .stdout(predicate::str::contains("\"status\": \"persistently-laminar\""));
}

#[test]
fn classify_knot_exceptional_form() {
    laminar()
        .args(["classify-knot", "1/2", "1/3", "1/7", "-1"])
        .assert()
        .success()
        .stdout(predicate::str::contains("exceptional-form"));
}

#[test]
fn classify_link_exits_4() {
    laminar()
        .args(["classify-knot", "1/3", "1/5", "1/7", "-1"])
        .assert()
        .code(4)
        .stderr(predicate::str::contains("link"));
}

#[test]
fn negative_slopes_are_normalized() {
    // A negative band twist count must be accepted as a trailing token, and
    // a negative tangle slope must parse anywhere in the list.
    let out = laminar()
        .args(["classify-knot", "-1/4", "1/3", "1/3", "0"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
    // Normalization folds the negative slope's floor into the band count.
    for t in v["knot"]["tangles"].as_array().unwrap() {
        let s = t.as_str().unwrap();
        assert!(!s.starts_with('-'), "tangle {s} not normalized");
    }
}

#[test]
fn classify_tangle_reports_representative() {
    let out = laminar()
        .args(["classify-tangle", "3/5", "3/5"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(v["representative"][0], "2/5");
    assert_eq!(v["representative"][1], "2/5");
    assert_eq!(v["persistent"], true);
}

#[test]
fn surgery_shorthand_matches_mode_flag() {
    let a = laminar()
        .args(["surgery", "-1/2", "1/3", "2/9"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let b = laminar()
        .args(["classify-knot", "-1/2", "1/3", "2/9", "--mode", "surgery"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    assert_eq!(a, b);
}

#[test]
fn check_valid_pieces() {
    for (name, cusps) in [
        ("ht_piece.json", 0),
        ("channelA.json", 2),
        ("half_channel.json", 1),
        ("trivial_cap.json", 0),
    ] {
        let out = laminar()
            .args(["check", example(name).to_str().unwrap()])
            .assert()
            .success()
            .get_output()
            .stdout
            .clone();
        let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(v["meridional_cusps"], cusps, "{name}");
        assert_eq!(v["ok"], true, "{name}");
    }
}

#[test]
fn check_invalid_piece_exits_1() {
    laminar()
        .args(["check", example("q_diamond_invalid.json").to_str().unwrap()])
        .assert()
        .code(1);
}

#[test]
fn check_garbage_file_exits_2() {
    let dir = std::env::temp_dir();
    let path = dir.join("laminar_cli_garbage.json");
    std::fs::write(&path, "{ not json").unwrap();
    laminar()
        .args(["check", path.to_str().unwrap()])
        .assert()
        .code(2);
    laminar().args(["check", "/no/such/file.json"]).assert().code(2);
}

#[test]
fn max_q_env_limits_enumeration() {
    let out = laminar()
        .env("LAMINAR_MAX_Q", "12")
        .args(["path", "1/5", "--enumerate"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
    assert!(!v["enumerated"].as_array().unwrap().is_empty());
}

#[test]
fn sweep_reports_no_disagreements() {
    let out = laminar()
        .args(["path", "0/1", "--sweep", "9", "--jobs", "2"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
    assert!(v["disagreements"].as_array().unwrap().is_empty());
}
