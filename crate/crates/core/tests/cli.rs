use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).display().to_string()
}

fn ksplit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ksplit")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn slope_of_the_torus_trefoil() {
    let v = json(&ksplit(&["slope", "--surface", &fixture("torus.json"), "--input", &fixture("torus_2_3.json")]));
    assert_eq!(v["slope"], 6);
    assert_eq!(v["lk_pushoffs"], 6);
    assert_eq!(v["lk_knot_pushoff"], 6);
    assert_eq!(v["engines"], serde_json::json!(["crossings", "gauss"]));
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    assert_eq!(keys, ["slope", "lk_pushoffs", "lk_knot_pushoff", "engines"]);
}

#[test]
fn slope_of_the_dumbbell_belt_is_zero() {
    let v =
        json(&ksplit(&["slope", "--surface", &fixture("dumbbell.json"), "--input", &fixture("dumbbell_belt.json")]));
    assert_eq!(v["slope"], 0);
}

#[test]
fn malformed_json_exits_1_with_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"chart\": 0, \"coords\": [").unwrap();
    let out = ksplit(&["slope", "--surface", &fixture("torus.json"), "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json") && err.contains("EOF"), "{err}");
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(ksplit(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(ksplit(&["slope", "--input", "/no/such/file.json"]).status.code(), Some(1));
    assert_eq!(ksplit(&["twist", "--input", &fixture("record_trefoil_g1_m6.json")]).status.code(), Some(1));
    assert_eq!(ksplit(&["--help"]).status.code(), Some(0));
}

#[test]
fn common_stabilization_of_equal_slopes_replays() {
    let v = json(&ksplit(&[
        "common-stab",
        "--input",
        &fixture("record_trefoil_g1_m6.json"),
        "--input",
        &fixture("record_trefoil_g3_m6.json"),
        "--extra-stabs",
        "1",
    ]));
    assert_eq!(v["record"]["genus"], 6);
    assert_eq!(v["record"]["slope"], 6);
    assert_eq!(v["replay_matches"], true);
    assert_eq!(v["trace_a"]["output"], v["trace_b"]["output"]);
}

#[test]
fn identical_inputs_give_the_shortest_trace() {
    let r = fixture("record_trefoil_g1_m6.json");
    let v = json(&ksplit(&["common-stab", "--input", &r, "--input", &r]));
    assert_eq!(v["trace_a"], v["trace_b"]);
    assert_eq!(v["trace_a"]["moves"].as_array().unwrap().len(), 5);
    assert_eq!(v["record"]["genus"], 3);
}

#[test]
fn slopes_6_and_7_exit_3() {
    let out = ksplit(&[
        "common-stab",
        "--input",
        &fixture("record_trefoil_g1_m6.json"),
        "--input",
        &fixture("record_trefoil_g1_m7.json"),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("slope mismatch"));
}

#[test]
fn realize_slope_writes_record_and_mesh() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("unknot_m4.json");
    let v = json(&ksplit(&[
        "realize-slope",
        "--input",
        &fixture("knot_unknot.json"),
        "--surface",
        &fixture("unknot.json"),
        "--target-slope",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]));
    assert_eq!((v["record"]["genus"].as_i64(), v["record"]["slope"].as_i64()), (Some(1), Some(4)));
    assert_eq!(v["twist_count"], 4);
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(written, v);
    let obj = std::fs::read_to_string(out.with_extension("obj")).unwrap();
    assert!(obj.lines().any(|l| l.starts_with("f ")) && obj.lines().any(|l| l.starts_with("l ")));
}

#[test]
fn realize_slope_on_the_figure_eight() {
    let base = |m: &str| {
        json(&ksplit(&[
            "realize-slope",
            "--input",
            &fixture("knot_figure_eight.json"),
            "--surface",
            &fixture("figure_eight.json"),
            "--target-slope",
            m,
        ]))
    };
    let v = base("0");
    assert_eq!((v["record"]["genus"].as_i64(), v["record"]["slope"].as_i64()), (Some(2), Some(0)));
    // Asking for the base slope applies no twists.
    let b = v["base_slope"].to_string();
    let w = base(&b);
    assert_eq!(w["twist_count"], 0);
    assert_eq!(w["record"]["slope"].to_string(), b);
}

#[test]
fn symbolic_moves() {
    let r = fixture("record_trefoil_g1_m6.json");
    let v = json(&ksplit(&["twist", "--input", &r, "--k", "-2"]));
    assert_eq!((v["genus"].as_i64(), v["slope"].as_i64()), (Some(1), Some(4)));
    let v = json(&ksplit(&["stabilize", "--input", &r]));
    assert_eq!((v["genus"].as_i64(), v["slope"].as_i64()), (Some(2), Some(6)));
    let v = json(&ksplit(&["connect-sum", "--input", &r, "--input", &fixture("record_trefoil_g3_m6.json")]));
    assert_eq!((v["genus"].as_i64(), v["slope"].as_i64()), (Some(4), Some(12)));
    let v = json(&ksplit(&["genus", "--input", &r]));
    assert_eq!(v["genus"], 1);
    let v = json(&ksplit(&["decompose", "--input", &r]));
    let plus: Vec<i64> =
        v["components"].as_array().unwrap().iter().map(|c| c["plus_genus"].as_i64().unwrap()).collect();
    assert_eq!(plus, [1, 2, 2, 1]);
}

#[test]
fn geometric_stabilization_is_seeded() {
    let run = |seed: &str| {
        json(&ksplit(&[
            "stabilize",
            "--surface",
            &fixture("torus.json"),
            "--input",
            &fixture("torus_2_3.json"),
            "--seed",
            seed,
        ]))
    };
    let a = run("11");
    assert_eq!((a["record"]["genus"].as_i64(), a["record"]["slope"].as_i64()), (Some(2), Some(6)));
    assert_eq!(a, run("11"));
}

#[test]
fn geometric_twist_and_mesh_export() {
    let v = json(&ksplit(&[
        "twist",
        "--surface",
        &fixture("unknot.json"),
        "--input",
        &fixture("unknot_longitude.json"),
        "--k",
        "3",
    ]));
    let before = v["slope_before"].as_i64().unwrap();
    assert_eq!(v["record"]["slope"].as_i64(), Some(before + 3));
    let v = json(&ksplit(&["genus", "--surface", &fixture("unknot_tunnel.json")]));
    assert_eq!((v["genus"].as_i64(), v["euler_characteristic"].as_i64()), (Some(2), Some(-2)));
    let out = ksplit(&["export-obj", "--surface", &fixture("torus.json")]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("o surface\n"));
    assert!(text.lines().filter(|l| l.starts_with("f ")).count() > 100);
}

#[test]
fn replay_of_a_stored_trace() {
    let v = json(&ksplit(&["replay", "--input", &fixture("trace_trefoil.json")]));
    assert_eq!(v["replay_matches"], true);
    assert_eq!(v["canonical"], true);
}

#[test]
fn selftest_is_deterministic() {
    let a = ksplit(&["selftest", "--seed", "3"]);
    let v = json(&a);
    assert_eq!(v["all_passed"], true);
    assert!(v["report"]["properties"].as_array().unwrap().len() >= 10);
    assert_eq!(a.stdout, ksplit(&["selftest", "--seed", "3"]).stdout);
    assert!(String::from_utf8_lossy(&a.stderr).lines().all(|l| l.starts_with("[PASS]") || l.starts_with("selftest")));
}
