use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn scratch(name: &str, contents: &str) -> String {
    let dir = std::env::temp_dir().join(format!("lndkit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

fn lndkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lndkit")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn cone_isotropy_of_pyramid_root() {
    let out = lndkit(&["cone", "isotropy", "--in", &data("example7.json"), "--root", "1,2,-1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["result"]["maximal"], true);
    assert_eq!(v["result"]["s_delta_order"], 1);
    assert_eq!(v["result"]["torus"]["rank"], 2);
    assert_eq!(v["result"]["kernel_generators"].as_array().unwrap().len(), 2);
    assert_eq!(v["bounds"]["hilbert_bound"], 32);
}

#[test]
fn cone_roots_lists_only_roots() {
    let out = lndkit(&["cone", "roots", "--in", &data("example7.json"), "--bound", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("\"status\": \"ok\""));
}

#[test]
fn trinomial_rigid_input() {
    let out = lndkit(&["trinomial", "rigid", "--in", &data("rigid.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"], serde_json::json!({ "rigid": true }));
}

#[test]
fn trinomial_classify_orientation() {
    let out = lndkit(&["trinomial", "classify", "--in", &data("example9.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["type"], "I");
    assert_eq!(v["result"]["form"]["case"], 2);
}

#[test]
fn missing_input_is_a_usage_error() {
    let out = lndkit(&["cone", "maximal", "--root", "0,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_root_is_an_input_error() {
    let out = lndkit(&["cone", "maximal", "--in", &data("example7.json"), "--root", "0,0,1"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["status"], "error");
    assert_eq!(v["error"]["kind"], "domain");
}

#[test]
fn malformed_json_reports_position() {
    let path = scratch("bad.json", "{\"l1\": [1, 2],\n  \"l2\": [2 3]}");
    let out = lndkit(&["trinomial", "classify", "--in", &path]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["error"]["kind"], "parse");
    assert!(v["error"]["message"].as_str().unwrap().contains("line 2"), "{v}");
}

#[test]
fn unknown_field_is_rejected() {
    let path = scratch("extra.json", r#"{"l1": [1], "l2": [2], "l3": [3]}"#);
    let out = lndkit(&["trinomial", "classify", "--in", &path]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_maximal_toric_root_is_refused() {
    let path = scratch("orthant.json", r#"{"rank": 2, "rays": [[1, 0], [0, 1]]}"#);
    let out = lndkit(&["cone", "isotropy", "--in", &path, "--root", "-1,0"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["status"], "refused");
    assert_eq!(v["refusal"]["witness"]["root"], serde_json::json!([0, -1]));
}

#[test]
fn non_maximal_trinomial_lnd_is_refused() {
    let out = lndkit(&["trinomial", "isotropy", "--in", &data("example9.json"), "--lnd", "1,1"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["status"], "refused");
    assert_eq!(v["refusal"]["witness"]["label"], "d1,2");
}

#[test]
fn replica_isotropy_is_reported() {
    let out = lndkit(&[
        "trinomial",
        "isotropy",
        "--in",
        &data("example9.json"),
        "--lnd",
        "1,1",
        "--replica",
        "0,0,0,1",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json(&out)["result"]["maximal"], true);
}

#[test]
fn single_z_discrepancies_in_report() {
    let out = lndkit(&["trinomial", "isotropy", "--in", &data("example10.json"), "--lnd", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["s_delta_order"], 2);
    assert_eq!(v["result"]["discrepancies"].as_array().unwrap().len(), 3);
}

#[test]
fn exp_on_generators() {
    let out = lndkit(&["exp", "--in", &data("example9.json"), "--lnd", "1,2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn text_format() {
    let out = lndkit(&["--format", "text", "trinomial", "rigid", "--in", &data("rigid.json")]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("status: ok"));
    assert!(text.contains("rigid: true"));
}

#[test]
fn selftest_is_deterministic() {
    let a = lndkit(&["selftest"]);
    let b = lndkit(&["selftest"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["result"]["passed"], true);
}

#[test]
fn injected_fault_is_localized() {
    let out = lndkit(&["selftest", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["status"], "failed");
    let failed: Vec<&str> = v["result"]["suites"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|s| s["passed"] == false)
        .map(|s| s["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["commutation_criterion"]);
}

#[test]
fn in_process_run_matches_binary() {
    let args = ["lndkit", "trinomial", "rigid", "--in", &data("rigid.json")];
    let outcome = lndkit::cli::run(args);
    let out = lndkit(&args[1..]);
    assert_eq!(outcome.code, out.status.code().unwrap());
    assert_eq!(outcome.stdout.as_bytes(), &out.stdout[..]);
}
