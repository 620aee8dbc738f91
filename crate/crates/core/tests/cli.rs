use std::fs;
use std::path::PathBuf;

use pretzel_pi1::cli::{run, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_PASS, EXIT_USAGE};
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("pretzel-pi1").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let (code, out, _) = call(&a);
    (code, serde_json::from_str(&out).expect("exactly one JSON document"))
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schemas").join(name);
    let v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&v).unwrap()
}

fn assert_valid(v: &jsonschema::Validator, doc: &Value) {
    let errs: Vec<String> = v.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errs.is_empty(), "{errs:?}");
}

fn strip_version(mut v: Value) -> Value {
    if let Value::Object(m) = &mut v {
        m.remove("version");
    }
    v
}

/// Compares against `tests/golden/NAME`, rewriting it when `UPDATE_GOLDEN` is set.
fn golden(name: &str, doc: &Value) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    let text = serde_json::to_string_pretty(&strip_version(doc.clone())).unwrap() + "\n";
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, &text).unwrap();
    }
    let want = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(text, want, "golden {name} differs");
}

#[test]
fn derive_emits_the_two_generator_presentation() {
    let (code, v) = json(&["derive", "--s", "3"]);
    assert_eq!(code, EXIT_PASS);
    assert_eq!(v["relator"], "clcLCL^-3CLclcl^2");
    assert_eq!(v["replay"], "PASS");
}

#[test]
fn exit_codes() {
    assert_eq!(call(&["verify", "fact", "--s", "5"]).0, EXIT_PASS);
    assert_eq!(call(&["verify", "lemma-k", "--slope", "-7/3"]).0, EXIT_PASS);
    assert_eq!(call(&["nlo", "--s", "3", "--slope", "17/1"]).0, EXIT_INCONCLUSIVE);
    assert_eq!(call(&["nlo", "--s", "3", "--slope", "19/1", "--jobs", "1"]).0, EXIT_PASS);
    assert_eq!(call(&["h1", "--s", "3", "--slope", "38/2"]).0, EXIT_USAGE);
    assert_eq!(call(&["gen", "--s", "2"]).0, EXIT_USAGE);
    assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(call(&["parse", "/nonexistent/file.pres"]).0, EXIT_USAGE);
    let (code, _, err) = call(&["nlo", "--s", "3", "--slope", "19/1", "--depht", "4"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("--depht"), "{err}");
}

#[test]
fn usage_errors_name_the_flag() {
    let (_, _, err) = call(&["h1", "--s", "3", "--slope", "19"]);
    assert!(err.contains("--slope"), "{err}");
    let (_, _, err) = call(&["gen", "--s", "1"]);
    assert!(err.contains("--s"), "{err}");
}

#[test]
fn depth_flag_and_budget_can_starve_the_search() {
    let (code, v) = json(&["nlo", "--s", "3", "--slope", "19/1", "--depth", "1"]);
    assert_eq!(code, EXIT_INCONCLUSIVE);
    assert_eq!(v["status"], "inconclusive");
    let (code, _) = json(&["nlo", "--s", "3", "--slope", "19/1", "--budget", "3"]);
    assert_eq!(code, EXIT_INCONCLUSIVE);
    assert_eq!(json(&["nlo", "--s", "3", "--slope", "19/1", "--depth", "10"]).0, EXIT_PASS);
}

#[test]
fn trace_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.json");
    let t = trace.to_str().unwrap();
    assert_eq!(call(&["derive", "--s", "4", "--emit-trace", t]).0, EXIT_PASS);
    assert_eq!(call(&["verify", "trace", t]).0, EXIT_PASS);
    assert_valid(&schema("trace.schema.json"), &serde_json::from_str(&fs::read_to_string(&trace).unwrap()).unwrap());

    // a tampered trace fails replay with exit 1
    let mut doc: Value = serde_json::from_str(&fs::read_to_string(&trace).unwrap()).unwrap();
    let moves = doc["moves"].as_array_mut().unwrap();
    moves.swap(3, 40);
    fs::write(&trace, serde_json::to_string(&doc).unwrap()).unwrap();
    assert_eq!(call(&["verify", "trace", t]).0, EXIT_FAIL);

    fs::write(&trace, "{not json").unwrap();
    assert_eq!(call(&["verify", "trace", t]).0, EXIT_USAGE);
}

#[test]
fn presentation_files_parse_and_abelianize() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.pres");
    let (_, text, _) = call(&["surgery", "--s", "3", "--slope", "19/1", "--emit"]);
    fs::write(&path, &text).unwrap();
    let p = path.to_str().unwrap();
    let (code, out, _) = call(&["parse", p]);
    assert_eq!((code, out), (EXIT_PASS, text));
    let (code, v) = json(&["abelianize", p, "--word", "c^19"]);
    assert_eq!(code, EXIT_PASS);
    assert_eq!(v["invariants"], serde_json::json!(["19"]));
    assert_eq!(v["image"]["zero"], true);
}

#[test]
fn json_outputs_match_schema_and_golden_files() {
    let out = schema("cli-output.schema.json");
    let cert = schema("certificate.schema.json");
    let cases: &[(&str, &[&str])] = &[
        ("gen_wirtinger_s3.json", &["gen", "--s", "3"]),
        ("gen_tunnel_s3.json", &["gen", "--s", "3", "--stage", "tunnel"]),
        ("derive_s3.json", &["derive", "--s", "3", "--verify-induction"]),
        ("surgery_s3_19.json", &["surgery", "--s", "3", "--slope", "19/1"]),
        ("verify_fact_s3.json", &["verify", "fact", "--s", "3"]),
        ("verify_lemma_k_39_2.json", &["verify", "lemma-k", "--slope", "39/2"]),
        ("h1_s3_39_2.json", &["h1", "--s", "3", "--slope", "39/2"]),
        ("nlo_s3_19.json", &["nlo", "--s", "3", "--slope", "19/1"]),
        ("nlo_s3_17.json", &["nlo", "--s", "3", "--slope", "17/1"]),
    ];
    for (name, args) in cases {
        let (_, v) = json(args);
        assert_valid(&out, &v);
        if v["command"] == "nlo" {
            assert_valid(&cert, &v["certificate"]);
        }
        golden(name, &v);
    }
    let (code, v) = json(&["gen", "--s", "1"]);
    assert_eq!(code, EXIT_USAGE);
    assert_valid(&out, &v);
}
