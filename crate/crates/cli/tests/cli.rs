use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn e7orbit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_e7orbit")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn classify_examples() {
    let dir = tempfile::tempdir().unwrap();
    for (diag, want) in [("[1,0,0,1]", "SPIN11"), ("[0,0,0,0]", "E7"), ("[0,0,0,1]", "E6")] {
        let f = write(dir.path(), "p.json", &format!(r#"{{"diag": {diag}}}"#));
        let out = e7orbit(&["--json", "classify", &f]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(json_of(&out)["type"], want);
    }
}

#[test]
fn sample_then_classify() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("samples");
    let out = e7orbit(&["--seed", "7", "sample", "(1,1,r;s)", "-n", "2", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    for i in 0..2 {
        let f = out_dir.join(format!("sample-{i}.json"));
        let out = e7orbit(&["--json", "classify", f.to_str().unwrap()]);
        let v = json_of(&out);
        assert_eq!(v["type"], "SPIN9");
        assert_eq!(v["method_agreement"], true);
    }
    let human = e7orbit(&["classify", out_dir.join("sample-0.json").to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&human.stdout).contains("(3, 2, 1; 1)"));
}

#[test]
fn commands_are_deterministic() {
    let a = e7orbit(&["--seed", "3", "sample", "(1,2,3;5)"]);
    let b = e7orbit(&["--seed", "3", "sample", "(1,2,3;5)"]);
    assert_eq!(a.stdout, b.stdout);
    let c = e7orbit(&["--seed", "4", "sample", "(1,2,3;5)"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn verify_and_fault_injection() {
    let out = e7orbit(&["verify", "--quick"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("covariant identities: 8/8"));

    let out = e7orbit(&["verify", "--quick", "--fault-inject", "cross-overall"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("T(1, 1, 1; 0) = (3/2)(0, 0, 0; 1)"), "{err}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"diag\": [1, 2]}");
    assert_eq!(e7orbit(&["classify", &bad]).status.code(), Some(2));
    assert_eq!(e7orbit(&["classify", "/nonexistent/p.json"]).status.code(), Some(2));
    assert_eq!(e7orbit(&["sample", "(1,2,x;3)"]).status.code(), Some(2));

    // Too close to degenerate for a certain stabilizer rank.
    let near = write(dir.path(), "n.json", r#"{"diag": [1, 0.999999, 0.5, 0.2]}"#);
    let out = e7orbit(&["--json", "classify", &near]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(json_of(&out)["exit_code"], 4);
    // A gap on the eps boundary of the invariant path.
    let boundary = write(dir.path(), "b.json", r#"{"diag": [1, 0.999, 0.5, 0.2]}"#);
    let out = e7orbit(&["--json", "--eps", "1e-3", "classify", &boundary]);
    assert_eq!(out.status.code(), Some(4));
    assert!(!json_of(&out)["ambiguity"].is_null());

    let p = e7orbit(&["--seed", "1", "sample", "(1,2,3;5)"]);
    let f = write(dir.path(), "s.json", &String::from_utf8_lossy(&p.stdout));
    let out = e7orbit(&["diagonalize", &f, "--max-sweeps", "0", "--restarts", "0"]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn diagonalize_recovers_pattern() {
    let dir = tempfile::tempdir().unwrap();
    let p = e7orbit(&["--seed", "2", "sample", "(1,1,2;3)"]);
    let f = write(dir.path(), "s.json", &String::from_utf8_lossy(&p.stdout));
    let out = e7orbit(&["--json", "diagonalize", &f]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let d: Vec<f64> = v["diagonal"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (a, b) in d.iter().zip([3.0, 2.0, 1.0, 1.0]) {
        assert!((a - b).abs() < 1e-8, "{d:?}");
    }
    assert_eq!(v["check"]["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn exact_mode() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "p.json", r#"{"diag": ["1/2", 3, 0, "7/3"], "mode": "exact"}"#);
    let out = e7orbit(&["--json", "classify", &f]);
    let v = json_of(&out);
    assert_eq!(v["exact_multiset"], "(3, 7/3, 1/2; 0)");
    assert_eq!(v["type"], "SPIN8");

    let out = e7orbit(&["--json", "invariants", &f]);
    let v = json_of(&out);
    // I1 = 1/4 + 9 + 49/9.
    assert_eq!(v["I1"], serde_json::json!(["529/36", "0"]));

    let out = e7orbit(&["--mode", "exact", "sample", "(1,r,s;t)"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["mode"], "exact");
}

#[test]
fn table_flags_the_differing_representative() {
    let out = e7orbit(&["--json", "table"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["types"].as_array().unwrap().len(), 7);
    let reps = v["representatives"].as_array().unwrap();
    assert_eq!(reps.len(), 12);
    let differing: Vec<&Value> = reps.iter().filter(|r| r["stab_dim"] != r["expected_stab_dim"]).collect();
    assert_eq!(differing.len(), 1);
    assert_eq!(differing[0]["representative"], "(1, 1, 2; 2)");
    assert_eq!(differing[0]["stab_dim"], 45);
}
