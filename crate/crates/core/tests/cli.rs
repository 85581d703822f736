use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn necwb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_necwb"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code_of(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn read(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn two_paths() -> Value {
    json!({
        "kind": "multiple_unicast",
        "nodes": ["s1", "t1", "s2", "t2"],
        "edges": [
            {"id": "e1", "tail": "s1", "head": "t1", "capacity": 1},
            {"id": "e2", "tail": "s2", "head": "t2", "capacity": 1}
        ],
        "pairs": [{"source": "s1", "terminal": "t1"}, {"source": "s2", "terminal": "t2"}]
    })
}

fn relay_code() -> Value {
    json!({
        "block_length": 1,
        "message_bits": 1,
        "encoders": {"e1": {"relay": 0}, "e2": {"relay": 0}},
        "decoders": {"t1": {"relay": 0}, "t2": {"relay": 0}}
    })
}

#[test]
fn cx_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let (inst, code, demo) = (dir.path().join("i.json"), dir.path().join("c.json"), dir.path().join("d.json"));
    let out = necwb(&["cx", "--k", "2", "--n", "2", "--write-instance", s(&inst), "--write-code", s(&code), "--out", s(&demo)]);
    assert_eq!(code_of(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let d = read(&demo);
    assert_eq!(d["rate_points"][0]["rate"], json!({"num": 1, "den": 1}));
    assert_eq!(d["rate_points"][0]["epsilon"], json!({"num": 0, "den": 1}));

    let report = dir.path().join("r.json");
    let out = necwb(&["verify", "--instance", s(&inst), "--code", s(&code), "--out", s(&report), "--workers", "2"]);
    assert_eq!(code_of(&out), 0);
    let r = read(&report);
    assert_eq!(r["epsilon"], json!({"num": 0, "den": 1}));
    assert_eq!(r["good_count"], 4);
    assert_eq!(r["bad"], json!([]));
    assert!(r["fingerprint"].as_str().unwrap().starts_with("sha256:"));
    assert_eq!(r["config"]["workers"], 2);
}

#[test]
fn verify_reports_limits_and_parse_errors() {
    let dir = tempfile::tempdir().unwrap();
    let (inst, code) = (dir.path().join("i.json"), dir.path().join("c.json"));
    assert_eq!(code_of(&necwb(&["cx", "--n", "2", "--write-instance", s(&inst), "--write-code", s(&code)])), 0);

    let out = necwb(&["verify", "--instance", s(&inst), "--code", s(&code), "--max-patterns", "5"]);
    assert_eq!(code_of(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("max patterns"));

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{ not json").unwrap();
    assert_eq!(code_of(&necwb(&["verify", "--instance", s(&broken), "--code", s(&code)])), 2);
    assert_eq!(code_of(&necwb(&["verify", "--instance", s(&inst)])), 2);
}

#[test]
fn verify_flags_a_bad_code() {
    let dir = tempfile::tempdir().unwrap();
    let (inst, code) = (dir.path().join("i.json"), dir.path().join("c.json"));
    assert_eq!(code_of(&necwb(&["cx", "--n", "2", "--write-instance", s(&inst), "--write-code", s(&code)])), 0);
    let mut c = read(&code);
    c["decoders"]["t"] = json!({"const": 0});
    let bad = write(dir.path(), "bad.json", &c);
    let out = necwb(&["verify", "--instance", s(&inst), "--code", s(&bad)]);
    assert_eq!(code_of(&out), 1);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["epsilon"], json!({"num": 3, "den": 4}));
}

#[test]
fn reduce_embed_transfer_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mu = write(dir.path(), "mu.json", &two_paths());
    let relay = write(dir.path(), "relay.json", &relay_code());
    assert_eq!(code_of(&necwb(&["verify", "--instance", s(&mu), "--code", s(&relay)])), 0);

    let gadget = dir.path().join("g.json");
    assert_eq!(code_of(&necwb(&["reduce", "--instance", s(&mu), "--out", s(&gadget)])), 0);
    let g = read(&gadget);
    assert_eq!(g["kind"], "nec");
    assert_eq!(g["edges"].as_array().unwrap().len(), 2 + 6 * 2);
    assert_eq!(g["roles"]["1"]["zp"], "zp.1");

    let nec_code = dir.path().join("nec.json");
    assert_eq!(code_of(&necwb(&["embed", "--instance", s(&gadget), "--code", s(&relay), "--out", s(&nec_code)])), 0);
    assert_eq!(code_of(&necwb(&["verify", "--instance", s(&gadget), "--code", s(&nec_code)])), 0);

    let (tau, report) = (dir.path().join("tau.json"), dir.path().join("t.json"));
    let out = necwb(&["transfer", "--instance", s(&gadget), "--code", s(&nec_code), "--out", s(&tau), "--report", s(&report)]);
    assert_eq!(code_of(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let t = read(&report);
    assert_eq!(t["mu_epsilon"], json!({"num": 0, "den": 1}));
    assert_eq!(t["report"]["holds"], true);
    assert_eq!(code_of(&necwb(&["verify", "--instance", s(&mu), "--code", s(&tau)])), 0);
}

#[test]
fn reduce_names_unknown_pair_node() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = two_paths();
    v["pairs"][1]["terminal"] = json!("nowhere");
    let mu = write(dir.path(), "mu.json", &v);
    let out = necwb(&["reduce", "--instance", s(&mu)]);
    assert_eq!(code_of(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("nowhere"));
}

#[test]
fn transfer_scope_guard_and_corrupted_input() {
    let dir = tempfile::tempdir().unwrap();
    let (inst, native, rate_k) = (dir.path().join("i.json"), dir.path().join("n.json"), dir.path().join("k.json"));
    assert_eq!(code_of(&necwb(&["cx", "--n", "2", "--write-instance", s(&inst), "--write-code", s(&native)])), 0);
    assert_eq!(code_of(&necwb(&["cx", "--n", "2", "--rate-k", "--write-code", s(&rate_k)])), 0);

    let out = necwb(&["transfer", "--instance", s(&inst), "--code", s(&native)]);
    assert_eq!(code_of(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("rate"));

    let report = dir.path().join("t.json");
    let out = necwb(&["transfer", "--instance", s(&inst), "--code", s(&rate_k), "--report", s(&report)]);
    assert_eq!(code_of(&out), 0);
    assert_eq!(read(&report)["report"]["epsilon"], json!({"num": 3, "den": 4}));

    let trial = dir.path().join("trial.json");
    let out = necwb(&["analyze", "--instance", s(&inst), "--code", s(&rate_k), "--seed", "11", "--out", s(&trial)]);
    assert_eq!(code_of(&out), 0);
    let t = read(&trial);
    assert_eq!(t["holds"], true);
    assert_eq!(t["config"]["seed"], 11);
}

#[test]
fn cx_search_and_scale_guard() {
    let out = necwb(&["cx", "--k", "2", "--n", "2,3,4", "--n1-search"]);
    assert_eq!(code_of(&out), 0);
    let d: Value = serde_json::from_slice(&out.stdout).unwrap();
    let rates: Vec<&Value> = d["rate_points"].as_array().unwrap().iter().map(|p| &p["rate"]).collect();
    assert_eq!(rates, [&json!({"num": 1, "den": 1}), &json!({"num": 4, "den": 3}), &json!({"num": 3, "den": 2})]);
    assert_eq!(d["n1_search"]["satisfying"], 0);
    assert_eq!(d["cutset_bound"], json!({"num": 1, "den": 2}));

    let out = necwb(&["cx", "--k", "5", "--n", "2", "--n1-search"]);
    assert_eq!(code_of(&out), 0);
    let d: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(d["n1_search"], Value::Null);
    assert!(String::from_utf8_lossy(&out.stderr).contains("skipped"));
}

#[test]
fn analyze_describes_instances() {
    let dir = tempfile::tempdir().unwrap();
    let mu = write(dir.path(), "mu.json", &two_paths());
    let out = necwb(&["analyze", "--instance", s(&mu)]);
    assert_eq!(code_of(&out), 0);
    let d: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(d["pairs"], 2);
    assert_eq!(d["cutset_bound"], json!({"num": 1, "den": 1}));

    let inst = dir.path().join("i.json");
    assert_eq!(code_of(&necwb(&["cx", "--n", "2", "--write-instance", s(&inst)])), 0);
    let out = necwb(&["analyze", "--instance", s(&inst), "--n", "1,2"]);
    let d: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(d["pattern_counts"][1]["patterns"], "40");
    assert_eq!(d["branches"], 2);
}
