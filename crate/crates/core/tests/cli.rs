use std::process::{Command, Output};

use serde_json::Value;

fn qric(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qric")).args(args).output().expect("spawn qric")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report on stdout is JSON")
}

#[test]
fn teleclone_writes_report_to_stdout() {
    let out = qric(&["teleclone", "--d", "2", "--N", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["failed"], 0);
    assert_eq!(r["config"]["N"], 2);
    let f = r["results"]["teleclone"]["clone_fidelity_min"].as_f64().unwrap();
    assert!((f - 5.0 / 6.0).abs() < 1e-9);
    assert!(String::from_utf8_lossy(&out.stderr).contains("checks passed"));
}

#[test]
fn same_seed_same_bytes() {
    let args = ["ric", "--d", "2", "--N", "2", "--channel", "smolin", "--trials", "20", "--seed", "7"];
    let a = qric(&args);
    let b = qric(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = qric(&["ric", "--d", "2", "--N", "2", "--channel", "smolin", "--trials", "20", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn malformed_channel_names_the_tuple() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"kind":"general-pure","d":2,"N":2,"table":[{"k":[1,0],"w":1.0}]}"#).unwrap();
    let out = qric(&["ric", "--d", "2", "--N", "2", "--channel", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[1, 0]"));
}

#[test]
fn exit_codes() {
    assert_eq!(qric(&["teleclone", "--d", "1", "--N", "2"]).status.code(), Some(2));
    assert_eq!(qric(&["ric", "--channel", "no-such-preset"]).status.code(), Some(2));
    assert_eq!(qric(&["teleclone", "--d", "2", "--N", "9"]).status.code(), Some(3));
    assert_eq!(qric(&["teleclone", "--out", "/nonexistent-dir/r.json"]).status.code(), Some(4));
    assert_eq!(qric(&["ric", "--d", "3", "--N", "2", "--channel", "beta"]).status.code(), Some(1));
    assert_eq!(qric(&["verify", "--tol", "1e-30"]).status.code(), Some(1));
}

#[test]
fn many_to_many_subcommands() {
    let g = qric(&["ric-mm-ghz", "--d", "2", "--N", "2", "--L", "2"]);
    assert_eq!(g.status.code(), Some(0));
    let m = qric(&["ric-mm-multi", "--d", "2", "--N", "3", "--L", "2", "--bbar", "random"]);
    assert_eq!(m.status.code(), Some(0));
    assert_eq!(report(&m)["config"]["L"], 2);
}

#[test]
fn report_file_has_no_timings_by_default() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = qric(&["stabilizers", "--d", "3", "--N", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(r.get("timings").is_none());
    assert_eq!(r["checks"].as_array().unwrap().len(), 9);
}
