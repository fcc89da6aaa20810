//! The `wittlab` binary end to end.

use std::process::{Command, Output};

use serde_json::Value;

fn wittlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wittlab"))
        .args(args)
        .env_remove("WITTLAB_SEED")
        .output()
        .expect("spawn wittlab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

#[test]
fn exit_codes() {
    assert_eq!(wittlab(&["witt", "ghost", "W{m=3; [1, 2, 3]}", "--ring", "QQ"]).status.code(), Some(0));
    assert_eq!(wittlab(&["witt", "ghost", "W{m=3; [1, 2", "--ring", "QQ"]).status.code(), Some(2));
    assert_eq!(wittlab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(wittlab(&["witt", "add"]).status.code(), Some(2));
    assert_eq!(wittlab(&["witt", "log", "2 + t", "--m", "3", "--ring", "QQ"]).status.code(), Some(1));
    assert_eq!(wittlab(&["cartier", "C", "dx", "--ring", "QQ(x)"]).status.code(), Some(1));
}

#[test]
fn errors_go_to_stderr_with_a_code() {
    let o = wittlab(&["witt", "log", "2 + t", "--m", "3", "--ring", "QQ"]);
    assert!(o.stdout.is_empty());
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.starts_with("error["), "{err}");
}

#[test]
fn json_documents_carry_a_schema() {
    let ok = wittlab(&["--json", "witt", "ghost", "W{m=3; [1, 2, 3]}", "--ring", "QQ"]);
    assert_eq!(json(&ok)["schema"], 1);
    let bad = wittlab(&["--json", "witt", "add"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(bad.stdout.is_empty());
    let v: Value = serde_json::from_slice(&bad.stderr).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["error"]["code"], "usage");
}

#[test]
fn ghost_components_are_printed() {
    // w_n = sum_{d | n} d a_d^(n/d) on (1, 2, 3): 1, 1 + 4, 1 + 9
    let o = wittlab(&["witt", "ghost", "W{m=3; [1, 2, 3]}", "--ring", "QQ"]);
    assert!(stdout(&o).contains("[1, 5, 10]"), "{}", stdout(&o));
}

#[test]
fn seed_comes_from_the_environment() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_wittlab"));
        c.env_remove("WITTLAB_SEED");
        if let Some(s) = env {
            c.env("WITTLAB_SEED", s);
        }
        c.arg("--json");
        if let Some(s) = flag {
            c.args(["--seed", s]);
        }
        c.args(["selftest", "--suite", "ghost", "--scale", "0.1"]);
        json(&c.output().unwrap())["seed"].clone()
    };
    assert_eq!(run(None, Some("7")), 7);
    assert_eq!(run(Some("11"), Some("7")), 11);
    assert_eq!(run(Some("11"), None), 11);
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let o = wittlab(&["selftest", "--suite", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn ledger_matches_the_checked_in_file() {
    let o = wittlab(&["oracle", "ledger"]);
    assert_eq!(o.status.code(), Some(0));
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../tests/ledger/kmilnor.json");
    let stored = std::fs::read_to_string(path).unwrap();
    let a: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let b: Value = serde_json::from_str(&stored).unwrap();
    assert_eq!(a, b);
}
