//! The `lazylab` binary: outputs, exit codes and determinism.

use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn lazylab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lazylab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn temp_file(name: &str, contents: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("lazylab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::File::create(&path).unwrap().write_all(contents.as_bytes()).unwrap();
    path
}

#[test]
fn eval_prints_heap_and_value() {
    let o = lazylab(&["eval", "--semantics", "natural", "--fuel", "50", r"let i = \x.x in i i"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "{i_1 = \\x. x} : \\x. x\n");
}

#[test]
fn eval_with_heap_file() {
    let heap = temp_file("heap.txt", "# identity\ni = \\x. x\nj = i\n");
    let o = lazylab(&["eval", "--heap", heap.to_str().unwrap(), "j"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "{i = \\x. x, j = \\x. x} : \\x. x\n");

    let json = temp_file("heap.json", r#"{"bindings": [["i", "\\x. x"], ["j", "i"]]}"#);
    let o = lazylab(&["eval", "--semantics", "stacked", "--heap", json.to_str().unwrap(), "j"]);
    assert_eq!(stdout(&o), "{i = \\x. x, j = \\x. x} : \\x. x\n");

    let dup = temp_file("dup.txt", "i = \\x. x\ni = \\y. y\n");
    assert_eq!(lazylab(&["eval", "--heap", dup.to_str().unwrap(), "i"]).status.code(), Some(2));
    assert_eq!(lazylab(&["eval", "--heap", "/nonexistent/heap", "i"]).status.code(), Some(2));
}

#[test]
fn stuck_evaluation_exits_one() {
    for (expr, what) in [(r"let x = x in x", "blackhole"), ("y", "unbound"), (r"let o = \x. x x in o o", "diverged")] {
        let o = lazylab(&["eval", "--fuel", "100", expr]);
        assert_eq!(o.status.code(), Some(1), "{expr}");
        assert!(stderr(&o).contains(what), "{expr}: {}", stderr(&o));
        let o = lazylab(&["eval", "--json", "--fuel", "100", expr]);
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_ne!(v["outcome"], "success");
    }
}

#[test]
fn general_applications_are_rewritten_unless_strict() {
    let o = lazylab(&["eval", r"(\x. x) (\y. y)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).starts_with("warning:"));
    let o = lazylab(&["eval", "--strict", r"(\x. x) (\y. y)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("error"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(lazylab(&[]).status.code(), Some(2));
    assert_eq!(lazylab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(lazylab(&["eval", "--fuel", "0", "x"]).status.code(), Some(2));
    assert_eq!(lazylab(&["eval", r"\x"]).status.code(), Some(2));
    assert_eq!(lazylab(&["denote", "--rank", "5", "x"]).status.code(), Some(2));
    assert_eq!(lazylab(&["check", "--suite", "nothing"]).status.code(), Some(2));
    assert_eq!(lazylab(&["--help"]).status.code(), Some(0));
    assert_eq!(lazylab(&["--version"]).status.code(), Some(0));
}

#[test]
fn denote_with_environment() {
    let env = temp_file("env.json", r#"{"rank": 3, "bindings": {"y": {"rank": 3, "fn": [0, 1, 2, 3]}}}"#);
    let path = env.to_str().unwrap();
    let o = lazylab(&["denote", "--env", path, "--json", r"\x. y"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    // A constant function returning the rank-2 identity.
    assert_eq!(v["value"]["fn"], serde_json::json!([2, 2, 2, 2]));

    let o = lazylab(&["denote", "--rank", "2", "--env", path, "y"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("rank"));
}

#[test]
fn denote_heap_variants() {
    let heap = temp_file("cx.txt", "x = \\a. let b = b in b\n");
    let env = temp_file("cx.json", r#"{"rank": 3, "bindings": {"x": {"rank": 3, "fn": [2, 2, 2, 2]}}}"#);
    let run = |variant| {
        let o = lazylab(&[
            "denote", "--heap", heap.to_str().unwrap(), "--env", env.to_str().unwrap(), "--variant", variant, "x",
        ]);
        assert_eq!(o.status.code(), Some(0));
        stdout(&o).lines().last().unwrap().to_string()
    };
    assert_eq!(run("join"), "Fn3[2,2,2,2]");
    assert_eq!(run("update"), "Fn3[0,0,0,0]");
}

#[test]
fn counterexample_matches_golden() {
    let o = lazylab(&["counterexample", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), include_str!("golden/counterexample.json"));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["join_variant"], "not_equal");
    assert_eq!(v["update_variant"], "equal");
}

#[test]
fn check_json_is_deterministic() {
    let args = ["check", "--suite", "lemmas", "--cases", "60", "--seed", "7", "--json"];
    let a = lazylab(&args);
    let b = lazylab(&[&args[..], &["--jobs", "1"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["reports"].as_array().unwrap().len(), 17);
    assert!(v["reports"][0].get("duration_ms").is_none());
}

#[test]
fn check_counterexamples_suite() {
    let o = lazylab(&["check", "--suite", "counterexamples"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("all 2 properties passed"), "{}", stdout(&o));
}
