//! End-to-end runs of the `knotvol` binary.

use std::process::Command;

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_knotvol")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn saddle_prints_whitehead_alpha() {
    let (code, out) = run(&["saddle", "--knot", "whitehead", "--p", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("alpha0: 0.85603"), "{out}");
    assert!(out.contains("- 0.16890"), "{out}");
}

#[test]
fn jones_identical_across_thread_counts() {
    let args = |t: &'static str| ["jones", "--knot", "double", "--p", "6", "--r", "2", "--N", "31", "--format", "json", "--threads", t];
    let (c1, one) = run(&args("1"));
    let (c4, four) = run(&args("4"));
    assert_eq!((c1, c4), (0, 0));
    assert_eq!(one, four);
}

#[test]
fn json_carries_every_text_number() {
    let (_, text) = run(&["volume", "--knot", "double", "--p", "6", "--r", "2"]);
    let (_, js) = run(&["volume", "--knot", "double", "--p", "6", "--r", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&js).unwrap();
    assert_eq!(v["path"], "saddle_potential");
    let vol = v["vol"].as_f64().unwrap();
    assert!(text.contains(&format!("vol: {}", &format!("{vol:.14}")[..10])), "{text}");
    assert!(vol > 0.0 && vol < 7.3277);
}

#[test]
fn verify_exit_codes() {
    let (code, out) = run(&["verify", "--knot", "borromean", "--Ns", "101,201,401"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.trim_end().ends_with("PASS"));
    let (code, out) = run(&["verify", "--knot", "borromean", "--Ns", "21,41", "--tol", "0.01"]);
    assert_eq!(code, 4, "{out}");
    assert_eq!(run(&["verify", "--knot", "borromean", "--Ns", "41,21"]).0, 2);
    assert_eq!(run(&["jones", "--knot", "borromean"]).0, 2);
}

#[test]
fn contour_and_rep_write_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.csv");
    let (code, _) = run(&["contour", "--knot", "whitehead", "--p", "2", "--nx", "4", "--ny", "3", "--out", grid.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read_to_string(&grid).unwrap().lines().count(), 13);
    let rep = dir.path().join("rep.json");
    let (code, out) = run(&["rep", "--knot", "whitehead", "--p", "2", "--out", rep.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("max_relation_residual"), "{out}");
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    assert!(doc["fixed_points"].is_object());
}

#[test]
fn cache_is_reused() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.jsonl");
    let args = ["jones", "--knot", "whitehead", "--p", "3", "--Ns", "15,17", "--cache", cache.to_str().unwrap(), "--format", "json"];
    let (c1, first) = run(&args);
    let lines = std::fs::read_to_string(&cache).unwrap().lines().count();
    let (c2, second) = run(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(lines, 2);
    assert_eq!(std::fs::read_to_string(&cache).unwrap().lines().count(), 2);
    assert_eq!(first, second);
}
