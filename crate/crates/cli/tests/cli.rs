use std::process::{Command, Output};

use chordlog::expansions::{hk_closed_form, HkClosedForm};
use serde_json::Value;

fn chordlog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chordlog")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json_of(args: &[&str]) -> Value {
    let out = chordlog(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], "chordlog/1");
    v
}

#[test]
fn expand_latex_golden() {
    let out = chordlog(&["expand", "--s", "2", "--k", "0", "--format", "latex"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "\\sqrt{1+2a_{1,0}z}-1");
}

#[test]
fn expand_defaults_to_s2_k0() {
    let a = stdout(&chordlog(&["expand", "--format", "latex"]));
    let b = stdout(&chordlog(&["expand", "--s", "2", "--k", "0", "--format", "latex"]));
    assert_eq!(a, b);
}

#[test]
fn expand_json_round_trip() {
    for (s, k) in [(1, 2), (2, 1), (3, 2)] {
        let v = json_of(&["expand", "--s", &s.to_string(), "--k", &k.to_string(), "--format", "json"]);
        let back: HkClosedForm = serde_json::from_value(v).unwrap();
        assert_eq!(back, hk_closed_form(k, s));
    }
}

#[test]
fn check_passes() {
    let out = chordlog(&["check", "--s", "1", "--k", "2", "--order", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("identical"));
    let v = json_of(&["check", "--s", "2", "--k", "1", "--order", "4", "--format", "json"]);
    assert_eq!(v["identical"], true);
}

#[test]
fn count_four_chords() {
    let text = stdout(&chordlog(&["count", "--n", "4"]));
    assert!(text.contains("connected diagrams: 27"), "{text}");
    assert!(text.contains("one terminal chord: 15"), "{text}");
    let v = json_of(&["count", "--n", "4", "--format", "json"]);
    assert_eq!((v["connected"].as_u64(), v["one_terminal"].as_u64()), (Some(27), Some(15)));
    let by_type: u64 = v["decorated_by_type"].as_array().unwrap().iter().map(|t| t["count"].as_u64().unwrap()).sum();
    assert_eq!(by_type, 43);
}

#[test]
fn series_with_values() {
    let path = std::env::temp_dir().join(format!("chordlog-a-{}.json", std::process::id()));
    std::fs::write(&path, r#"{"a":[{"i":1,"j":0,"v":"1"}]}"#).unwrap();
    let out = chordlog(&["series", "--k", "0", "--order", "4", "--a", path.to_str().unwrap(), "--format", "csv"]);
    std::fs::remove_file(&path).ok();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // (-1)^{n+1} (2n-3)!! / n!
    assert_eq!(stdout(&out), "n,coefficient\n1,1\n2,-1/2\n3,1/2\n4,-5/8\n");
}

#[test]
fn green_and_p_tables() {
    let v = json_of(&["green", "--s", "2", "--order", "3", "--format", "json"]);
    let cells = v["coefficients"].as_array().unwrap();
    assert!(cells.iter().all(|c| c["i"].as_u64() <= c["j"].as_u64()));
    let v = json_of(&["pfun", "--order", "3", "--format", "json"]);
    assert_eq!(v["coefficients"][0]["n"], 1);
    assert_eq!(stdout(&chordlog(&["pfun", "--order", "1"])).trim(), "x^1: -a10");
}

#[test]
fn asymptotics_csv() {
    let out = chordlog(&["asymptotics", "--s", "2", "--k", "1", "--nmax", "100", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("n,exact,estimate,ratio,neighbor_ratio\n"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn thread_count_does_not_change_output() {
    let a = stdout(&chordlog(&["--threads", "1", "green", "--s", "2", "--order", "5"]));
    let b = stdout(&chordlog(&["--threads", "4", "green", "--s", "2", "--order", "5"]));
    assert_eq!(a, b);
}

#[test]
fn flag_errors_exit_two() {
    for args in [
        &["expand", "--s", "0"][..],
        &["expand", "--bogus"],
        &["count"],
        &["expand", "--format", "csv"],
        &["check", "--k", "3", "--order", "9"],
        &["series", "--a", "/nonexistent/a.json"],
    ] {
        let out = chordlog(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}
