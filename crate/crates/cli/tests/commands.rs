use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_twistalg");

fn problem(name: &str) -> String {
    format!("{}/../../problems/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let args = ["duality", &problem("s3-on-four.toml"), "--seed", "11", "--trials", "20"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let other = run(&["duality", &problem("s3-on-four.toml"), "--seed", "12", "--trials", "20"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn report_schema_and_metadata() {
    let out = run(&["radius", &problem("free2-generator-sum.toml"), "--max-power", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["schema"], "twistalg.report/1");
    assert_eq!(r["tool"]["name"], "twistalg");
    assert_eq!(r["command"]["name"], "radius");
    assert_eq!(r["command"]["flags"]["max_power"], 6);
    assert_eq!(r["input"]["digest"].as_str().unwrap().len(), 64);
    assert_eq!(r["truncation"]["max_power"], 6);
    assert_eq!(r["truncation"]["term_cap"], 5_000_000);
    assert_eq!(r["results"]["best"], 4.0);
    assert_eq!(r["results"]["constant"], true);
}

#[test]
fn run_section_supplies_defaults_and_flags_override() {
    let r = json(&run(&["gap", &problem("torus-1-2.toml")]));
    assert_eq!(r["truncation"]["max_power"], 14);
    assert_eq!(r["truncation"]["ball"], 12);
    let r = json(&run(&["gap", &problem("torus-1-2.toml"), "--ball", "6", "--max-power", "4"]));
    assert_eq!(r["truncation"]["max_power"], 4);
    assert_eq!(r["truncation"]["ball"], 6);
}

#[test]
fn stdin_input() {
    let text = std::fs::read_to_string(problem("z2-sign.toml")).unwrap();
    let mut child = Command::new(BIN)
        .args(["spectrum", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let from_file = run(&["spectrum", &problem("z2-sign.toml")]);
    assert_eq!(out.stdout, from_file.stdout);
}

#[test]
fn spectra_are_sorted_in_reports() {
    let r = json(&run(&["spectrum", &problem("pair-three.toml")]));
    let s: Vec<(f64, f64)> = r["results"]["spectrum_l1"]
        .as_array()
        .unwrap()
        .iter()
        .map(|z| (z[0].as_f64().unwrap(), z[1].as_f64().unwrap()))
        .collect();
    assert_eq!(s.len(), 9);
    assert!(s.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(s[0], (-1.0, 0.0));
    assert_eq!(s[8], (2.0, 0.0));
}

#[test]
fn corrupted_cocycle_fails_validation_with_exit_two() {
    let out = run(&["validate", &problem("corrupted-z2.toml")]);
    assert_eq!(out.status.code(), Some(2));
    let r = json(&out);
    assert_eq!(r["passed"], false);
    let v = r["results"]["violations"].as_array().unwrap();
    assert!(!v.is_empty());
    assert!(v.iter().any(|x| x["identity"] == "normalization"));
}

#[test]
fn csv_tables() {
    let out = run(&["radius", &problem("free2-generator-sum.toml"), "--max-power", "3", "--csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,norm,root,terms");
    assert_eq!(lines[1], "1,4.0,4.0,4");
    // powers 1..=3, then the dyadic tail 4 and 8
    assert_eq!(lines.len(), 6);
    assert!(lines[5].starts_with("8,"), "{text}");
    let out = run(&["spectrum", &problem("z2-sign.toml"), "--csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn errors_exit_one() {
    for args in [
        vec!["frobnicate", "x.toml"],
        vec!["spectrum"],
        vec!["norm", "/nonexistent/problem.toml"],
        vec!["embed", &problem("z2-sign.toml"), "--fiber", "3"],
        vec!["lift", &problem("s3-on-four.toml"), "--element", "iso"],
        vec!["spectrum", &problem("free2-generator-sum.toml")],
        vec!["gap", &problem("s3-on-four.toml")],
        vec!["norm", &problem("s3-on-four.toml"), "--p", "1/2"],
        vec!["norm", &problem("s3-on-four.toml"), "--no-such-flag"],
        vec!["convolve", &problem("s3-on-four.toml")],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn semantic_errors_carry_positions() {
    let path = std::env::temp_dir().join("twistalg-bad-generator.toml");
    let text = std::fs::read_to_string(problem("free2-generator-sum.toml")).unwrap().replace("\"b^-1\"", "\"c\"");
    std::fs::write(&path, &text).unwrap();
    let out = run(&["norm", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let line = text.lines().position(|l| l.contains("\"c\"")).unwrap();
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains(&format!("semantic error at {line}:")), "{err}");
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn counterexample_example() {
    let out = run(&["counterexample", "--a0", "1/3", "--a1", "1/3", "--a2", "-1/3", "--max-power", "8", "--ball", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let powers = r["results"]["powers"].as_array().unwrap();
    assert_eq!(powers.len(), 8);
    assert!(powers.iter().all(|e| e["norm"] == 1.0));
    assert!((r["results"]["sup_t"].as_f64().unwrap() - 0.745356).abs() < 1e-4);
    assert_eq!(r["command"]["flags"]["a2"], "-1/3");
}

#[test]
fn commands_on_finite_problems_pass() {
    for args in [
        vec!["validate", "s3-on-four.toml"],
        vec!["norm", "s3-on-four.toml", "--p", "3/2"],
        vec!["convolve", "s3-on-four.toml", "--with", "iso"],
        vec!["repnorm", "s3-on-four.toml", "--p", "3"],
        vec!["duality", "z2-sign.toml"],
        vec!["interp", "s3-on-four.toml", "--p", "9/5"],
        vec!["embed", "z2-sign.toml"],
        vec!["genl1", "z2-sign.toml"],
        vec!["lift", "s3-on-four.toml", "--element", "iso", "--unit", "x3"],
        vec!["gap", "z2-sign.toml", "--element", "s"],
    ] {
        let mut full = args.clone();
        let path = problem(args[1]);
        full[1] = &path;
        let out = run(&full);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stdout));
        assert_eq!(json(&out)["passed"], true, "{args:?}");
    }
}
