//! Runs the `twistalg` command line in process and locates the shipped
//! problem files.

use std::time::{Duration, Instant};

use serde_json::Value;
use twistalg_cli::app::run_cli;

/// One invocation: exit code, parsed JSON report and wall time.
pub struct Run {
    pub code: i32,
    pub report: Value,
    pub stderr: String,
    pub elapsed: Duration,
}

pub fn problem(name: &str) -> String {
    format!("{}/../../problems/{name}.toml", env!("CARGO_MANIFEST_DIR"))
}

pub fn fixture(name: &str) -> String {
    problem(&format!("fixtures/{name}"))
}

/// `twistalg <args>` with `stdin` as standard input. Panics when the tool
/// prints no report.
pub fn run(args: &[&str], stdin: Option<&str>) -> Run {
    let mut input = stdin.unwrap_or("").as_bytes();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let start = Instant::now();
    let code = run_cli(std::iter::once("twistalg").chain(args.iter().copied()), &mut input, &mut out, &mut err);
    let elapsed = start.elapsed();
    let stderr = String::from_utf8_lossy(&err).into_owned();
    let report = serde_json::from_slice(&out).unwrap_or_else(|_| panic!("{args:?} exited {code}: {stderr}"));
    Run { code, report, stderr, elapsed }
}
