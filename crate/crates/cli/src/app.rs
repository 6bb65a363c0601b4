//! The command line front end: argument parsing, input, output and exit codes.

use std::ffi::OsString;
use std::io::{Read, Write};

use clap::Parser;

use crate::commands::{run_command, CliError, Command, Flags};
use crate::problem::parse_problem;
use crate::report::digest;

/// Twisted groupoid convolution algebras: cocycle checks, norms and
/// spectral diagnostics.
#[derive(Parser, Debug)]
#[command(name = "twistalg", version, about)]
struct Args {
    /// validate, norm, convolve, spectrum, radius, repnorm, duality, interp,
    /// gap, embed, genl1, lift or counterexample
    command: String,
    /// Problem file, or `-` for standard input
    file: Option<String>,
    /// Emit JSON (the default)
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// Emit the scalar table as CSV (radius, gap and counterexample)
    #[arg(long)]
    csv: bool,
    /// Element to operate on
    #[arg(long)]
    element: Option<String>,
    /// Second factor for convolve
    #[arg(long)]
    with: Option<String>,
    /// Exponent p, as a decimal, fraction or `inf`
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    /// Word-length truncation radius of the fibers
    #[arg(long)]
    ball: Option<usize>,
    /// Largest power used for ℓ¹ radius bounds
    #[arg(long)]
    max_power: Option<usize>,
    /// Support cap for repeated convolution
    #[arg(long)]
    term_cap: Option<usize>,
    /// Fiber order n for the ℤ/n twist
    #[arg(long)]
    fiber: Option<u32>,
    /// Unit, by name or index
    #[arg(long)]
    unit: Option<String>,
    /// Seed for randomized checks
    #[arg(long)]
    seed: Option<u64>,
    /// Number of random trials
    #[arg(long)]
    trials: Option<usize>,
    /// Counterexample coefficient, `re` or `re,im`
    #[arg(long, allow_hyphen_values = true)]
    a0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a2: Option<String>,
}

fn read_input(path: &str, stdin: &mut dyn Read) -> Result<String, CliError> {
    if path == "-" {
        let mut s = String::new();
        stdin.read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(std::fs::read_to_string(path)?)
    }
}

fn dispatch(args: Args, stdin: &mut dyn Read, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let cmd: Command = args.command.parse()?;
    let flags = Flags {
        element: args.element,
        with: args.with,
        p: args.p,
        ball: args.ball,
        max_power: args.max_power,
        term_cap: args.term_cap,
        fiber: args.fiber,
        unit: args.unit,
        seed: args.seed,
        trials: args.trials,
        a0: args.a0,
        a1: args.a1,
        a2: args.a2,
    };
    let (pf, hash) = match &args.file {
        Some(path) => {
            let text = read_input(path, stdin)?;
            (Some(parse_problem(&text)?), Some(digest(text.as_bytes())))
        }
        None if cmd.needs_file() => return Err(CliError::MissingFlag { command: cmd.name(), flag: "a problem file" }),
        None => (None, None),
    };
    let mut report = run_command(pf.as_ref(), cmd, &flags)?;
    report.digest = hash;
    let out = if args.csv {
        report
            .render_csv()
            .ok_or_else(|| CliError::Invalid(format!("{cmd} has no table for --csv")))?
    } else {
        report.render_json()
    };
    stdout.write_all(out.as_bytes())?;
    Ok(report.exit_code())
}

/// Runs the tool on `args` (including the program name) and returns the exit
/// code: 0 when every verdict passes, 2 when one fails, 1 on errors.
pub fn run_cli<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(args, stdin, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}
