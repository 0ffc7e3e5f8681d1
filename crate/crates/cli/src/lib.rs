//! Command-line front end: one primary table per run plus a manifest.
//!
//! Exit codes: 0 success, 1 I/O or runtime failure, 2 bad arguments or
//! configuration, 3 infeasible request, 4 a checked claim failed.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::config::{parse_config, Format, RunArgs};
use crate::output::{emit_curves, manifest_text, rows_csv, rows_json};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("infeasible: {0}")]
    Feasibility(String),
    #[error("assertion failed: {}", .0.join("; "))]
    Assertion(Vec<String>),
    #[error("i/o: {0}")]
    Io(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Feasibility(_) => 3,
            CliError::Assertion(_) => 4,
            CliError::Io(_) | CliError::Runtime(_) => 1,
        }
    }
}

impl From<entconc::Error> for CliError {
    fn from(e: entconc::Error) -> Self {
        use entconc::Error as E;
        match e {
            _ if e.is_feasibility() => CliError::Feasibility(e.to_string()),
            E::InvalidInput(_) | E::InvalidDistribution(_) | E::LengthMismatch { .. } => CliError::Parse(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "entconc", version, about = "Concentration bounds for entropy log-likelihoods")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Closed-form tail bounds side by side.
    Bounds(RunArgs),
    /// Monte Carlo tail frequencies against every applicable bound.
    McTail(RunArgs),
    /// Exact MGF against its uniform bound over random distributions.
    MgfVerify(RunArgs),
    /// Brute-force maximization checks of the two simplex lemmas.
    Oracle(RunArgs),
    /// Exact tails of the two-point counterexample.
    Counterexample(RunArgs),
    /// Grouped (misspecified) model: tails and the MGF chain.
    Misspecified(RunArgs),
    /// Typical sets, essential bit content and the typical-set block code.
    Coding(RunArgs),
    /// Classical error exponent against the uniform bound.
    Exponent(RunArgs),
}

impl Command {
    fn split(self) -> (&'static str, RunArgs) {
        match self {
            Command::Bounds(a) => ("bounds", a),
            Command::McTail(a) => ("mc-tail", a),
            Command::MgfVerify(a) => ("mgf-verify", a),
            Command::Oracle(a) => ("oracle", a),
            Command::Counterexample(a) => ("counterexample", a),
            Command::Misspecified(a) => ("misspecified", a),
            Command::Coding(a) => ("coding", a),
            Command::Exponent(a) => ("exponent", a),
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Runs one command, writing its outputs. Outputs are written before an
/// assertion or feasibility failure is reported.
pub fn execute(command: Command) -> Result<(), CliError> {
    let (name, mut args) = command.split();
    if let Some(path) = args.config.clone() {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Parse(format!("config {}: {e}", path.display())))?;
        let (file_command, file_args) = parse_config(&text)?;
        if let Some(c) = file_command {
            if c != name {
                return Err(CliError::Parse(format!("config is for '{c}', not '{name}'")));
            }
        }
        args.merge(file_args);
    }
    let start = Instant::now();
    let result = commands::dispatch(name, &mut args)?;
    let wall = start.elapsed().as_secs_f64();

    let mut manifest: Vec<(String, String)> = vec![("command".into(), name.into())];
    manifest.extend(args.pairs().into_iter().map(|(k, v)| (k.to_string(), v)));
    let echo = manifest_text(&manifest);
    let version = env!("CARGO_PKG_VERSION");
    let trailer = format!("# version = {version}\n# wall_time_s = {wall:.3}\n");
    manifest.push(("version".into(), version.into()));
    manifest.push(("wall_time_s".into(), format!("{wall:.3}")));

    let table = match args.format.unwrap_or(Format::Csv) {
        Format::Csv => rows_csv(&result.rows),
        Format::Json => rows_json(&manifest, &result.rows),
    };
    match &args.out {
        Some(path) => {
            write_file(path, &table)?;
            let mut side = path.clone().into_os_string();
            side.push(".manifest");
            write_file(Path::new(&side), &format!("{echo}{trailer}"))?;
        }
        None => {
            std::io::stdout()
                .write_all(table.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))?;
            if args.format != Some(Format::Json) {
                for line in echo.lines().chain(trailer.lines()) {
                    let line = line.trim_start_matches("# ");
                    eprintln!("# {line}");
                }
            }
        }
    }
    if let Some(path) = &args.curves {
        write_file(path, &emit_curves(result.curves))?;
    }
    if let (Some(path), Some(text)) = (&args.census, &result.census) {
        write_file(path, text)?;
    }
    if !result.failures.is_empty() {
        return Err(CliError::Assertion(result.failures));
    }
    if !result.infeasible.is_empty() {
        return Err(CliError::Feasibility(result.infeasible.join("; ")));
    }
    Ok(())
}

/// Parses `argv` (including the program name), runs, and returns the exit
/// code. Diagnostics go to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("entconc: {e}");
            e.exit_code()
        }
    }
}
