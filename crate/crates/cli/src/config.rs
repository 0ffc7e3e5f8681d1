//! Flat `key = value` run configuration. Keys mirror the long flags.

use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaseArg {
    Nat,
    Bit,
}

impl BaseArg {
    pub fn as_str(self) -> &'static str {
        match self {
            BaseArg::Nat => "nat",
            BaseArg::Bit => "bit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Every option a run accepts. List-valued options take repeated flags or
/// comma-separated values.
#[derive(clap::Args, Debug, Clone, Default, PartialEq)]
pub struct RunArgs {
    /// Alphabet size(s).
    #[arg(long = "K", value_delimiter = ',')]
    pub k: Vec<usize>,
    /// Sample count(s) / block length(s).
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<u64>,
    /// Deviation thresholds.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub eps: Vec<f64>,
    /// Monte Carlo replicates (or distributions drawn, for mgf-verify).
    #[arg(long)]
    pub reps: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Failure probability for essential bit content.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Unit of ε and of the reported bounds.
    #[arg(long, value_enum)]
    pub base: Option<BaseArg>,
    /// Parameter generator(s): uniform, counterexample, random, boundary.
    #[arg(long, value_delimiter = ',')]
    pub gen: Vec<String>,
    /// Explicit probability vector, used for every member.
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<f64>,
    /// MGF arguments.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambda: Vec<f64>,
    /// Group sizes of the misspecified model.
    #[arg(long, value_delimiter = ',')]
    pub groups: Vec<usize>,
    /// Primary table path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Long-format curve table (x, series, value).
    #[arg(long)]
    pub curves: Option<PathBuf>,
    /// Type census table (coding only).
    #[arg(long)]
    pub census: Option<PathBuf>,
    /// Run configuration file; flags given on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub const KEYS: &[&str] = &[
    "command", "K", "n", "eps", "reps", "seed", "workers", "delta", "base", "gen", "p", "lambda",
    "groups", "out", "format", "curves", "census",
];

#[derive(Parser)]
#[command(no_binary_name = true)]
struct FileArgs {
    #[command(flatten)]
    args: RunArgs,
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl RunArgs {
    /// Fills every option not set on the command line from `file`.
    pub fn merge(&mut self, file: RunArgs) {
        fn vec<T>(a: &mut Vec<T>, b: Vec<T>) {
            if a.is_empty() {
                *a = b;
            }
        }
        fn opt<T>(a: &mut Option<T>, b: Option<T>) {
            if a.is_none() {
                *a = b;
            }
        }
        vec(&mut self.k, file.k);
        vec(&mut self.n, file.n);
        vec(&mut self.eps, file.eps);
        opt(&mut self.reps, file.reps);
        opt(&mut self.seed, file.seed);
        opt(&mut self.workers, file.workers);
        opt(&mut self.delta, file.delta);
        opt(&mut self.base, file.base);
        vec(&mut self.gen, file.gen);
        vec(&mut self.p, file.p);
        vec(&mut self.lambda, file.lambda);
        vec(&mut self.groups, file.groups);
        opt(&mut self.out, file.out);
        opt(&mut self.format, file.format);
        opt(&mut self.curves, file.curves);
        opt(&mut self.census, file.census);
    }

    /// Resolved options as `(key, value)` pairs, in [`KEYS`] order.
    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let mut push = |k: &'static str, v: Option<String>| {
            if let Some(v) = v {
                out.push((k, v));
            }
        };
        let nonempty = |s: String| if s.is_empty() { None } else { Some(s) };
        push("K", nonempty(join(&self.k)));
        push("n", nonempty(join(&self.n)));
        push("eps", nonempty(join(&self.eps)));
        push("reps", self.reps.map(|v| v.to_string()));
        push("seed", self.seed.map(|v| v.to_string()));
        push("workers", self.workers.map(|v| v.to_string()));
        push("delta", self.delta.map(|v| v.to_string()));
        push("base", self.base.map(|v| v.as_str().to_string()));
        push("gen", nonempty(self.gen.join(",")));
        push("p", nonempty(join(&self.p)));
        push("lambda", nonempty(join(&self.lambda)));
        push("groups", nonempty(join(&self.groups)));
        push("out", self.out.as_ref().map(|p| p.display().to_string()));
        push("format", self.format.map(|v| v.as_str().to_string()));
        push("curves", self.curves.as_ref().map(|p| p.display().to_string()));
        push("census", self.census.as_ref().map(|p| p.display().to_string()));
        out
    }
}

/// Parses a configuration file. Returns the `command` key (if present) and
/// the options. Unknown or repeated keys are rejected.
pub fn parse_config(text: &str) -> Result<(Option<String>, RunArgs), CliError> {
    let mut seen = BTreeSet::new();
    let mut command = None;
    let mut tokens = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Parse(format!("config line {}: expected key = value", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(CliError::Parse(format!("config line {}: unknown key '{key}'", lineno + 1)));
        }
        if !seen.insert(key.to_string()) {
            return Err(CliError::Parse(format!("config line {}: repeated key '{key}'", lineno + 1)));
        }
        if key == "command" {
            command = Some(value.to_string());
        } else {
            tokens.push(format!("--{key}={value}"));
        }
    }
    let parsed = FileArgs::try_parse_from(tokens).map_err(|e| CliError::Parse(format!("config: {e}")))?;
    Ok((command, parsed.args))
}
