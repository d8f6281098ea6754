//! The `birthday` command-line tool: manifests, dispatch to `birthday-core`
//! and JSON/CSV reports.
//!
//! Exit codes: 0 when every requested check holds, 2 when a check reports a
//! violation (or `certify` certifies a failure of the birthday bound), 1 on
//! usage or runtime errors.

mod commands;
pub mod emit;
pub mod manifest;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;
use std::fmt;
use std::path::PathBuf;
use std::time::Instant;

pub use emit::Table;
pub use manifest::{Command, Format, Manifest};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] birthday_core::Error),
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn field(name: &str, reason: impl fmt::Display) -> Self {
        CliError::Usage(format!("field `{name}`: {reason}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Violation,
}

impl Status {
    pub fn from_holds(holds: bool) -> Self {
        if holds {
            Status::Ok
        } else {
            Status::Violation
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Violation => 2,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "ok",
            Status::Violation => "violation",
        })
    }
}

/// What a command computed, in both output shapes.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub results: Value,
    pub table: Table,
    pub status: Status,
}

impl Outcome {
    pub fn new(results: Value, table: Table, status: Status) -> Self {
        Outcome {
            results,
            table,
            status,
        }
    }

    pub fn ok(results: Value, table: Table) -> Self {
        Outcome::new(results, table, Status::Ok)
    }
}

/// Runs `manifest.command` and returns the report text alongside its status.
pub fn render(manifest: &Manifest) -> Result<(String, Status), CliError> {
    let command = manifest
        .command
        .ok_or_else(|| CliError::field("command", "no command given"))?;
    let format = manifest.format()?;
    let start = Instant::now();
    let outcome = match manifest.threads {
        Some(0) => return Err(CliError::field("threads", "must be at least 1")),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Io(std::io::Error::other(e)))?
            .install(|| commands::execute(command, manifest))?,
        None => commands::execute(command, manifest)?,
    };
    let wall = manifest.timing.then(|| start.elapsed().as_secs_f64());
    let text = match format {
        Format::Json => emit::render_json(command, manifest, outcome.results, outcome.status, wall),
        Format::Csv => emit::render_csv(&outcome.table)?,
    };
    Ok((text, outcome.status))
}

/// Runs the manifest and writes its report to `--out` or standard output.
pub fn run(manifest: &Manifest) -> Result<Status, CliError> {
    let (text, status) = render(manifest)?;
    emit::write_output(manifest.out.as_deref(), &text)?;
    Ok(status)
}

#[derive(Debug, Parser)]
#[command(
    name = "birthday",
    version,
    about = "Birthday and repulsion inequality laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Args)]
struct Flags {
    /// JSON manifest; flags given on the command line override its values.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[command(flatten)]
    values: Manifest,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Complete one of r, p, alpha into the full model parameters.
    Params(Flags),
    /// Monte Carlo estimates of Pr[E_n] or of the repulsion gap at size k.
    Simulate(Flags),
    /// Exact independent-set or matching counts by size.
    Enumerate(Flags),
    /// Exact birthday, repulsion and second-order checks on a graph.
    Check(Flags),
    /// Bound curves, failure intervals and crossings.
    Bounds(Flags),
    /// Certify a failure of the birthday bound.
    Certify(Flags),
    /// Run the command named in the manifest file.
    Run(Flags),
}

fn resolve(sub: Sub) -> Result<Manifest, CliError> {
    let (command, flags) = match sub {
        Sub::Params(f) => (Some(Command::Params), f),
        Sub::Simulate(f) => (Some(Command::Simulate), f),
        Sub::Enumerate(f) => (Some(Command::Enumerate), f),
        Sub::Check(f) => (Some(Command::Check), f),
        Sub::Bounds(f) => (Some(Command::Bounds), f),
        Sub::Certify(f) => (Some(Command::Certify), f),
        Sub::Run(f) => (None, f),
    };
    let base = match &flags.manifest {
        Some(path) => Manifest::from_file(path)?,
        None => Manifest::default(),
    };
    let mut top = flags.values;
    top.command = command;
    Ok(base.overlay(top))
}

/// Parses command-line arguments (program name first) into the manifest they
/// describe, reading `--manifest` if given.
pub fn parse_args<I, T>(args: I) -> Result<Manifest, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    resolve(cli.command)
}

/// Entry point of the binary; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match resolve(cli.command).and_then(|m| run(&m)) {
        Ok(status) => status.exit_code(),
        Err(e) => {
            eprintln!("birthday: {e}");
            1
        }
    }
}
