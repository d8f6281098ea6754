use clap::Args;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Params,
    Simulate,
    Enumerate,
    Check,
    Bounds,
    Certify,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Params => "params",
            Command::Simulate => "simulate",
            Command::Enumerate => "enumerate",
            Command::Check => "check",
            Command::Bounds => "bounds",
            Command::Certify => "certify",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Every input of one run. Read from `--manifest` (JSON) and from flags;
/// flags win.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct Manifest {
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,

    /// Number of particles.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Dimension (continuum) or degree (bounds on graphs).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    /// `l2` or `linf`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric: Option<String>,
    /// Exclusion radius.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// Pair-collision probability.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Packing density.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Configuration size for conditional estimates and graph checks.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,

    /// `naive-mc`, `telescoping` or `exact`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    /// `auto`, `rejection` or `mcmc`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backend: Option<String>,
    /// Uniform probes per coverage sample in dimension 2 and up.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probes: Option<usize>,
    /// Emit one conditional sample as a point CSV instead of an estimate.
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub sample: bool,

    /// `cycle:N`, `hypercube:D`, `torus:DIM:SIDE`, `kdd:D:COPIES`, `file:PATH`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<String>,
    /// Edge-list file: a line `n d`, then one `u v` pair per line.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge_list: Option<PathBuf>,
    /// `is` or `matching`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    /// Check every feasible size.
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub all_k: bool,
    /// Compare against the disjoint union of `K_{d,d}`.
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub conjecture: bool,

    /// `sphere`, `sphere24`, `square`, `hardcore` or `matching`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    /// Packing density of the reference packing.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    /// Scale parameter of the d = 24 certificate.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// Curve points for `bounds`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicas: Option<usize>,
    /// `json` or `csv`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Worker threads; never changes the output.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Record wall time in the JSON report.
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub timing: bool,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($opt:ident),*; $($flag:ident),*) => {
        $( if $top.$opt.is_some() { $base.$opt = $top.$opt; } )*
        $( $base.$flag |= $top.$flag; )*
    };
}

impl Manifest {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("manifest {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("manifest {}: {e}", path.display())))
    }

    /// `self` with every value set in `top` replaced.
    pub fn overlay(mut self, top: Manifest) -> Self {
        let base = &mut self;
        overlay!(base, top;
            command, n, d, metric, r, p, alpha, k, method, backend, probes, graph, edge_list,
            mode, model, rho, t, points, seed, replicas, format, out, threads;
            sample, all_k, conjecture, timing);
        self
    }

    /// The inputs that determine the output; run-environment fields such as
    /// the output path and thread count are dropped.
    pub fn recorded(&self) -> Manifest {
        Manifest {
            out: None,
            threads: None,
            timing: false,
            format: None,
            ..self.clone()
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn format(&self) -> Result<Format, CliError> {
        match self.format.as_deref() {
            None | Some("json") => Ok(Format::Json),
            Some("csv") => Ok(Format::Csv),
            Some(other) => Err(CliError::field(
                "format",
                format!("expected json or csv, got `{other}`"),
            )),
        }
    }

    pub fn require<T: Copy>(
        value: Option<T>,
        name: &'static str,
        command: Command,
    ) -> Result<T, CliError> {
        value.ok_or_else(|| CliError::field(name, format!("required by `{command}`")))
    }

    pub fn parse_field<T>(value: Option<&str>, name: &'static str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        value
            .map(|s| {
                s.parse::<T>()
                    .map_err(|e| CliError::field(name, e.to_string()))
            })
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_values() {
        let file: Manifest = serde_json::from_str(
            r#"{"command":"simulate","n":4,"d":1,"p":0.1,"seed":7,"all_k":true}"#,
        )
        .unwrap();
        let flags = Manifest {
            n: Some(9),
            timing: true,
            ..Manifest::default()
        };
        let m = file.overlay(flags);
        assert_eq!(m.n, Some(9));
        assert_eq!(m.d, Some(1));
        assert_eq!(m.seed(), 7);
        assert!(m.all_k && m.timing);
        assert_eq!(m.command, Some(Command::Simulate));
    }

    #[test]
    fn recorded_inputs_drop_run_environment() {
        let m = Manifest {
            n: Some(3),
            threads: Some(8),
            out: Some("x.json".into()),
            timing: true,
            ..Manifest::default()
        };
        let text = serde_json::to_string(&m.recorded()).unwrap();
        assert_eq!(text, r#"{"n":3}"#);
    }

    #[test]
    fn unknown_fields_are_named() {
        let err = serde_json::from_str::<Manifest>(r#"{"radius":0.1}"#).unwrap_err();
        assert!(err.to_string().contains("radius"));
    }

    #[test]
    fn format_names() {
        let m = Manifest {
            format: Some("xml".into()),
            ..Manifest::default()
        };
        assert!(m.format().unwrap_err().to_string().contains("`format`"));
        assert_eq!(Manifest::default().format().unwrap(), Format::Json);
    }
}
