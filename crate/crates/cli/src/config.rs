//! Run configuration: command-line flags merged over an optional config file.
//!
//! The config file is TOML with one `key = value` per flag (kebab-case keys,
//! the same spelling as the long flags) plus an optional `command` key.
//! Flags given on the command line win over file entries.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Subcommand};
use serde::{Deserialize, Deserializer};

use crate::error::CliError;
use crate::values::{Family, FigureId, Format, Interval, LevelSetArg, ParityChoice, Range, SamplingChoice, Scales};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    /// Solve for the closed-form levels of one (N, parity, beta1, beta3) problem
    Solve,
    /// Finite-difference spectrum, compared with any closed-form levels
    Oracle,
    /// Zero-energy beta2/beta1^2 ratios against the known closed forms
    Table1,
    /// Potential and normalized wavefunction samples on the y = arctan x grid
    FigureData,
    /// Solve over a beta1 (and beta3) grid with scaling-law defects
    Scan,
    /// Seeded random consistency checks of the closed forms
    Verify,
    /// Superpose a family of modes into a 2D field wavefunction
    Synth,
    /// Read a JSON report and re-emit it (JSON or CSV)
    Inspect,
}

impl CommandKind {
    pub fn name(&self) -> &'static str {
        match self {
            CommandKind::Solve => "solve",
            CommandKind::Oracle => "oracle",
            CommandKind::Table1 => "table1",
            CommandKind::FigureData => "figure-data",
            CommandKind::Scan => "scan",
            CommandKind::Verify => "verify",
            CommandKind::Synth => "synth",
            CommandKind::Inspect => "inspect",
        }
    }

    /// Option keys the command reads; anything else is rejected.
    fn accepts(&self) -> &'static [&'static str] {
        match self {
            CommandKind::Solve => &["n", "parity", "beta1", "beta2", "beta3", "simultaneous", "bracket", "samples", "format", "out"],
            CommandKind::Oracle => &[
                "n", "parity", "alpha", "beta1", "beta2", "beta3", "bracket", "samples", "grid", "levels", "eigen-count", "tol",
                "format", "out",
            ],
            CommandKind::Table1 => &["beta1", "format", "out"],
            CommandKind::FigureData => &["figure", "points", "format", "out"],
            CommandKind::Scan => &["n", "parity", "beta1-range", "beta3", "beta3-range", "scales", "bracket", "samples", "format", "out"],
            CommandKind::Verify => &["count", "seed", "format", "out"],
            CommandKind::Synth => &[
                "family", "beta3", "beta1-range", "x-range", "y-range", "sampling", "level-set", "format", "out",
            ],
            CommandKind::Inspect => &["report", "format", "out"],
        }
    }
}

impl fmt::Display for CommandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Accepts a TOML string, integer or float and parses its text form.
fn parsed<'de, D, T>(d: D) -> Result<Option<T>, D::Error>
where
    D: Deserializer<'de>,
    T: FromStr<Err = String>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Int(i64),
        Float(f64),
        Text(String),
    }
    let text = match Raw::deserialize(d)? {
        Raw::Int(i) => i.to_string(),
        Raw::Float(v) => v.to_string(),
        Raw::Text(s) => s,
    };
    T::from_str(&text).map(Some).map_err(serde::de::Error::custom)
}

/// Every option; each subcommand reads the subset listed in `accepts`.
#[derive(Debug, Clone, Default, PartialEq, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case", default)]
pub struct Options {
    /// Subcommand, config file only
    #[arg(skip)]
    pub command: Option<CommandKind>,

    /// Polynomial degree N of the closed-form solution
    #[arg(long, global = true)]
    pub n: Option<usize>,

    /// even, odd or both
    #[arg(long, global = true)]
    #[serde(deserialize_with = "parsed")]
    pub parity: Option<ParityChoice>,

    /// Coupling alpha (oracle only; otherwise alpha = -(N+1))
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub alpha: Option<f64>,

    /// Constant term of W(x) = beta1 + beta2 |x| + beta3 x^2 / 2
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub beta1: Option<f64>,

    /// |x| coefficient of W; solved for when omitted
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub beta2: Option<f64>,

    /// x^2 / 2 coefficient of W; must be positive
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub beta3: Option<f64>,

    /// N = 2: pick beta3 so that an even and an odd level share beta2
    #[arg(long, global = true)]
    pub simultaneous: bool,

    /// beta2 scan interval lo:hi
    #[arg(long, global = true, allow_hyphen_values = true)]
    #[serde(deserialize_with = "parsed")]
    pub bracket: Option<Interval>,

    /// beta2 scan samples
    #[arg(long, global = true)]
    pub samples: Option<usize>,

    /// Coarsest oracle grid size
    #[arg(long, global = true)]
    pub grid: Option<usize>,

    /// Oracle refinement levels
    #[arg(long, global = true)]
    pub levels: Option<usize>,

    /// Number of oracle levels to report
    #[arg(long = "eigen-count", global = true)]
    pub eigen_count: Option<usize>,

    /// Tolerance for matching closed-form energies to oracle levels
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Figure number 1-5
    #[arg(long, global = true)]
    #[serde(deserialize_with = "parsed")]
    pub figure: Option<FigureId>,

    /// Samples on the y grid
    #[arg(long, global = true)]
    pub points: Option<usize>,

    /// beta1 samples lo:hi:count
    #[arg(long = "beta1-range", global = true, allow_hyphen_values = true)]
    #[serde(deserialize_with = "parsed")]
    pub beta1_range: Option<Range>,

    /// beta3 samples lo:hi:count
    #[arg(long = "beta3-range", global = true, allow_hyphen_values = true)]
    #[serde(deserialize_with = "parsed")]
    pub beta3_range: Option<Range>,

    /// Comma-separated scale factors t for the scaling check
    #[arg(long, global = true)]
    #[serde(deserialize_with = "parsed")]
    pub scales: Option<Scales>,

    /// Number of random samples
    #[arg(long, global = true)]
    pub count: Option<usize>,

    /// Random seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// n1-even, n2-even-plus, n2-even-minus or n2-odd
    #[arg(long, global = true)]
    #[serde(deserialize_with = "parsed")]
    pub family: Option<Family>,

    /// x samples lo:hi:count
    #[arg(long = "x-range", global = true, allow_hyphen_values = true)]
    #[serde(deserialize_with = "parsed")]
    pub x_range: Option<Range>,

    /// y samples lo:hi:count
    #[arg(long = "y-range", global = true, allow_hyphen_values = true)]
    #[serde(deserialize_with = "parsed")]
    pub y_range: Option<Range>,

    /// direct or conjugate-pair
    #[arg(long, global = true)]
    #[serde(deserialize_with = "parsed")]
    pub sampling: Option<SamplingChoice>,

    /// Keep only modes with |E - target| <= eps, given as target:eps
    #[arg(long = "level-set", global = true, allow_hyphen_values = true)]
    #[serde(deserialize_with = "parsed")]
    pub level_set: Option<LevelSetArg>,

    /// JSON report to read
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,

    /// csv or json
    #[arg(long, global = true)]
    #[serde(deserialize_with = "parsed")]
    pub format: Option<Format>,

    /// Directory for output files; stdout when omitted
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

macro_rules! option_fields {
    ($($field:ident => $key:literal),* $(,)?) => {
        impl Options {
            /// Fills every unset option from `other`.
            pub fn merge(mut self, other: Options) -> Options {
                $(if self.$field.is_none() {
                    self.$field = other.$field;
                })*
                self.simultaneous |= other.simultaneous;
                if self.command.is_none() {
                    self.command = other.command;
                }
                self
            }

            /// Keys of the options that are set.
            pub fn present(&self) -> Vec<&'static str> {
                let mut keys = Vec::new();
                $(if self.$field.is_some() {
                    keys.push($key);
                })*
                if self.simultaneous {
                    keys.push("simultaneous");
                }
                keys
            }
        }
    };
}

option_fields! {
    n => "n", parity => "parity", alpha => "alpha", beta1 => "beta1", beta2 => "beta2", beta3 => "beta3",
    bracket => "bracket", samples => "samples", grid => "grid", levels => "levels", eigen_count => "eigen-count",
    tol => "tol", figure => "figure", points => "points", beta1_range => "beta1-range", beta3_range => "beta3-range",
    scales => "scales", count => "count", seed => "seed", family => "family", x_range => "x-range", y_range => "y-range",
    sampling => "sampling", level_set => "level-set", report => "report", format => "format", out => "out",
}

/// Parses a config file body.
pub fn parse_config(text: &str) -> Result<Options, CliError> {
    toml::from_str(text).map_err(|e| CliError::usage(format!("config file: {}", e.message())))
}

/// A fully resolved invocation: one command and its options.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub options: Options,
}

impl RunConfig {
    pub fn resolve(command: Option<CommandKind>, flags: Options, file: Option<Options>) -> Result<Self, CliError> {
        let file_command = file.as_ref().and_then(|f| f.command);
        let command = match (command, file_command) {
            (Some(a), Some(b)) if a != b => {
                return Err(CliError::usage(format!("command '{a}' conflicts with config command '{b}'")));
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(CliError::usage("no command given")),
        };
        let mut options = match file {
            Some(f) => flags.merge(f),
            None => flags,
        };
        options.command = Some(command);
        let accepted = command.accepts();
        if let Some(bad) = options.present().into_iter().find(|k| !accepted.contains(k)) {
            return Err(CliError::usage(format!("option '{bad}' is not used by '{command}'")));
        }
        Ok(Self { command, options })
    }

    pub fn format(&self) -> Format {
        self.options.format.unwrap_or_default()
    }
}
