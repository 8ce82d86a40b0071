//! Command-line front end for `quartic-core`: solve QES problems, run the
//! finite-difference oracle, regenerate the zero-energy table and figure
//! data, run parameter scans and synthesize field wavefunctions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod values;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;

pub use commands::{run, DataFile, Outcome};
pub use config::{parse_config, CommandKind, Options, RunConfig};
pub use error::{CliError, Exit};
pub use report::{Cell, Record, Report, ReportError};
pub use values::Format;

#[derive(Debug, Parser)]
#[command(name = "quartic", version, about = "Quasi-exactly-solvable quartic oscillator toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<CommandKind>,

    /// TOML file with one key per flag (and optionally `command`)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(flatten)]
    pub options: Options,
}

/// Resolves flags and the optional config file into a run configuration.
pub fn resolve(cli: Cli) -> Result<RunConfig, CliError> {
    let file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
            Some(parse_config(&text)?)
        }
        None => None,
    };
    RunConfig::resolve(cli.command, cli.options, file)
}

/// Writes the outcome to `out` (one file per artifact) or to `stdout`.
///
/// Without `--out`, CSV format prints the data table when there is one and
/// the solutions table otherwise; JSON prints the report.
pub fn emit(outcome: &Outcome, name: &str, format: Format, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let report_text = match format {
        Format::Csv => outcome.report.to_csv(),
        Format::Json => outcome.report.to_json(),
    };
    match out {
        None => {
            let text = match (format, &outcome.data) {
                (Format::Csv, Some(data)) => &data.csv,
                _ => &report_text,
            };
            stdout.write_all(text.as_bytes())?;
        }
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| CliError::usage(format!("cannot create {}: {e}", dir.display())))?;
            let mut files = vec![(format!("{name}.{}", format.extension()), &report_text)];
            if let Some(data) = &outcome.data {
                files.push((data.name.clone(), &data.csv));
            }
            for (file, text) in files {
                let path = dir.join(file);
                std::fs::write(&path, text).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?;
                writeln!(stdout, "{}", path.display())?;
            }
        }
    }
    Ok(())
}

/// Full invocation; returns the process exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { Exit::Usage.code() } else { Exit::Success.code() };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = resolve(cli).and_then(|rc| {
        let outcome = run(&rc)?;
        emit(&outcome, rc.command.name(), rc.format(), rc.options.out.as_deref(), stdout)?;
        Ok(outcome)
    });
    match result {
        Ok(outcome) => {
            for m in &outcome.messages {
                let _ = writeln!(stderr, "{m}");
            }
            outcome.exit.code()
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit.code()
        }
    }
}
