//! Command-line front end for the `polymass` library.
//!
//! Every subcommand writes one table, as CSV or as a JSON object with a
//! `rows` array. Exit status: 0 success, 1 verification failure,
//! 2 configuration or validation error, 3 numerical error.

pub mod args;
pub mod commands;
pub mod error;
pub mod table;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};

use clap::Parser;

use args::{Cli, Command};
use commands::RunConfig;
pub use error::{CliError, ExitCode};
use table::Table;

enum Outcome {
    Done(Table),
    Failed(Table, Vec<String>),
}

fn dispatch(cli: &Cli, config: &RunConfig) -> Result<Outcome, CliError> {
    Ok(match &cli.command {
        Command::Catalog => Outcome::Done(commands::cmd_catalog(config)?),
        Command::Mass { field, geometry, method } => {
            Outcome::Done(commands::cmd_mass(config, field, geometry, *method)?)
        }
        Command::Converge { field, geometry, scales } => {
            Outcome::Done(commands::cmd_converge(config, field, geometry, scales)?)
        }
        Command::Verify { field, corrupt_derivative } => {
            let (table, failed) = commands::cmd_verify(config, field, *corrupt_derivative)?;
            if failed.is_empty() {
                Outcome::Done(table)
            } else {
                Outcome::Failed(table, failed)
            }
        }
        Command::Slice {
            field,
            half_width,
            axis,
            integrate,
            t_nodes,
            ..
        } => Outcome::Done(commands::cmd_slice(config, field, *half_width, axis, *integrate, *t_nodes)?),
    })
}

fn emit(cli: &Cli, table: &Table, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.global.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write(cli.global.format, &mut w)?;
            w.flush()?;
        }
        None => table.write(cli.global.format, stdout)?,
    }
    Ok(())
}

fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<ExitCode, CliError> {
    let config = RunConfig::from_args(&cli.global)?;
    let outcome = match cli.global.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?
            .install(|| dispatch(cli, &config))?,
        None => dispatch(cli, &config)?,
    };
    match outcome {
        Outcome::Done(table) => {
            emit(cli, &table, stdout)?;
            Ok(ExitCode::Success)
        }
        Outcome::Failed(table, failed) => {
            emit(cli, &table, stdout)?;
            writeln!(stderr, "verification failed: {}", failed.join(", "))?;
            Ok(ExitCode::VerifyFailed)
        }
    }
}

/// Parses `args` (program name first) and runs one subcommand.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> ExitCode
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = write!(stderr, "{e}");
            return ExitCode::Validation;
        }
        Err(e) => {
            let _ = write!(stdout, "{e}");
            return ExitCode::Success;
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
