// Copyright 2026 The ddr Authors
// SPDX-License-Identifier: Apache-2.0

//! The `ddr` command line. Exit codes: 0 success, 1 failed validation,
//! 2 usage or config error, 3 computation failure.

mod commands;
mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::coherent::CoherentError;
use crate::response::{MethodSelection, ResponseError};

pub use commands::{
    cmd_dressed, cmd_features, cmd_scan, cmd_threshold, cmd_validate, default_grid,
    default_threshold_grid, format_number, validation_report, Check, CheckStatus, ValidationReport,
    CSV_HEADER,
};
pub use config::{ConfigError, RawConfig, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    ValidationFailed = 1,
    Usage = 2,
    Computation = 3,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Compute(ResponseError),
    #[error(transparent)]
    Coherent(CoherentError),
    #[error("cannot write output: {0}")]
    Output(#[source] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) | CliError::Output(_) => ExitCode::Usage,
            CliError::Compute(_) | CliError::Coherent(_) => ExitCode::Computation,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "ddr",
    version,
    about = "Double-dark-resonance spectra and features"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Susceptibility spectrum as CSV.
    Scan {
        #[arg(long)]
        config: PathBuf,
        /// Defaults to the config's `output`, then stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// analytic, numeric or both.
        #[arg(long)]
        method: Option<MethodSelection>,
    },
    /// Exact and perturbative dressed states as JSON.
    Dressed {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        allow_degenerate: bool,
    },
    /// Transparency points, interference feature and scan zeros as JSON.
    Features {
        #[arg(long)]
        config: PathBuf,
    },
    /// Closed-form and bisected gain threshold as JSON.
    Threshold {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        r_min: f64,
        #[arg(long)]
        r_max: f64,
    },
    /// Run the consistency checks and print a report.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

/// Parses `args` (program name first) and runs the command, writing results to `out`.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::Usage
            } else {
                ExitCode::Success
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<ExitCode, CliError> {
    match command {
        Command::Scan {
            config,
            out: path,
            method,
        } => {
            let config = RunConfig::load(&config)?;
            match path.or_else(|| config.output.clone()) {
                Some(path) => {
                    let file = File::create(&path).map_err(CliError::Output)?;
                    let mut writer = BufWriter::new(file);
                    let code = cmd_scan(&config, method, &mut writer);
                    writer.flush().map_err(CliError::Output)?;
                    code
                }
                None => cmd_scan(&config, method, out),
            }
        }
        Command::Dressed {
            config,
            allow_degenerate,
        } => cmd_dressed(&RunConfig::load(&config)?, allow_degenerate, out),
        Command::Features { config } => cmd_features(&RunConfig::load(&config)?, out),
        Command::Threshold {
            config,
            r_min,
            r_max,
        } => cmd_threshold(&RunConfig::load(&config)?, r_min, r_max, out),
        Command::Validate { config } => cmd_validate(&RawConfig::load(&config)?, out),
    }
}
