//! Command-line front end: configure the pool, run sample files through a
//! mode, check against the oracles and report resources.

pub mod config;
pub mod io;
pub mod pipeline;
pub mod report;
pub mod run;
pub mod spec;
pub mod verify;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use fpda_core::fabric::{account, decode, CmPool, ConfigMode, ResourceReport};
use serde::Serialize;

use crate::config::Config;
use crate::run::RunOptions;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_POOL: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn parse(message: impl Into<String>) -> Self {
        Self { code: EXIT_PARSE, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self { code: EXIT_FAILURE, message: message.into() }
    }

    pub fn from_core(e: fpda_core::Error) -> Self {
        let code = match e {
            fpda_core::Error::PoolExhausted { .. } => EXIT_POOL,
            fpda_core::Error::Parse { .. } => EXIT_PARSE,
            _ => EXIT_FAILURE,
        };
        Self { code, message: e.to_string() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

/// Missing or unreadable input files count as parse failures.
pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Text,
    /// JSON
    Machine,
}

#[derive(Debug, Parser)]
#[command(name = "fpda", version, about = "Reconfigurable DSP array model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct Common {
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    /// TOML settings file
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the modes and their control words
    Modes {
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Run a sample file through one mode
    Run {
        #[arg(long)]
        mode: ConfigMode,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Coefficient file; IIR takes two (forward, feedback)
        #[arg(long)]
        coeffs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Exit with code 4 when the oracle error exceeds the mode's tolerance
        #[arg(long)]
        verify: bool,
        /// Draw a random input instead of reading --in
        #[arg(long)]
        seed: Option<u64>,
        /// DCT input is 16x16 blocks, transformed in two dimensions
        #[arg(long = "2d")]
        blocks: bool,
        /// Leave the elapsed time out of the report
        #[arg(long)]
        no_timing: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Resource census against the reference counts
    Resources {
        /// All modes when omitted
        #[arg(long)]
        mode: Option<ConfigMode>,
        #[arg(long)]
        coeffs: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Randomized fabric, kernel and oracle checks for every mode
    VerifyAll {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        streams: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Export the configured netlist
    Netlist {
        #[arg(long)]
        mode: ConfigMode,
        #[arg(long)]
        coeffs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Debug, Serialize)]
struct ModeLine {
    mode: ConfigMode,
    control_word: String,
}

pub fn modes(format: OutputFormat) -> String {
    let lines: Vec<ModeLine> = ConfigMode::ALL
        .iter()
        .map(|&mode| ModeLine { mode, control_word: decode(mode).to_string() })
        .collect();
    match format {
        OutputFormat::Text => lines.iter().fold(String::new(), |mut s, l| {
            let _ = writeln!(s, "{:<4} {}", l.mode.to_string(), l.control_word);
            s
        }),
        OutputFormat::Machine => serde_json::to_string_pretty(&lines).expect("serializes") + "\n",
    }
}

/// Configures `mode` with default coefficients and accounts its netlist.
pub fn resources(mode: ConfigMode, config: &Config) -> Result<ResourceReport, CliError> {
    resources_with(mode, &[], config)
}

pub fn resources_with(mode: ConfigMode, coeffs: &[PathBuf], config: &Config) -> Result<ResourceReport, CliError> {
    let spec = spec::function_spec(mode, coeffs, config)?;
    let mut pool = CmPool::with_capacity(config.pool.capacity());
    let net = pool.configure(&spec).map_err(CliError::from_core)?;
    Ok(account(&net))
}

fn render_reports(reports: &[ResourceReport], format: OutputFormat) -> String {
    match format {
        OutputFormat::Text => reports.iter().map(ResourceReport::render_text).collect::<Vec<_>>().join("\n"),
        OutputFormat::Machine => {
            let json = if reports.len() == 1 {
                serde_json::to_string_pretty(&reports[0])
            } else {
                serde_json::to_string_pretty(reports)
            };
            json.expect("serializes") + "\n"
        }
    }
}

/// Runs one command, writing its report to `stdout`. Returns the exit code.
pub fn dispatch(cli: Cli, stdout: &mut dyn std::io::Write) -> Result<i32, CliError> {
    let emit = |stdout: &mut dyn std::io::Write, text: &str| {
        stdout.write_all(text.as_bytes()).map_err(|e| CliError::io(e.to_string()))
    };
    match cli.command {
        Command::Modes { format } => {
            emit(stdout, &modes(format))?;
            Ok(EXIT_OK)
        }
        Command::Run { mode, input, coeffs, out, verify, seed, blocks, no_timing, common } => {
            let opts = RunOptions {
                mode,
                input,
                coeffs,
                seed,
                config: Config::load(common.config.as_deref())?,
                blocks,
                timing: !no_timing,
            };
            let outcome = run::run(&opts)?;
            let failed = verify && !outcome.report.within_tolerance;
            if !failed {
                io::write_atomic(&out, &outcome.output)?;
            }
            let text = match common.format {
                OutputFormat::Text => outcome.report.render_text(),
                OutputFormat::Machine => outcome.report.render_machine(),
            };
            emit(stdout, &text)?;
            Ok(if failed { EXIT_VERIFY } else { EXIT_OK })
        }
        Command::Resources { mode, coeffs, common } => {
            let config = Config::load(common.config.as_deref())?;
            let reports = match mode {
                Some(m) => vec![resources_with(m, &coeffs, &config)?],
                None => ConfigMode::ALL.iter().map(|&m| resources(m, &config)).collect::<Result<_, _>>()?,
            };
            emit(stdout, &render_reports(&reports, common.format))?;
            Ok(EXIT_OK)
        }
        Command::VerifyAll { seed, streams, format } => {
            let rows = verify::verify_all(streams, seed);
            let ok = rows.iter().all(|r| r.checks.iter().all(verify::CheckOutcome::passed));
            let text = match format {
                OutputFormat::Text => verify::render_matrix(&rows),
                OutputFormat::Machine => serde_json::to_string_pretty(&rows).expect("serializes") + "\n",
            };
            emit(stdout, &text)?;
            Ok(if ok { EXIT_OK } else { EXIT_VERIFY })
        }
        Command::Netlist { mode, coeffs, out, config } => {
            let config = Config::load(config.as_deref())?;
            let spec = spec::function_spec(mode, &coeffs, &config)?;
            let mut pool = CmPool::with_capacity(config.pool.capacity());
            let text = pool.configure(&spec).map_err(CliError::from_core)?.export_text();
            match out {
                Some(p) => io::write_atomic(&p, &text)?,
                None => emit(stdout, &text)?,
            }
            Ok(EXIT_OK)
        }
    }
}
