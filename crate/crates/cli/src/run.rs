use std::path::PathBuf;
use std::time::Instant;

use fpda_core::fabric::{account, CmPool, ConfigMode};
use fpda_core::oracle::max_error_lsb;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::Config;
use crate::io::{parse_input, random_input, render_output};
use crate::pipeline::{self, Input};
use crate::report::RunReport;
use crate::spec::function_spec;
use crate::{read_file, CliError};

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub mode: ConfigMode,
    /// Sample file; when absent a random input is drawn from `seed`.
    pub input: Option<PathBuf>,
    pub coeffs: Vec<PathBuf>,
    pub seed: Option<u64>,
    pub config: Config,
    /// Treat DCT input as 16x16 blocks.
    pub blocks: bool,
    pub timing: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: RunReport,
    pub output: String,
}

/// Configures a pool, pushes the input through it and compares the result
/// with the oracle.
pub fn run(opts: &RunOptions) -> Result<RunOutcome, CliError> {
    let start = Instant::now();
    let spec = function_spec(opts.mode, &opts.coeffs, &opts.config)?;
    if opts.blocks && opts.mode != ConfigMode::Dct {
        return Err(CliError::parse("--2d applies to dct only"));
    }
    let format = spec.input_format();
    let input = match (&opts.input, opts.seed) {
        (Some(path), _) => parse_input(opts.mode, &read_file(path)?, format, opts.blocks)
            .map_err(|e| CliError::parse(format!("{}: {}", path.display(), e.message)))?,
        (None, Some(seed)) => random_input(opts.mode, format, opts.blocks, &mut ChaCha8Rng::seed_from_u64(seed)),
        (None, None) => return Err(CliError::parse("run needs --in or --seed")),
    };

    let mut pool = CmPool::with_capacity(opts.config.pool.capacity());
    let net = pool.configure(&spec).map_err(CliError::from_core)?;
    let (y, saturations, engine) = match input {
        Input::Blocks(_) => (pipeline::kernel(&spec, &input).map_err(CliError::from_core)?, 0, "kernel"),
        _ => {
            let (y, s) = pipeline::fabric(&net, &spec, &input).map_err(CliError::from_core)?;
            (y, s, "fabric")
        }
    };
    let reference = pipeline::oracle(&spec, &input).map_err(CliError::from_core)?;
    let actual: Vec<f64> = y.iter().map(|v| v.value()).collect();
    let lsb = pipeline::output_format(&net, &input).lsb();
    let max_error = if actual.is_empty() { 0.0 } else { max_error_lsb(&reference, &actual, lsb) };
    let tolerance = pipeline::tolerance_for(opts.mode, &input);
    let control_word = pool.control_word().to_string();
    pool.release().map_err(CliError::from_core)?;

    let samples_out = match input {
        Input::Frames(_) => y.len() / 2,
        _ => y.len(),
    };
    let report = RunReport {
        mode: opts.mode,
        control_word,
        engine: engine.into(),
        samples_in: input.len(),
        samples_out,
        max_error_lsb: max_error,
        tolerance_lsb: tolerance,
        within_tolerance: max_error <= tolerance,
        saturations,
        resources: account(&net),
        elapsed_ms: opts.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    };
    Ok(RunOutcome {
        output: render_output(&input, &y),
        report,
    })
}
