//! Command-line front end: argument parsing, configuration merging and report
//! emission. [`run`] is the whole program; `main` only forwards its exit code.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod report;

use commands::Outcome;
use config::{load_config, Format, RunConfig};
use report::{emit, ReportEnvelope, Verdict};

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "DALEMBERT_CONFIG";

const AFTER_HELP: &str = "\
Tolerance defaults: residual=1e-9 consistency=1e-6 gate=1e-9 conservation=1e-7 c_min=1e-6 convergence=0.95.
Precedence: built-in defaults, then the config file, then command-line flags.

Expressions use + - * / ^, unary minus, exp log sin cos, numeric literals and
the variables x, y, z, w (or x1 .. xn). Grammar version 1.

Exit status: 0 when the verdict is pass, 1 when it is fail, 2 on usage or input errors.";

#[derive(Debug, Parser)]
#[command(name = "dalembert", version, about = "Verification toolkit for the n-d'Alembert equation", after_help = AFTER_HELP)]
pub struct Cli {
    /// JSON config file (keys: tolerances, seed, format, output, bordism_coefficients).
    #[arg(long, global = true, env = CONFIG_ENV, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Report format. Each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Seed for every random draw (default 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Override one tolerance, e.g. `--tolerance residual=1e-8`. Repeatable.
    #[arg(long = "tolerance", global = true, value_name = "NAME=VALUE", value_parser = parse_tolerance)]
    pub tolerances: Vec<(String, f64)>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimension counts of the n-th equation and the Whitney embedding check.
    Dims(commands::DimsArgs),
    /// Evaluate both residual forms of a field at sample points.
    VerifySolution(commands::VerifyArgs),
    /// Integrate the characteristic flow of the two-dimensional closed form.
    Characteristics(commands::CharacteristicsArgs),
    /// Average-power stability report of a perturbation of the closed form.
    StabilityReport(commands::StabilityArgs),
    /// Check that a conservation form is closed on a solution.
    ConservationCheck(commands::ConservationArgs),
    /// Integral bordism group of a manifold with its classification flags.
    Bordism(commands::BordismArgs),
    /// Sample points of a Brieskorn sphere by Gauss-Newton projection.
    BrieskornSample(commands::BrieskornArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Dims(_) => "dims",
            Command::VerifySolution(_) => "verify-solution",
            Command::Characteristics(_) => "characteristics",
            Command::StabilityReport(_) => "stability-report",
            Command::ConservationCheck(_) => "conservation-check",
            Command::Bordism(_) => "bordism",
            Command::BrieskornSample(_) => "brieskorn-sample",
        }
    }
}

fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("bad value for `{}`: {e}", k.trim()))?;
    Ok((k.trim().to_string(), v))
}

/// Failure classes that map to exit status 2.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error("{0:#}")]
    Input(#[from] anyhow::Error),
}

/// Builds the effective configuration: defaults, then the config file, then flags.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, config::ConfigError> {
    let mut cfg = match &cli.config {
        Some(p) => load_config(p)?,
        None => RunConfig::default(),
    };
    for (k, v) in &cli.tolerances {
        cfg.set_tolerance(k, *v)?;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.format.is_some() {
        cfg.format = cli.format;
    }
    if cli.output.is_some() {
        cfg.output = cli.output.clone();
    }
    Ok(cfg)
}

/// Runs one command and returns the process exit status.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let echo: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(&cli, &echo) {
        Ok(Verdict::Pass) => 0,
        Ok(Verdict::Fail) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn execute(cli: &Cli, echo: &[String]) -> Result<Verdict, RunError> {
    let cfg = resolve_config(cli)?;
    let outcome: Outcome = match &cli.command {
        Command::Dims(a) => commands::dims(a),
        Command::VerifySolution(a) => commands::verify_solution(a, &cfg),
        Command::Characteristics(a) => commands::characteristics(a, &cfg),
        Command::StabilityReport(a) => commands::stability_report(a, &cfg),
        Command::ConservationCheck(a) => commands::conservation_check(a, &cfg),
        Command::Bordism(a) => commands::bordism(a, &cfg),
        Command::BrieskornSample(a) => commands::brieskorn_sample(a, &cfg),
    }?;
    let format = cfg.format.unwrap_or(outcome.default_format);
    let text = match format {
        Format::Json => ReportEnvelope::new(echo, &cfg, outcome.payload, outcome.verdict).to_json(),
        Format::Csv => outcome
            .csv
            .ok_or_else(|| anyhow::anyhow!("`{}` has no csv output; use --format json", cli.command.name()))?,
    };
    emit(&text, cfg.output.as_deref())?;
    Ok(outcome.verdict)
}
