//! `missing-tags`: run estimator experiments and write CSV series.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid configuration
//! (including an unwritable output path).

mod commands;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use missing_tags::experiment::Command;
use missing_tags::Estimator;

use settings::{Settings, ENV_PREFIX};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("verification failed")]
    Verification,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification => 1,
            CliError::Config(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "missing-tags", version, about = "Missing-tag estimation experiments")]
#[command(after_help = "Settings apply in increasing precedence: --preset, --config file, \
MISSING_TAGS_<KEY> environment variables (e.g. MISSING_TAGS_TRIALS=100, MISSING_TAGS_CONFIG=path), flags.")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Sweep R with independent sessions; one CSV row per estimator, p and R.
    Simulate(RunArgs),
    /// Sweep R with Markov-correlated sessions (needs rho > 0).
    Correlated(RunArgs),
    /// Sequential stopping runs; one CSV row per trial plus summary lines.
    Stop(RunArgs),
    /// Check the two-session estimator against exhaustive enumeration.
    Verify,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Named setup: fig2..fig7, stop-p01, stop-p02, stop-corr.
    #[arg(long)]
    preset: Option<String>,
    /// Plain `key = value` file using the flag names as keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of tags.
    #[arg(long)]
    n: Option<usize>,
    /// Per-session read-error probability; repeat or comma-separate to sweep.
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    /// Correlation coefficient between consecutive sessions.
    #[arg(long, value_delimiter = ',')]
    rho: Vec<f64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Base seed; trial i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    /// two-session, rme, regm or schnabel; repeatable.
    #[arg(long, value_delimiter = ',')]
    estimator: Vec<Estimator>,
    #[arg(long)]
    r_min: Option<usize>,
    #[arg(long)]
    r_max: Option<usize>,
    /// Stop once the estimated missing probability is at or below this.
    #[arg(long)]
    threshold: Option<f64>,
    /// Extra sessions after the threshold is met.
    #[arg(long)]
    margin: Option<usize>,
    /// Added to the missing probability before the threshold comparison.
    #[arg(long)]
    bias: Option<f64>,
    #[arg(long)]
    min_sessions: Option<usize>,
    #[arg(long)]
    max_sessions: Option<usize>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn non_empty<T>(v: Vec<T>) -> Option<Vec<T>> {
    (!v.is_empty()).then_some(v)
}

impl RunArgs {
    fn flag_settings(&self) -> Settings {
        Settings {
            preset: self.preset.clone(),
            n: self.n,
            p: non_empty(self.p.clone()),
            rho: non_empty(self.rho.clone()),
            trials: self.trials,
            seed: self.seed,
            estimator: non_empty(self.estimator.clone()),
            r_min: self.r_min,
            r_max: self.r_max,
            threshold: self.threshold,
            margin: self.margin,
            bias: self.bias,
            min_sessions: self.min_sessions,
            max_sessions: self.max_sessions,
            out: self.out.clone(),
        }
    }

    fn settings(&self) -> Result<Settings, CliError> {
        let env_config = std::env::var_os(format!("{ENV_PREFIX}CONFIG")).map(PathBuf::from);
        let file = match self.config.clone().or(env_config) {
            Some(path) => Settings::load_file(&path)?,
            None => Settings::default(),
        };
        let env = Settings::from_env(std::env::vars())?;
        Ok(file.overlay(env).overlay(self.flag_settings()))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (command, args) = match cli.command {
        Sub::Verify => {
            let passed =
                commands::run_verify(std::io::stdout().lock()).map_err(|e| CliError::Config(format!("stdout: {e}")))?;
            return if passed { Ok(()) } else { Err(CliError::Verification) };
        }
        Sub::Simulate(a) => (Command::Simulate, a),
        Sub::Correlated(a) => (Command::Correlated, a),
        Sub::Stop(a) => (Command::Stop, a),
    };
    let settings = args.settings()?;
    let config = settings.resolve(command)?;
    let out = settings.out.as_deref();
    match command {
        Command::Stop => commands::run_stop(&config, out),
        Command::Simulate | Command::Correlated => commands::run_sweep(command, &config, out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("missing-tags: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
