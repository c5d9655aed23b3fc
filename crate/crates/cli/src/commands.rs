use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use missing_tags::estimators::two_session_bias;
use missing_tags::experiment::{
    stop_distributions, sweep, write_stop_csv, write_sweep_csv, Command, ExperimentConfig, StopDistribution, SweepRow,
};
use missing_tags::oracle::{probability_grid, sweep_expected_n, sweep_expected_p, MAX_ENUMERATED_TAGS};

use crate::CliError;

const EXPECTED_P_TOLERANCE: f64 = 1e-12;
const EXPECTED_N_TOLERANCE: f64 = 1e-9;
const BIAS_TAGS: f64 = 46.0;
const BIAS_P: f64 = 0.9;
const BIAS_LIMIT: f64 = 0.01;

/// Open the destination before any work so a bad path fails fast.
fn open_output(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match out {
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| CliError::Config(format!("out: cannot write {}: {e}", path.display())))?;
            Ok(Box::new(BufWriter::new(file)))
        }
    }
}

fn write_failed(e: io::Error) -> CliError {
    CliError::Config(format!("out: write failed: {e}"))
}

pub fn run_sweep(command: Command, config: &ExperimentConfig, out: Option<&Path>) -> Result<(), CliError> {
    let mut sink = open_output(out)?;
    let start = Instant::now();
    let rows = sweep(config).map_err(|e| CliError::Config(e.to_string()))?;
    write_sweep_csv(&mut sink, command.name(), config, &rows, command == Command::Correlated)
        .and_then(|()| sink.flush())
        .map_err(write_failed)?;
    summarize_sweep(config, &rows, start.elapsed().as_secs_f64());
    Ok(())
}

fn summarize_sweep(config: &ExperimentConfig, rows: &[SweepRow], seconds: f64) {
    eprintln!(
        "{} rows, N={}, {} trials each, seed {} ({seconds:.1}s)",
        rows.len(),
        config.n_tags,
        config.trials,
        config.seed
    );
    eprintln!(
        "{:<11} {:>5} {:>5} {:>3} {:>10} {:>10} {:>12} {:>11}",
        "estimator", "p", "rho", "R", "mean p", "mean N", "MSE(N)", "mean p_M"
    );
    for r in rows {
        eprintln!(
            "{:<11} {:>5} {:>5} {:>3} {:>10.4} {:>10.2} {:>12.3} {:>11.3e}",
            r.estimator.name(),
            r.p,
            r.rho,
            r.sessions,
            r.mean_p_hat,
            r.mean_n_hat,
            r.mse_n,
            r.mean_p_m
        );
    }
}

pub fn run_stop(config: &ExperimentConfig, out: Option<&Path>) -> Result<(), CliError> {
    let mut sink = open_output(out)?;
    let start = Instant::now();
    let dists = stop_distributions(config).map_err(|e| CliError::Config(e.to_string()))?;
    write_stop_csv(&mut sink, config, &dists).and_then(|()| sink.flush()).map_err(write_failed)?;
    summarize_stop(config, &dists, start.elapsed().as_secs_f64());
    Ok(())
}

fn summarize_stop(config: &ExperimentConfig, dists: &[StopDistribution], seconds: f64) {
    eprintln!(
        "N={}, threshold {:e}, margin {}, {} trials each, seed {} ({seconds:.1}s)",
        config.n_tags, config.policy.threshold, config.policy.margin_sessions, config.trials, config.seed
    );
    for d in dists {
        eprintln!(
            "{} p={} rho={}: median stop R {}, mean {:.2}, miss rate {:.4}, cap rate {:.4}",
            d.estimator.name(),
            d.p,
            d.rho,
            d.median_stop(),
            d.mean_stop(),
            d.miss_rate(),
            d.cap_rate()
        );
        let hist = d.histogram(config.policy.max_sessions);
        let cells: Vec<String> =
            hist.iter().enumerate().filter(|(_, &c)| c > 0).map(|(r, c)| format!("R={r}:{c}")).collect();
        eprintln!("  stop R counts {}", cells.join(" "));
    }
}

/// Returns whether every check passed.
pub fn run_verify(mut out: impl Write) -> io::Result<bool> {
    let grid = probability_grid();
    let mut all = true;
    let mut report = |name: &str, value: f64, limit: f64, detail: String| -> io::Result<()> {
        let pass = value <= limit;
        all &= pass;
        let status = if pass { "PASS" } else { "FAIL" };
        writeln!(out, "{name} <= {limit:e}: {status} ({detail})")
    };
    match sweep_expected_p(MAX_ENUMERATED_TAGS, &grid) {
        Ok(s) => report(
            "lemma1 max |Δ|",
            s.max_deviation,
            EXPECTED_P_TOLERANCE,
            format!(
                "max |Δ| = {:.3e} at N={}, p={}; N=1..{MAX_ENUMERATED_TAGS}, {} p values",
                s.max_deviation,
                s.worst_n,
                s.worst_p,
                grid.len()
            ),
        )?,
        Err(e) => report("lemma1 max |Δ|", f64::INFINITY, EXPECTED_P_TOLERANCE, e.to_string())?,
    }
    match sweep_expected_n(MAX_ENUMERATED_TAGS, &grid) {
        Ok(s) => report(
            "lemma2 max |Δ|",
            s.max_deviation,
            EXPECTED_N_TOLERANCE,
            format!("max |E[N_hat] - N| = {:.3e} at N={}, p={}", s.max_deviation, s.worst_n, s.worst_p),
        )?,
        Err(e) => report("lemma2 max |Δ|", f64::INFINITY, EXPECTED_N_TOLERANCE, e.to_string())?,
    }
    let bias = two_session_bias(BIAS_TAGS, BIAS_P);
    report(
        &format!("two-session bias at N={BIAS_TAGS}, p={BIAS_P}"),
        bias,
        BIAS_LIMIT,
        format!(
            "E[p_hat] - p = {bias:.5}; N={} gives {:.5}",
            BIAS_TAGS - 1.0,
            two_session_bias(BIAS_TAGS - 1.0, BIAS_P)
        ),
    )?;
    Ok(all)
}
