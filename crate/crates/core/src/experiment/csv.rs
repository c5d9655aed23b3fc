//! CSV output. Comma separated, `.` decimals, `\n` line endings, one header
//! row. Lines starting with `#` carry run metadata (seed, RNG, parameters).

use std::io::{self, Write};

use super::{ExperimentConfig, StopDistribution, SweepRow};
use crate::sim::RNG_ALGORITHM;

pub const SWEEP_COLUMNS: [&str; 8] =
    ["estimator", "R", "mean_p_hat", "mean_n_hat", "mse_n", "mean_p_m", "trials", "seed"];

/// Appended after [`SWEEP_COLUMNS`] in every sweep; the last two only for
/// correlated runs.
pub const SWEEP_EXTRA_COLUMNS: [&str; 4] = ["p", "rho", "mean_distinct", "session_error_rate"];

pub const STOP_COLUMNS: [&str; 12] = [
    "estimator",
    "p",
    "rho",
    "trial",
    "seed",
    "stop_r",
    "criterion_r",
    "cap_reached",
    "missed_tags",
    "final_p_hat",
    "final_p_m",
    "threshold",
];

fn write_metadata(out: &mut impl Write, command: &str, config: &ExperimentConfig) -> io::Result<()> {
    let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";");
    let estimators: Vec<&str> = config.estimators.iter().map(|e| e.name()).collect();
    writeln!(out, "# missing-tags {command}")?;
    writeln!(out, "# seed={} rng={RNG_ALGORITHM} trial_seed=seed+trial_index", config.seed)?;
    writeln!(
        out,
        "# n={} p={} rho={} estimators={} r_min={} r_max={} trials={}",
        config.n_tags,
        list(&config.ps),
        list(&config.rhos),
        estimators.join(";"),
        config.r_min,
        config.r_max,
        config.trials
    )?;
    let pol = &config.policy;
    writeln!(
        out,
        "# threshold={} margin={} bias={} min_sessions={} max_sessions={}",
        pol.threshold, pol.margin_sessions, pol.bias_addend, pol.min_sessions, pol.max_sessions
    )
}

/// Write sweep rows. `correlated` adds the distinct-count and per-session
/// error-rate columns.
pub fn write_sweep_csv(
    mut out: impl Write,
    command: &str,
    config: &ExperimentConfig,
    rows: &[SweepRow],
    correlated: bool,
) -> io::Result<()> {
    write_metadata(&mut out, command, config)?;
    let extra = if correlated { &SWEEP_EXTRA_COLUMNS[..] } else { &SWEEP_EXTRA_COLUMNS[..2] };
    let header: Vec<&str> = SWEEP_COLUMNS.iter().chain(extra).copied().collect();
    writeln!(out, "{}", header.join(","))?;
    for r in rows {
        write!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.estimator, r.sessions, r.mean_p_hat, r.mean_n_hat, r.mse_n, r.mean_p_m, r.trials, r.seed, r.p, r.rho
        )?;
        if correlated {
            write!(out, ",{},{}", r.mean_distinct, r.session_error_rate)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Per-trial stop rows, followed by one `# summary` line per distribution.
pub fn write_stop_csv(mut out: impl Write, config: &ExperimentConfig, dists: &[StopDistribution]) -> io::Result<()> {
    write_metadata(&mut out, "stop", config)?;
    writeln!(out, "{}", STOP_COLUMNS.join(","))?;
    for d in dists {
        for t in &d.trials {
            let criterion = t.outcome.criterion_met_at().map(|r| r.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                d.estimator,
                d.p,
                d.rho,
                t.trial,
                t.seed,
                t.outcome.stopped_at(),
                criterion,
                u8::from(t.outcome.cap_reached()),
                t.missed_tags,
                t.final_p_hat,
                t.final_p_m_hat,
                config.policy.threshold
            )?;
        }
    }
    for d in dists {
        writeln!(
            out,
            "# summary estimator={} p={} rho={} trials={} median_stop_r={} mean_stop_r={} miss_rate={} cap_rate={}",
            d.estimator,
            d.p,
            d.rho,
            d.trials.len(),
            d.median_stop(),
            d.mean_stop(),
            d.miss_rate(),
            d.cap_rate()
        )?;
    }
    Ok(())
}
