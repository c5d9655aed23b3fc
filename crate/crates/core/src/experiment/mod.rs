//! Seeded Monte Carlo experiments: estimator sweeps over the number of
//! sessions and distributions of the stopping session.
//!
//! Trial `i` of a run with base seed `s` draws its population from seed
//! `s + i` (wrapping). Trials may run in parallel; results are always reduced
//! in trial order, so output is identical for a given seed.

mod csv;
mod preset;

pub use csv::{write_stop_csv, write_sweep_csv, STOP_COLUMNS, SWEEP_COLUMNS, SWEEP_EXTRA_COLUMNS};
pub use preset::{preset, Command, PRESET_NAMES};

use crate::controller::{run_sequential, StopOutcome, StopPolicy};
use crate::error::{check_probability, Error, Result};
use crate::estimators::{p_missing, EstimateReport, Estimator};
use crate::sim::{derive_correlation, CorrelatedSource, IndependentSource, PopulationParams, SessionSource, Tallier};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n_tags: usize,
    /// Every error probability is run as its own block.
    pub ps: Vec<f64>,
    /// Correlation coefficients; 0 means independent sessions.
    pub rhos: Vec<f64>,
    pub estimators: Vec<Estimator>,
    pub r_min: usize,
    pub r_max: usize,
    pub trials: usize,
    pub seed: u64,
    pub policy: StopPolicy,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_tags: 500,
            ps: vec![0.2],
            rhos: vec![0.0],
            estimators: vec![Estimator::Regm, Estimator::Schnabel],
            r_min: 2,
            r_max: 12,
            trials: 1000,
            seed: 1,
            policy: StopPolicy::default(),
        }
    }
}

fn invalid(name: &'static str, message: impl Into<String>) -> Error {
    Error::OutOfRange { name, message: message.into() }
}

impl ExperimentConfig {
    /// Checks shared by every command.
    pub fn validate(&self) -> Result<()> {
        if self.n_tags == 0 {
            return Err(invalid("n", "need at least one tag"));
        }
        if self.trials == 0 {
            return Err(invalid("trials", "need at least one trial"));
        }
        if self.ps.is_empty() {
            return Err(invalid("p", "no error probability given"));
        }
        if self.rhos.is_empty() {
            return Err(invalid("rho", "no correlation coefficient given"));
        }
        if self.estimators.is_empty() {
            return Err(invalid("estimator", "no estimator given"));
        }
        for &p in &self.ps {
            check_probability("p", p)?;
        }
        for &rho in &self.rhos {
            if !(0.0..=1.0).contains(&rho) {
                return Err(invalid("rho", format!("{rho} is not in [0, 1]")));
            }
            if rho > 0.0 && self.ps.iter().any(|&p| p >= 1.0) {
                return Err(invalid("p", "correlated sessions need p < 1"));
            }
        }
        self.policy.validate()
    }

    /// Session range of a sweep; not used by sequential runs.
    fn validate_range(&self) -> Result<()> {
        if self.r_min < 2 || self.r_min > self.r_max || self.r_max > self.policy.max_sessions {
            return Err(invalid(
                "r-min/r-max",
                format!("range {}..={} must lie within 2..={}", self.r_min, self.r_max, self.policy.max_sessions),
            ));
        }
        Ok(())
    }

    pub fn validate_for(&self, command: Command) -> Result<()> {
        self.validate()?;
        if command != Command::Stop {
            self.validate_range()?;
        }
        match command {
            Command::Simulate if self.rhos.iter().any(|&r| r != 0.0) => {
                Err(invalid("rho", "simulate runs independent sessions; use `correlated` for rho > 0"))
            }
            Command::Correlated if self.rhos.iter().any(|&r| r <= 0.0) => {
                Err(invalid("rho", "correlated needs rho > 0; use `simulate` for independent sessions"))
            }
            Command::Simulate | Command::Correlated
                if self.estimators.contains(&Estimator::TwoSession) && self.r_min != 2 =>
            {
                Err(invalid("estimator", "two-session only applies to R = 2; set --r-min 2"))
            }
            Command::Stop if self.estimators.contains(&Estimator::TwoSession) => {
                Err(invalid("estimator", "two-session cannot drive a sequential run"))
            }
            _ => Ok(()),
        }
    }
}

fn trial_seed(base: u64, trial: usize) -> u64 {
    base.wrapping_add(trial as u64)
}

fn make_source(n_tags: usize, p: f64, rho: f64, seed: u64) -> Result<Box<dyn SessionSource + Send>> {
    if rho == 0.0 {
        Ok(Box::new(IndependentSource::new(PopulationParams::new(n_tags, p)?, seed)))
    } else {
        Ok(Box::new(CorrelatedSource::new(derive_correlation(p, rho)?, n_tags, seed)))
    }
}

impl SessionSource for Box<dyn SessionSource + Send> {
    fn n_tags(&self) -> usize {
        (**self).n_tags()
    }

    fn next_session(&mut self) -> Vec<bool> {
        (**self).next_session()
    }
}

#[cfg(feature = "parallel")]
fn map_trials<T: Send>(trials: usize, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    use rayon::prelude::*;
    (0..trials).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_trials<T>(trials: usize, f: impl Fn(usize) -> Result<T>) -> Result<Vec<T>> {
    (0..trials).map(f).collect()
}

/// Aggregate of one estimator at one session count over all trials.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub estimator: Estimator,
    pub sessions: usize,
    pub p: f64,
    pub rho: f64,
    pub mean_p_hat: f64,
    /// Mean over trials with a defined cardinality; NaN if there were none.
    pub mean_n_hat: f64,
    pub mse_n: f64,
    pub mean_p_m: f64,
    pub trials: usize,
    pub defined_n: usize,
    pub seed: u64,
    pub mean_distinct: f64,
    /// Fraction of tags in error in session `sessions`, averaged over trials.
    pub session_error_rate: f64,
}

struct TrialSweep {
    /// `[r - r_min][estimator]`
    reports: Vec<Vec<EstimateReport>>,
    distinct: Vec<u64>,
    session_errors: Vec<usize>,
}

fn applies(estimator: Estimator, sessions: usize) -> bool {
    estimator != Estimator::TwoSession || sessions == 2
}

/// Sweep one `(p, rho)` block: every trial simulates `r_max` sessions and is
/// estimated at every prefix `r_min..=r_max`.
pub fn sweep_block(config: &ExperimentConfig, p: f64, rho: f64) -> Result<Vec<SweepRow>> {
    let (r_min, r_max) = (config.r_min, config.r_max);
    let per_trial = map_trials(config.trials, |trial| {
        let mut source = make_source(config.n_tags, p, rho, trial_seed(config.seed, trial))?;
        let mut tallier = Tallier::new(config.n_tags);
        let mut out = TrialSweep { reports: Vec::new(), distinct: Vec::new(), session_errors: Vec::new() };
        for r in 1..=r_max {
            let session = source.next_session();
            tallier.add_session(&session);
            if r < r_min {
                continue;
            }
            let tally = tallier.snapshot();
            let reports = config
                .estimators
                .iter()
                .filter(|&&e| applies(e, r))
                .map(|e| e.estimate(&tally.kbar, &tally.schnabel))
                .collect::<Result<Vec<_>>>()?;
            out.reports.push(reports);
            out.distinct.push(tally.observed_distinct);
            out.session_errors.push(session.iter().filter(|&&b| !b).count());
        }
        Ok(out)
    })?;

    let trials = config.trials as f64;
    let truth = config.n_tags as f64;
    let mut rows = Vec::new();
    for (idx, r) in (r_min..=r_max).enumerate() {
        let mean_distinct = per_trial.iter().map(|t| t.distinct[idx] as f64).sum::<f64>() / trials;
        let session_error_rate = per_trial.iter().map(|t| t.session_errors[idx] as f64 / truth).sum::<f64>() / trials;
        let active: Vec<Estimator> = config.estimators.iter().copied().filter(|&e| applies(e, r)).collect();
        for (slot, &estimator) in active.iter().enumerate() {
            let (mut sum_p, mut sum_pm, mut sum_n, mut sum_sq, mut defined) = (0.0, 0.0, 0.0, 0.0, 0usize);
            for t in &per_trial {
                let rep = &t.reports[idx][slot];
                sum_p += rep.p_hat;
                sum_pm += rep.p_m_hat;
                if let Some(n) = rep.n_hat {
                    sum_n += n;
                    sum_sq += (n - truth) * (n - truth);
                    defined += 1;
                }
            }
            let (mean_n_hat, mse_n) =
                if defined > 0 { (sum_n / defined as f64, sum_sq / defined as f64) } else { (f64::NAN, f64::NAN) };
            rows.push(SweepRow {
                estimator,
                sessions: r,
                p,
                rho,
                mean_p_hat: sum_p / trials,
                mean_n_hat,
                mse_n,
                mean_p_m: sum_pm / trials,
                trials: config.trials,
                defined_n: defined,
                seed: config.seed,
                mean_distinct,
                session_error_rate,
            });
        }
    }
    Ok(rows)
}

/// All `(p, rho)` blocks, `p` outermost.
pub fn sweep(config: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    config.validate_range()?;
    let mut rows = Vec::new();
    for &p in &config.ps {
        for &rho in &config.rhos {
            rows.extend(sweep_block(config, p, rho)?);
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StopTrial {
    pub trial: usize,
    pub seed: u64,
    pub outcome: StopOutcome,
    pub missed_tags: u64,
    pub final_p_hat: f64,
    pub final_p_m_hat: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StopDistribution {
    pub estimator: Estimator,
    pub p: f64,
    pub rho: f64,
    pub base_seed: u64,
    pub trials: Vec<StopTrial>,
}

impl StopDistribution {
    pub fn stop_sessions(&self) -> Vec<usize> {
        self.trials.iter().map(|t| t.outcome.stopped_at()).collect()
    }

    /// Median stopping session (mean of the two middle values for even counts).
    pub fn median_stop(&self) -> f64 {
        median(&self.stop_sessions())
    }

    pub fn mean_stop(&self) -> f64 {
        let s = self.stop_sessions();
        s.iter().sum::<usize>() as f64 / s.len() as f64
    }

    /// Fraction of trials that stopped with at least one tag never read.
    pub fn miss_rate(&self) -> f64 {
        self.trials.iter().filter(|t| t.missed_tags > 0).count() as f64 / self.trials.len() as f64
    }

    pub fn cap_rate(&self) -> f64 {
        self.trials.iter().filter(|t| t.outcome.cap_reached()).count() as f64 / self.trials.len() as f64
    }

    /// Count of trials stopping at each session `0..=max`.
    pub fn histogram(&self, max_sessions: usize) -> Vec<usize> {
        let mut h = vec![0; max_sessions + 1];
        for r in self.stop_sessions() {
            h[r.min(max_sessions)] += 1;
        }
        h
    }
}

pub fn median(values: &[usize]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_unstable();
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid] as f64
    } else {
        (v[mid - 1] + v[mid]) as f64 / 2.0
    }
}

/// Run the sequential controller over `config.trials` populations.
pub fn stop_distribution(
    config: &ExperimentConfig,
    estimator: Estimator,
    p: f64,
    rho: f64,
) -> Result<StopDistribution> {
    let trials = map_trials(config.trials, |trial| {
        let seed = trial_seed(config.seed, trial);
        let mut source = make_source(config.n_tags, p, rho, seed)?;
        let log = run_sequential(&mut source, estimator, &config.policy)?;
        let last = log.reports.last().expect("at least min_sessions reports");
        Ok(StopTrial {
            trial,
            seed,
            outcome: log.outcome,
            missed_tags: log.missed_tags(),
            final_p_hat: last.p_hat,
            final_p_m_hat: last.p_m_hat,
        })
    })?;
    Ok(StopDistribution { estimator, p, rho, base_seed: config.seed, trials })
}

/// Every `(estimator, p, rho)` combination of the config.
pub fn stop_distributions(config: &ExperimentConfig) -> Result<Vec<StopDistribution>> {
    config.validate_for(Command::Stop)?;
    let mut out = Vec::new();
    for &estimator in &config.estimators {
        for &p in &config.ps {
            for &rho in &config.rhos {
                out.push(stop_distribution(config, estimator, p, rho)?);
            }
        }
    }
    Ok(out)
}

/// First session count at which the missing probability computed from the
/// true `p` and `N` is at or below `threshold`.
pub fn true_stop_session(n_tags: usize, p: f64, threshold: f64, max_sessions: usize) -> Option<usize> {
    (1..=max_sessions).find(|&r| p_missing(p, Some(n_tags as f64), r) <= threshold)
}
