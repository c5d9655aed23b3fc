//! Sequential stopping: read, estimate `p_M`, and stop once it is at or below
//! the threshold, optionally followed by a fixed number of margin sessions.

use crate::error::{Error, Result};
use crate::estimators::{EstimateReport, Estimator};
use crate::sim::{SessionSource, Tallier};

pub const DEFAULT_THRESHOLD: f64 = 1e-5;
pub const DEFAULT_MAX_SESSIONS: usize = 64;
/// Extra sessions suggested when sessions may be correlated.
pub const CORRELATED_MARGIN: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopPolicy {
    pub threshold: f64,
    pub margin_sessions: usize,
    /// Added to `p_M` before comparing with the threshold.
    pub bias_addend: f64,
    pub max_sessions: usize,
    pub min_sessions: usize,
}

impl Default for StopPolicy {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_THRESHOLD,
            margin_sessions: 0,
            bias_addend: 0.0,
            max_sessions: DEFAULT_MAX_SESSIONS,
            min_sessions: 2,
        }
    }
}

impl StopPolicy {
    pub fn correlated() -> Self {
        Self { margin_sessions: CORRELATED_MARGIN, ..Self::default() }
    }

    pub fn with_threshold(self, threshold: f64) -> Self {
        Self { threshold, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, message: String| Err(Error::OutOfRange { name, message });
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return bad("threshold", format!("{} is not in (0, 1)", self.threshold));
        }
        if self.min_sessions < 2 {
            return bad("min_sessions", "the estimators need at least 2 sessions".into());
        }
        if self.max_sessions < self.min_sessions {
            return bad("max_sessions", format!("{} < min_sessions {}", self.max_sessions, self.min_sessions));
        }
        if !(self.bias_addend >= 0.0 && self.bias_addend.is_finite()) {
            return bad("bias", format!("{} must be a finite non-negative number", self.bias_addend));
        }
        Ok(())
    }
}

/// `true` when `p_M + bias` is strictly above the threshold.
pub fn should_continue(report: &EstimateReport, policy: &StopPolicy) -> bool {
    report.p_m_hat + policy.bias_addend > policy.threshold
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopOutcome {
    /// The criterion held after `criterion_met_at` sessions; reading stopped
    /// after `stopped_at` (margin included, capped at `max_sessions`).
    Stopped { criterion_met_at: usize, stopped_at: usize },
    /// The criterion never held within `max_sessions`.
    CapReached { stopped_at: usize },
}

impl StopOutcome {
    pub fn stopped_at(&self) -> usize {
        match *self {
            StopOutcome::Stopped { stopped_at, .. } | StopOutcome::CapReached { stopped_at } => stopped_at,
        }
    }

    pub fn criterion_met_at(&self) -> Option<usize> {
        match *self {
            StopOutcome::Stopped { criterion_met_at, .. } => Some(criterion_met_at),
            StopOutcome::CapReached { .. } => None,
        }
    }

    pub fn cap_reached(&self) -> bool {
        matches!(self, StopOutcome::CapReached { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionLog {
    pub estimator: Estimator,
    /// One report per session from `min_sessions` on, in session order.
    pub reports: Vec<EstimateReport>,
    pub outcome: StopOutcome,
    /// Distinct tags read by the time reading stopped.
    pub observed_distinct: u64,
    pub n_tags: usize,
}

impl SessionLog {
    /// Tags never read. Only a simulated source can report this.
    pub fn missed_tags(&self) -> u64 {
        self.n_tags as u64 - self.observed_distinct
    }
}

/// Drive `source` until the stopping rule holds (plus margin) or the cap.
pub fn run_sequential(
    source: &mut impl SessionSource,
    estimator: Estimator,
    policy: &StopPolicy,
) -> Result<SessionLog> {
    policy.validate()?;
    if estimator == Estimator::TwoSession && policy.max_sessions != 2 {
        return Err(Error::SessionCount {
            estimator: estimator.name(),
            required: "exactly 2 (set max_sessions = 2)",
            sessions: policy.max_sessions,
        });
    }
    let mut tallier = Tallier::new(source.n_tags());
    let mut reports = Vec::new();
    let mut criterion_met_at = None;

    for r in 1..=policy.max_sessions {
        tallier.add_session(&source.next_session());
        if r < policy.min_sessions {
            continue;
        }
        let tally = tallier.snapshot();
        let report = estimator.estimate(&tally.kbar, &tally.schnabel)?;
        let keep_going = should_continue(&report, policy);
        reports.push(report);

        match criterion_met_at {
            None if !keep_going => {
                criterion_met_at = Some(r);
                if policy.margin_sessions == 0 {
                    break;
                }
            }
            Some(met) if r >= met + policy.margin_sessions => break,
            _ => {}
        }
    }

    let stopped_at = tallier.sessions();
    let outcome = match criterion_met_at {
        Some(met) => StopOutcome::Stopped { criterion_met_at: met, stopped_at },
        None => StopOutcome::CapReached { stopped_at },
    };
    Ok(SessionLog {
        estimator,
        reports,
        outcome,
        observed_distinct: tallier.observed_distinct(),
        n_tags: source.n_tags(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{derive_correlation, CorrelatedSource, IndependentSource, PopulationParams};

    fn report(p_m_hat: f64) -> EstimateReport {
        EstimateReport { estimator: Estimator::Regm, sessions: 8, p_hat: 0.1, n_hat: Some(500.0), p_m_hat, bias: None }
    }

    #[test]
    fn should_continue_examples() {
        let policy = StopPolicy::default();
        assert!(!should_continue(&report(2e-6), &policy));
        assert!(should_continue(&report(1.02e-5), &policy));
        assert!(!should_continue(&report(1e-5), &policy));
        let biased = StopPolicy { bias_addend: 1e-5, ..policy };
        assert!(should_continue(&report(5e-6), &biased));
    }

    #[test]
    fn policy_validation() {
        assert!(StopPolicy::default().validate().is_ok());
        assert!(StopPolicy { threshold: 0.0, ..Default::default() }.validate().is_err());
        assert!(StopPolicy { threshold: 1.0, ..Default::default() }.validate().is_err());
        assert!(StopPolicy { min_sessions: 1, ..Default::default() }.validate().is_err());
        assert!(StopPolicy { max_sessions: 3, min_sessions: 4, ..Default::default() }.validate().is_err());
        assert!(StopPolicy { bias_addend: -1.0, ..Default::default() }.validate().is_err());
        assert_eq!(StopPolicy::correlated().margin_sessions, 2);
    }

    #[test]
    fn error_free_population_stops_at_min_sessions() {
        let params = PopulationParams::new(500, 0.0).unwrap();
        for margin in [0, 3] {
            let policy = StopPolicy { margin_sessions: margin, ..Default::default() };
            let log = run_sequential(&mut IndependentSource::new(params, 1), Estimator::Regm, &policy).unwrap();
            assert_eq!(log.outcome, StopOutcome::Stopped { criterion_met_at: 2, stopped_at: 2 + margin });
            assert_eq!(log.reports[0].p_hat, 0.0);
            assert_eq!(log.reports[0].p_m_hat, 0.0);
            assert_eq!(log.missed_tags(), 0);
        }
    }

    #[test]
    fn unreadable_population_hits_the_cap() {
        let params = PopulationParams::new(50, 1.0).unwrap();
        let policy = StopPolicy { max_sessions: 10, ..Default::default() };
        for est in [Estimator::Rme, Estimator::Regm, Estimator::Schnabel] {
            let log = run_sequential(&mut IndependentSource::new(params, 1), est, &policy).unwrap();
            assert_eq!(log.outcome, StopOutcome::CapReached { stopped_at: 10 });
            assert_eq!(log.reports.len(), 9);
            assert!(log.reports.iter().all(|r| r.p_m_hat == 1.0));
        }
    }

    #[test]
    fn margin_adds_exactly_m_sessions() {
        let params = PopulationParams::new(500, 0.1).unwrap();
        for seed in 0..20 {
            let base =
                run_sequential(&mut IndependentSource::new(params, seed), Estimator::Regm, &StopPolicy::default())
                    .unwrap();
            let with_margin = run_sequential(
                &mut IndependentSource::new(params, seed),
                Estimator::Regm,
                &StopPolicy { margin_sessions: 2, ..Default::default() },
            )
            .unwrap();
            let met = base.outcome.criterion_met_at().unwrap();
            assert_eq!(with_margin.outcome.criterion_met_at(), Some(met));
            assert_eq!(with_margin.outcome.stopped_at(), met + 2);
        }
    }

    #[test]
    fn lower_threshold_never_stops_earlier() {
        let params = PopulationParams::new(300, 0.2).unwrap();
        for seed in 0..20 {
            let mut prev = 0;
            for t in [1e-2, 1e-3, 1e-5, 1e-7, 1e-9] {
                let policy = StopPolicy::default().with_threshold(t);
                let log = run_sequential(&mut IndependentSource::new(params, seed), Estimator::Regm, &policy).unwrap();
                let r = log.outcome.stopped_at();
                assert!(r >= prev, "seed {seed} threshold {t}");
                assert!(r >= policy.min_sessions && r <= policy.max_sessions);
                prev = r;
            }
        }
    }

    #[test]
    fn reports_are_in_session_order() {
        let cp = derive_correlation(0.2, 0.3).unwrap();
        let log =
            run_sequential(&mut CorrelatedSource::new(cp, 500, 4), Estimator::Schnabel, &StopPolicy::correlated())
                .unwrap();
        for (i, r) in log.reports.iter().enumerate() {
            assert_eq!(r.sessions, i + 2);
        }
        assert_eq!(log.reports.len(), log.outcome.stopped_at() - 1);
    }

    #[test]
    fn two_session_estimator_requires_two_session_cap() {
        let params = PopulationParams::new(100, 0.1).unwrap();
        let mut src = IndependentSource::new(params, 1);
        assert!(run_sequential(&mut src, Estimator::TwoSession, &StopPolicy::default()).is_err());
        let policy = StopPolicy { max_sessions: 2, ..Default::default() };
        let log = run_sequential(&mut src, Estimator::TwoSession, &policy).unwrap();
        assert_eq!(log.outcome.stopped_at(), 2);
    }
}
