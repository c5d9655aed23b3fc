//! Estimators of the per-session error probability `p`, the population size
//! `N`, and the probability `p_M` that some tag was never read.

mod closed_form;
mod schnabel;
mod window;

use std::fmt;
use std::str::FromStr;

pub use closed_form::{
    expected_multiplicity_coefficient, general_n, p_missing, two_session_bias, two_session_expected_p, two_session_n,
    two_session_p,
};
pub use schnabel::{schnabel_n, schnabel_p, SchnabelTallies};
pub use window::{normalized_counts, ratio_solve_p, Degenerate, WindowPair, GRID_POINTS, P_EPSILON, ROOT_TOLERANCE};

use crate::error::{Error, Result};

/// `counts[i-1]` is the number of distinct tags read in exactly `R - (i-1)` of
/// the `R` sessions. Tags read in no session are not represented.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplicityVector {
    counts: Vec<u64>,
}

impl MultiplicityVector {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::OutOfRange { name: "sessions", message: "a multiplicity vector needs R >= 1".into() });
        }
        Ok(Self { counts })
    }

    pub fn sessions(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Number of distinct tags read at least once.
    pub fn observed(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.counts.iter().map(|&k| k as f64).collect()
    }

    pub fn normalized(&self) -> Vec<f64> {
        normalized_counts(&self.to_f64())
    }
}

pub fn rme_windows(kbar: &MultiplicityVector) -> WindowPair {
    WindowPair::rme(&kbar.to_f64())
}

pub fn regm_windows(kbar: &MultiplicityVector) -> WindowPair {
    WindowPair::regm(&kbar.to_f64())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Estimator {
    TwoSession,
    Rme,
    Regm,
    Schnabel,
}

impl Estimator {
    pub const ALL: [Estimator; 4] = [Estimator::TwoSession, Estimator::Rme, Estimator::Regm, Estimator::Schnabel];

    pub fn name(self) -> &'static str {
        match self {
            Estimator::TwoSession => "two-session",
            Estimator::Rme => "rme",
            Estimator::Regm => "regm",
            Estimator::Schnabel => "schnabel",
        }
    }

    /// Estimate from the tallies of an observed history.
    pub fn estimate(self, kbar: &MultiplicityVector, tallies: &SchnabelTallies) -> Result<EstimateReport> {
        let sessions = kbar.sessions();
        match self {
            Estimator::TwoSession => {
                if sessions != 2 {
                    return Err(Error::SessionCount { estimator: self.name(), required: "exactly 2", sessions });
                }
                let (k1, k2) = (kbar.counts[0], kbar.counts[1]);
                let p_hat = two_session_p(k1, k2);
                Ok(EstimateReport::from_parts(self, sessions, p_hat, two_session_n(k1, k2, p_hat)))
            }
            Estimator::Rme | Estimator::Regm => self.estimate_counts(&kbar.to_f64()),
            Estimator::Schnabel => {
                if sessions < 2 || tallies.sessions() != sessions {
                    return Err(Error::SessionCount {
                        estimator: self.name(),
                        required: "at least 2 (matching the multiplicity vector)",
                        sessions: tallies.sessions(),
                    });
                }
                let n_hat = schnabel_n(tallies);
                let report = match schnabel_p(tallies, n_hat) {
                    Some(p_hat) => EstimateReport::from_parts(self, sessions, p_hat, n_hat),
                    None => EstimateReport::from_parts(self, sessions, 1.0, None),
                };
                Ok(report)
            }
        }
    }

    /// Estimate from (possibly real-valued) multiplicity counts. Schnabel needs
    /// per-session tallies and is rejected here.
    pub fn estimate_counts(self, counts: &[f64]) -> Result<EstimateReport> {
        let sessions = counts.len();
        if sessions < 2 {
            return Err(Error::SessionCount { estimator: self.name(), required: "at least 2", sessions });
        }
        let p_hat = match self {
            Estimator::Rme => resolve_p(counts, &WindowPair::rme(counts)),
            Estimator::Regm => {
                let windows = WindowPair::regm(counts);
                // All nonzero normalised entries tied at the mean: no entry is
                // strictly below it, so drop the single largest instead.
                if windows.is_denominator_empty() && counts.iter().filter(|&&k| k != 0.0).count() > 1 {
                    resolve_p(counts, &WindowPair::rme(counts))
                } else {
                    resolve_p(counts, &windows)
                }
            }
            Estimator::TwoSession if sessions == 2 => {
                if counts.iter().all(|&k| k == 0.0) {
                    1.0
                } else if counts[1] == 0.0 {
                    0.0
                } else {
                    counts[1] / (2.0 * counts[0] + counts[1])
                }
            }
            Estimator::TwoSession => {
                return Err(Error::SessionCount { estimator: self.name(), required: "exactly 2", sessions })
            }
            Estimator::Schnabel => {
                return Err(Error::SessionCount { estimator: self.name(), required: "per-session tallies", sessions })
            }
        };
        Ok(EstimateReport::from_parts(self, sessions, p_hat, general_n(counts, p_hat)))
    }
}

/// Solve the window ratio, mapping degenerate cases to a fallback `p`.
///
/// No observations give 1. An empty window gives the raw error rate among the
/// observed tags, `sum((i-1) k_i) / (R sum(k_i))`, which is 0 when every
/// observed tag was read in every session.
pub fn resolve_p(counts: &[f64], windows: &WindowPair) -> f64 {
    match ratio_solve_p(counts, windows) {
        Ok(p) => p,
        Err(Degenerate::NoObservations) => 1.0,
        Err(Degenerate::EmptyDenominator | Degenerate::EmptyNumerator) => observed_error_rate(counts),
    }
}

fn observed_error_rate(counts: &[f64]) -> f64 {
    let r = counts.len() as f64;
    let seen: f64 = counts.iter().sum();
    let misses: f64 = counts.iter().enumerate().map(|(i, &k)| i as f64 * k).sum();
    misses / (r * seen)
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Estimator {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "two-session" | "two_session" | "twosession" => Ok(Estimator::TwoSession),
            "rme" => Ok(Estimator::Rme),
            "regm" => Ok(Estimator::Regm),
            "schnabel" => Ok(Estimator::Schnabel),
            other => Err(format!("unknown estimator '{other}' (expected one of: two-session, rme, regm, schnabel)")),
        }
    }
}

/// One estimate after `sessions` sessions.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub estimator: Estimator,
    pub sessions: usize,
    pub p_hat: f64,
    /// `None` when the cardinality is undefined.
    pub n_hat: Option<f64>,
    pub p_m_hat: f64,
    /// Two-session bias `E[p_hat] - p` evaluated at the estimates; reported,
    /// never subtracted.
    pub bias: Option<f64>,
}

impl EstimateReport {
    pub fn from_parts(estimator: Estimator, sessions: usize, p_hat: f64, n_hat: Option<f64>) -> Self {
        let p_hat = p_hat.clamp(0.0, 1.0);
        let bias = match n_hat {
            Some(n) if sessions == 2 && n >= 1.0 => Some(two_session_bias(n, p_hat)),
            _ => None,
        };
        Self { estimator, sessions, p_hat, n_hat, p_m_hat: p_missing(p_hat, n_hat, sessions), bias }
    }

    /// Whether no information was available; such reports force another session.
    pub fn is_degenerate(&self) -> bool {
        self.n_hat.is_none()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mv(c: &[u64]) -> MultiplicityVector {
        MultiplicityVector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn multiplicity_vector_basics() {
        let k = mv(&[256, 192, 48]);
        assert_eq!(k.sessions(), 3);
        assert_eq!(k.observed(), 496);
        assert_eq!(k.normalized(), vec![256.0, 64.0, 16.0]);
        for (v, (i, &c)) in k.normalized().iter().zip(k.counts().iter().enumerate()) {
            let pooled = crate::numeric::binomial(3, 3 - i as u64);
            assert_eq!(v * pooled, c as f64);
        }
        assert!(MultiplicityVector::new(vec![]).is_err());
    }

    #[test]
    fn two_session_report() {
        let k = mv(&[80, 40]);
        let t = SchnabelTallies::new(vec![105, 95], vec![0, 80], vec![0, 105]).unwrap();
        let r = Estimator::TwoSession.estimate(&k, &t).unwrap();
        assert_eq!(r.p_hat, 0.2);
        assert!((r.n_hat.unwrap() - 125.0).abs() < 1e-12);
        assert!(r.bias.unwrap() > 0.0);
        assert!(Estimator::TwoSession.estimate(&mv(&[1, 2, 3]), &t).is_err());
    }

    #[test]
    fn ratio_estimators_on_exact_counts() {
        for est in [Estimator::Rme, Estimator::Regm] {
            let r = est.estimate_counts(&[256.0, 192.0, 48.0]).unwrap();
            assert!((r.p_hat - 0.2).abs() < 1e-6, "{est}");
            assert!((r.n_hat.unwrap() - 500.0).abs() < 1e-3, "{est}");
        }
    }

    #[test]
    fn degenerate_mappings() {
        for est in [Estimator::Rme, Estimator::Regm] {
            let perfect = est.estimate_counts(&[100.0, 0.0]).unwrap();
            assert_eq!(perfect.p_hat, 0.0);
            assert_eq!(perfect.n_hat, Some(100.0));
            assert_eq!(perfect.p_m_hat, 0.0);

            let nothing = est.estimate_counts(&[0.0, 0.0, 0.0]).unwrap();
            assert_eq!(nothing.p_hat, 1.0);
            assert_eq!(nothing.n_hat, None);
            assert_eq!(nothing.p_m_hat, 1.0);
            assert!(nothing.is_degenerate());

            // Every tag read in exactly one of two sessions.
            let once = est.estimate_counts(&[0.0, 100.0]).unwrap();
            assert_eq!(once.p_hat, 0.5);
            assert!(once.p_m_hat > 0.9);
        }
    }

    #[test]
    fn regm_tie_at_mean_falls_back_to_rme() {
        // k' = [40, 40]: no entry strictly below the mean.
        let r = Estimator::Regm.estimate_counts(&[40.0, 80.0]).unwrap();
        assert!((r.p_hat - two_session_p(40, 80)).abs() < 1e-9);
    }

    #[test]
    fn schnabel_report() {
        let k = mv(&[328, 154]);
        let t = SchnabelTallies::new(vec![400, 410], vec![0, 328], vec![0, 400]).unwrap();
        let r = Estimator::Schnabel.estimate(&k, &t).unwrap();
        assert!((r.n_hat.unwrap() - 500.0).abs() < 1e-9);
        assert!((r.p_hat - 0.19).abs() < 1e-12);

        let none = SchnabelTallies::new(vec![400, 380], vec![0, 0], vec![0, 400]).unwrap();
        let r = Estimator::Schnabel.estimate(&mv(&[0, 780]), &none).unwrap();
        assert_eq!((r.p_hat, r.n_hat, r.p_m_hat), (1.0, None, 1.0));
        assert!(Estimator::Schnabel.estimate_counts(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn estimator_names_round_trip() {
        for e in Estimator::ALL {
            assert_eq!(e.name().parse::<Estimator>().unwrap(), e);
        }
        assert!("mle".parse::<Estimator>().is_err());
    }
}
