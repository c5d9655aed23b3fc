//! Reader-session generators for a closed tag population and the reduction of
//! a read history to multiplicity and capture-recapture tallies.
//!
//! Every tag is independent of every other tag. Within one tag, errors are
//! either independent across sessions with probability `p`, or follow a
//! two-state Markov chain whose transition probabilities keep the marginal
//! error rate at `p` in every session.

mod history;
mod tally;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use history::ReadHistory;
pub use tally::{tally, Tallier, Tally};

use crate::error::{check_probability, Error, Result};

/// Identifier of the random source, recorded in experiment output.
pub const RNG_ALGORITHM: &str = "chacha8 (rand_chacha 0.9, seed_from_u64)";

pub(crate) fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationParams {
    pub n_tags: usize,
    pub p: f64,
}

impl PopulationParams {
    pub fn new(n_tags: usize, p: f64) -> Result<Self> {
        if n_tags == 0 {
            return Err(Error::OutOfRange { name: "n_tags", message: "need at least one tag".into() });
        }
        check_probability("p", p)?;
        Ok(Self { n_tags, p })
    }
}

/// Conditional error probabilities of the correlated session model.
///
/// `q` is the error probability after an error in the previous session and `r`
/// the error probability after a successful read.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationParams {
    pub p: f64,
    pub rho: f64,
    pub q: f64,
    pub r: f64,
}

/// `q = rho (1 - p) + p`, `r = p (1 - q) / (1 - p)`, so that
/// `p q + (1 - p) r = p` and `r <= p <= q`.
pub fn derive_correlation(p: f64, rho: f64) -> Result<CorrelationParams> {
    check_probability("p", p)?;
    if p >= 1.0 {
        return Err(Error::OutOfRange {
            name: "p",
            message: "correlated model needs p < 1 (r is undefined at p = 1)".into(),
        });
    }
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::OutOfRange { name: "rho", message: format!("{rho} is not in [0, 1]") });
    }
    let q = (rho * (1.0 - p) + p).min(1.0);
    let r = (p * (1.0 - q) / (1.0 - p)).clamp(0.0, 1.0);
    Ok(CorrelationParams { p, rho, q, r })
}

/// Produces one reader session at a time for a fixed population.
pub trait SessionSource {
    fn n_tags(&self) -> usize;

    /// Read outcome of every tag in the next session; `true` means read.
    fn next_session(&mut self) -> Vec<bool>;
}

/// Every tag is unreadable with probability `p`, independently of everything.
#[derive(Debug, Clone)]
pub struct IndependentSource {
    params: PopulationParams,
    rng: ChaCha8Rng,
}

impl IndependentSource {
    pub fn new(params: PopulationParams, seed: u64) -> Self {
        Self { params, rng: rng_from_seed(seed) }
    }
}

impl SessionSource for IndependentSource {
    fn n_tags(&self) -> usize {
        self.params.n_tags
    }

    fn next_session(&mut self) -> Vec<bool> {
        let p = self.params.p;
        (0..self.params.n_tags).map(|_| !self.rng.random_bool(p)).collect()
    }
}

/// Markov errors per tag: session 1 errs with `p`, later sessions with `q`
/// after an error and `r` after a read.
#[derive(Debug, Clone)]
pub struct CorrelatedSource {
    params: CorrelationParams,
    n_tags: usize,
    rng: ChaCha8Rng,
    previous_error: Option<Vec<bool>>,
}

impl CorrelatedSource {
    pub fn new(params: CorrelationParams, n_tags: usize, seed: u64) -> Self {
        Self { params, n_tags, rng: rng_from_seed(seed), previous_error: None }
    }
}

impl SessionSource for CorrelatedSource {
    fn n_tags(&self) -> usize {
        self.n_tags
    }

    fn next_session(&mut self) -> Vec<bool> {
        let CorrelationParams { p, q, r, .. } = self.params;
        let errors: Vec<bool> = match &self.previous_error {
            None => (0..self.n_tags).map(|_| self.rng.random_bool(p)).collect(),
            Some(prev) => prev.iter().map(|&was_error| self.rng.random_bool(if was_error { q } else { r })).collect(),
        };
        let reads = errors.iter().map(|&e| !e).collect();
        self.previous_error = Some(errors);
        reads
    }
}

/// Draw `sessions` rows from a source into a history.
pub fn collect_history(source: &mut impl SessionSource, sessions: usize) -> Result<ReadHistory> {
    ReadHistory::new((0..sessions).map(|_| source.next_session()).collect())
}

pub fn simulate_independent(params: PopulationParams, sessions: usize, seed: u64) -> Result<ReadHistory> {
    collect_history(&mut IndependentSource::new(params, seed), sessions)
}

pub fn simulate_correlated(cp: CorrelationParams, n_tags: usize, sessions: usize, seed: u64) -> Result<ReadHistory> {
    if n_tags == 0 {
        return Err(Error::OutOfRange { name: "n_tags", message: "need at least one tag".into() });
    }
    collect_history(&mut CorrelatedSource::new(cp, n_tags, seed), sessions)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derive_correlation_examples() {
        let c = derive_correlation(0.2, 0.3).unwrap();
        assert!((c.q - 0.44).abs() < 1e-12);
        assert!((c.r - 0.14).abs() < 1e-12);
        assert!((c.p * c.q + (1.0 - c.p) * c.r - 0.2).abs() < 1e-12);

        let ind = derive_correlation(0.2, 0.0).unwrap();
        assert!((ind.q - 0.2).abs() < 1e-15 && (ind.r - 0.2).abs() < 1e-15);

        let full = derive_correlation(0.5, 1.0).unwrap();
        assert_eq!((full.q, full.r), (1.0, 0.0));

        assert!(derive_correlation(1.0, 0.3).is_err());
        assert!(derive_correlation(0.2, 1.5).is_err());
        assert!(derive_correlation(-0.1, 0.5).is_err());
    }

    #[test]
    fn correlation_ordering_and_marginal() {
        for pi in 1..10 {
            for ri in 0..=10 {
                let (p, rho) = (pi as f64 / 10.0, ri as f64 / 10.0);
                let c = derive_correlation(p, rho).unwrap();
                assert!(c.r <= p + 1e-15 && p <= c.q + 1e-15, "p={p} rho={rho}");
                assert!((p * c.q + (1.0 - p) * c.r - p).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn independent_extremes() {
        let all = simulate_independent(PopulationParams::new(500, 0.0).unwrap(), 3, 1).unwrap();
        assert!(all.rows().iter().all(|row| row.iter().all(|&b| b)));
        let none = simulate_independent(PopulationParams::new(500, 1.0).unwrap(), 3, 1).unwrap();
        assert!(none.rows().iter().all(|row| row.iter().all(|&b| !b)));
    }

    #[test]
    fn independent_mean_read_count() {
        // Binomial(500, 0.8): mean 400, sd sqrt(80); the mean over 1000 seeds
        // has sd sqrt(80/1000).
        let params = PopulationParams::new(500, 0.2).unwrap();
        let trials = 1000;
        let total: usize = (0..trials)
            .map(|seed| simulate_independent(params, 1, seed).unwrap().rows()[0].iter().filter(|&&b| b).count())
            .sum();
        let mean = total as f64 / trials as f64;
        let bound = 3.0 * (500.0f64 * 0.2 * 0.8).sqrt() / (trials as f64).sqrt();
        assert!((mean - 400.0).abs() < bound, "mean {mean}");
    }

    #[test]
    fn determinism_per_seed() {
        let params = PopulationParams::new(200, 0.3).unwrap();
        let a = simulate_independent(params, 5, 42).unwrap();
        let b = simulate_independent(params, 5, 42).unwrap();
        let c = simulate_independent(params, 5, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let cp = derive_correlation(0.2, 0.3).unwrap();
        assert_eq!(simulate_correlated(cp, 200, 6, 9).unwrap(), simulate_correlated(cp, 200, 6, 9).unwrap());
    }

    #[test]
    fn full_correlation_freezes_error_state() {
        let cp = derive_correlation(0.2, 1.0).unwrap();
        let h = simulate_correlated(cp, 1000, 6, 3).unwrap();
        for row in h.rows() {
            assert_eq!(row, &h.rows()[0]);
        }
    }

    #[test]
    fn zero_correlation_matches_independent_statistics() {
        let cp = derive_correlation(0.2, 0.0).unwrap();
        let h = simulate_correlated(cp, 20_000, 4, 5).unwrap();
        // After an error and after a read the error rate should be the same.
        let (mut after_err, mut err_err, mut after_ok, mut ok_err) = (0u32, 0u32, 0u32, 0u32);
        for w in h.rows().windows(2) {
            for (a, b) in w[0].iter().zip(&w[1]) {
                if !a {
                    after_err += 1;
                    err_err += u32::from(!b);
                } else {
                    after_ok += 1;
                    ok_err += u32::from(!b);
                }
            }
        }
        let q_hat = err_err as f64 / after_err as f64;
        let r_hat = ok_err as f64 / after_ok as f64;
        assert!((q_hat - 0.2).abs() < 0.02, "{q_hat}");
        assert!((r_hat - 0.2).abs() < 0.01, "{r_hat}");
    }

    #[test]
    fn positive_correlation_orders_conditional_rates() {
        let cp = derive_correlation(0.2, 0.3).unwrap();
        let h = simulate_correlated(cp, 50_000, 3, 11).unwrap();
        let rows = h.rows();
        let (mut e, mut ee, mut s, mut se) = (0u32, 0u32, 0u32, 0u32);
        for (a, b) in rows[0].iter().zip(&rows[1]) {
            if !a {
                e += 1;
                ee += u32::from(!b);
            } else {
                s += 1;
                se += u32::from(!b);
            }
        }
        let q_hat = ee as f64 / e as f64;
        let r_hat = se as f64 / s as f64;
        assert!(q_hat > r_hat);
        assert!((q_hat - 0.44).abs() < 0.02 && (r_hat - 0.14).abs() < 0.01);
    }
}
