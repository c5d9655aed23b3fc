//! Closed-form pieces: the two-session estimators, the multiplicity model
//! coefficients, the generalised cardinality estimate and `p_M`.

use crate::error::{check_probability, Error, Result};
use crate::numeric::binomial;

/// Two-session error estimate `k2 / (2 k1 + k2)` with the marginal cases:
/// nothing observed gives 1, nothing missed gives 0.
///
/// `k1` counts tags seen in both sessions, `k2` tags seen in exactly one.
pub fn two_session_p(k1: u64, k2: u64) -> f64 {
    match (k1, k2) {
        (0, 0) => 1.0,
        (_, 0) => 0.0,
        _ => k2 as f64 / (2 * k1 + k2) as f64,
    }
}

/// Two-session cardinality estimate `(k1 + k2) / (1 - p^2)`.
///
/// `None` when `p_hat == 1`: the population size is unknown and callers treat
/// the missing probability as 1.
pub fn two_session_n(k1: u64, k2: u64, p_hat: f64) -> Option<f64> {
    if p_hat >= 1.0 {
        return None;
    }
    Some((k1 + k2) as f64 / (1.0 - p_hat * p_hat))
}

/// Expected fraction of the population read in exactly `R - (i - 1)` of `R`
/// sessions: `C(R, R-(i-1)) (1-p)^(R-(i-1)) p^(i-1)`.
///
/// The coefficients for `i = 1..=R` sum to `1 - p^R`; the missing mass is the
/// never-read class.
pub fn expected_multiplicity_coefficient(i: usize, sessions: usize, p: f64) -> Result<f64> {
    if i == 0 || i > sessions {
        return Err(Error::IndexOutOfRange { index: i, sessions });
    }
    check_probability("p", p)?;
    let reads = (sessions - (i - 1)) as i32;
    let misses = (i - 1) as i32;
    Ok(binomial(sessions as u64, reads as u64) * (1.0 - p).powi(reads) * p.powi(misses))
}

/// Generalised cardinality estimate `sum(k) / (1 - p^R)`, `R = counts.len()`.
pub fn general_n(counts: &[f64], p_hat: f64) -> Option<f64> {
    if p_hat >= 1.0 || counts.is_empty() {
        return None;
    }
    let seen: f64 = counts.iter().sum();
    Some(seen / (1.0 - p_hat.powi(counts.len() as i32)))
}

/// Probability that at least one of `n_hat` tags was unread in all `sessions`:
/// `1 - (1 - p^R)^N`. An undefined cardinality or `p_hat == 1` yields 1.
pub fn p_missing(p_hat: f64, n_hat: Option<f64>, sessions: usize) -> f64 {
    let Some(n) = n_hat else {
        return 1.0;
    };
    if p_hat >= 1.0 {
        return 1.0;
    }
    if n <= 0.0 {
        return 0.0;
    }
    let miss_all = p_hat.powi(sessions as i32);
    // expm1/ln1p keep precision when p^R is tiny.
    (-(n * (-miss_all).ln_1p()).exp_m1()).clamp(0.0, 1.0)
}

/// Expected value of the two-session estimator for known `N` and `p`:
/// `2N (p - p^(2N)) / (2N - 1) + p^(2N)`.
///
/// `n` is real so the bias can be evaluated at an estimated cardinality; it
/// must exceed 1/2.
pub fn two_session_expected_p(n: f64, p: f64) -> f64 {
    let two_n = 2.0 * n;
    let tail = p.powf(two_n);
    two_n * (p - tail) / (two_n - 1.0) + tail
}

/// Bias of the two-session estimator, `E[p_hat] - p`.
pub fn two_session_bias(n: f64, p: f64) -> f64 {
    two_session_expected_p(n, p) - p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_session_p_cases() {
        assert_eq!(two_session_p(80, 40), 0.2);
        assert_eq!(two_session_p(100, 0), 0.0);
        assert_eq!(two_session_p(0, 0), 1.0);
        assert_eq!(two_session_p(0, 7), 1.0);
    }

    #[test]
    fn two_session_n_cases() {
        assert!((two_session_n(80, 40, 0.2).unwrap() - 125.0).abs() < 1e-12);
        assert_eq!(two_session_n(0, 0, 1.0), None);
        assert_eq!(two_session_n(500, 0, 0.0), Some(500.0));
    }

    #[test]
    fn coefficient_examples() {
        let c = |i, r, p| expected_multiplicity_coefficient(i, r, p).unwrap();
        assert!((c(1, 2, 0.2) - 0.64).abs() < 1e-15);
        assert!((c(2, 2, 0.2) - 0.32).abs() < 1e-15);
        // 3 of the 8 equally likely patterns have exactly one read.
        assert!((c(3, 3, 0.5) - 0.375).abs() < 1e-15);
        assert_eq!(expected_multiplicity_coefficient(0, 3, 0.5), Err(Error::IndexOutOfRange { index: 0, sessions: 3 }));
        assert!(expected_multiplicity_coefficient(4, 3, 0.5).is_err());
        assert!(expected_multiplicity_coefficient(1, 3, 1.5).is_err());
    }

    #[test]
    fn coefficients_plus_unread_mass_sum_to_one() {
        for r in 1..=16 {
            for step in 0..=10 {
                let p = step as f64 / 10.0;
                let total: f64 = (1..=r).map(|i| expected_multiplicity_coefficient(i, r, p).unwrap()).sum();
                assert!((total + p.powi(r as i32) - 1.0).abs() <= 1e-12, "R={r} p={p}");
            }
        }
    }

    #[test]
    fn general_n_examples() {
        let n = general_n(&[256.0, 192.0, 48.0], 0.2).unwrap();
        assert!((n - 500.0).abs() < 1e-9);
        assert_eq!(general_n(&[500.0], 0.0), Some(500.0));
        assert_eq!(general_n(&[0.0, 0.0], 1.0), None);
    }

    #[test]
    fn p_missing_examples() {
        let pm = p_missing(0.1, Some(500.0), 8);
        assert!((pm - 4.999987525020712e-6).abs() < 1e-15);
        assert!(pm < 1e-5);
        assert!(p_missing(0.1, Some(500.0), 7) > 1e-5);
        let pm12 = p_missing(0.2, Some(500.0), 12);
        assert!((pm12 - 2.0479979070437283e-6).abs() < 1e-15);
        let pm11 = p_missing(0.2, Some(500.0), 11);
        assert!((pm11 - 1.023994767623549e-5).abs() < 1e-15);
        assert!(pm11 > 1e-5);
        assert_eq!(p_missing(0.0, Some(500.0), 2), 0.0);
        assert_eq!(p_missing(0.3, None, 4), 1.0);
        assert_eq!(p_missing(1.0, Some(10.0), 4), 1.0);
    }

    #[test]
    fn p_missing_decreases_with_sessions() {
        for &p in &[0.05, 0.2, 0.5, 0.9] {
            for &n in &[1.0, 37.5, 500.0] {
                let mut prev = p_missing(p, Some(n), 1);
                for r in 2..=20 {
                    let cur = p_missing(p, Some(n), r);
                    // Values within rounding of 1 saturate.
                    if prev < 1.0 {
                        assert!(cur < prev, "p={p} n={n} R={r}");
                    } else {
                        assert!(cur <= prev, "p={p} n={n} R={r}");
                    }
                    prev = cur;
                }
            }
        }
    }

    #[test]
    fn expected_p_examples() {
        assert!((two_session_expected_p(3.0, 0.5) - 0.596875).abs() < 1e-15);
        assert_eq!(two_session_expected_p(1.0, 0.0), 0.0);
        assert!(two_session_bias(46.0, 0.9) < 0.01);
        assert!(two_session_bias(45.0, 0.9) > 0.01);
        assert!((two_session_expected_p(1e6, 0.3) - 0.3).abs() < 1e-6);
    }
}
