//! Exact expectations of the two-session estimators for small populations.
//!
//! With two sessions each tag falls in one of three classes: read twice
//! (probability `(1-p)^2`), read once (`2(1-p)p`), never read (`p^2`). The
//! class counts `(K1, K2, K3)` are multinomial, so every expectation is a
//! finite sum over `O(N^2)` outcomes.

use crate::error::{check_probability, Error, Result};
use crate::estimators::two_session_p;

/// Largest population handled by exact enumeration.
pub const MAX_ENUMERATED_TAGS: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeWeight {
    pub k1: u32,
    pub k2: u32,
    pub k3: u32,
    pub probability: f64,
}

fn factorial(n: u32) -> u64 {
    (1..=u64::from(n)).product()
}

/// `N! / (k1! k2! k3!)`, computed in integers.
pub fn multinomial_coefficient(k1: u32, k2: u32, k3: u32) -> u64 {
    factorial(k1 + k2 + k3) / (factorial(k1) * factorial(k2) * factorial(k3))
}

pub fn enumerate_outcomes(n: u32, p: f64) -> Result<Vec<OutcomeWeight>> {
    if n == 0 || n > MAX_ENUMERATED_TAGS {
        return Err(Error::UnsupportedPopulation { n, max: MAX_ENUMERATED_TAGS });
    }
    check_probability("p", p)?;
    let both = (1.0 - p) * (1.0 - p);
    let once = 2.0 * (1.0 - p) * p;
    let never = p * p;
    let mut out = Vec::with_capacity(((n + 1) * (n + 2) / 2) as usize);
    for k1 in 0..=n {
        for k2 in 0..=(n - k1) {
            let k3 = n - k1 - k2;
            let probability = multinomial_coefficient(k1, k2, k3) as f64
                * both.powi(k1 as i32)
                * once.powi(k2 as i32)
                * never.powi(k3 as i32);
            out.push(OutcomeWeight { k1, k2, k3, probability });
        }
    }
    Ok(out)
}

/// `E[g(K1, K2)]` for the two-session error estimate `g`.
pub fn exact_expected_p(n: u32, p: f64) -> Result<f64> {
    Ok(enumerate_outcomes(n, p)?.iter().map(|o| two_session_p(u64::from(o.k1), u64::from(o.k2)) * o.probability).sum())
}

/// `E[(K1 + K2) / (1 - p^2)]` with the true `p` in the denominator.
pub fn exact_expected_n(n: u32, p: f64) -> Result<f64> {
    if p >= 1.0 {
        return Err(Error::OutOfRange { name: "p", message: "needs p < 1".into() });
    }
    let scale = 1.0 - p * p;
    Ok(enumerate_outcomes(n, p)?.iter().map(|o| f64::from(o.k1 + o.k2) / scale * o.probability).sum())
}

/// Maximum deviation between enumeration and the closed form over a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationSweep {
    pub max_deviation: f64,
    pub worst_n: u32,
    pub worst_p: f64,
}

/// `p` values `0.0, 0.1, ..., 1.0`.
pub fn probability_grid() -> Vec<f64> {
    (0..=10).map(|i| f64::from(i) / 10.0).collect()
}

/// Compare enumeration against `2N(p - p^2N)/(2N - 1) + p^2N` for every
/// `N <= max_n` and `p` in the grid.
pub fn sweep_expected_p(max_n: u32, grid: &[f64]) -> Result<DeviationSweep> {
    sweep(max_n, grid, |n, p| {
        Ok((exact_expected_p(n, p)? - crate::estimators::two_session_expected_p(f64::from(n), p)).abs())
    })
}

/// Compare enumeration of the cardinality estimate against `N`; `p = 1` is
/// skipped.
pub fn sweep_expected_n(max_n: u32, grid: &[f64]) -> Result<DeviationSweep> {
    let grid: Vec<f64> = grid.iter().copied().filter(|&p| p < 1.0).collect();
    sweep(max_n, &grid, |n, p| Ok((exact_expected_n(n, p)? - f64::from(n)).abs()))
}

fn sweep(max_n: u32, grid: &[f64], deviation: impl Fn(u32, f64) -> Result<f64>) -> Result<DeviationSweep> {
    let mut worst = DeviationSweep { max_deviation: 0.0, worst_n: 1, worst_p: grid.first().copied().unwrap_or(0.0) };
    for n in 1..=max_n {
        for &p in grid {
            let d = deviation(n, p)?;
            if d > worst.max_deviation {
                worst = DeviationSweep { max_deviation: d, worst_n: n, worst_p: p };
            }
        }
    }
    Ok(worst)
}
