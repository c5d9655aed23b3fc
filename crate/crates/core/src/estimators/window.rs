//! Window-ratio estimation of the error probability for `R >= 2` sessions.
//!
//! Two masks over the multiplicity vector select the entries summed in the
//! numerator and denominator of an observed ratio. Substituting the expected
//! counts `N c_i(p)` for the entries cancels `N`, leaving one equation in `p`
//! that is solved numerically.

use crate::numeric::{binomial, bisect, golden_section_min};

/// Lower and upper edge of the search interval for `p`.
pub const P_EPSILON: f64 = 1e-6;
/// Uniform grid used to bracket the root.
pub const GRID_POINTS: usize = 1024;
/// Absolute tolerance in `p` of the refined root.
pub const ROOT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowPair {
    pub numerator: Vec<bool>,
    pub denominator: Vec<bool>,
}

/// Ways the ratio equation can fail to exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degenerate {
    /// Every count is zero: nothing was read.
    NoObservations,
    /// The denominator window selects no positive count.
    EmptyDenominator,
    /// The numerator window selects no positive count.
    EmptyNumerator,
}

impl WindowPair {
    pub fn new(numerator: Vec<bool>, denominator: Vec<bool>) -> Self {
        assert_eq!(numerator.len(), denominator.len(), "window lengths differ");
        Self { numerator, denominator }
    }

    pub fn sessions(&self) -> usize {
        self.numerator.len()
    }

    /// Remove Maximum Element: the numerator keeps every nonzero entry, the
    /// denominator additionally drops the largest one. Among tied maxima only
    /// the lowest index is dropped.
    pub fn rme(counts: &[f64]) -> Self {
        let numerator: Vec<bool> = counts.iter().map(|&k| k != 0.0).collect();
        let mut denominator = numerator.clone();
        let max_index = counts.iter().enumerate().fold(None::<(usize, f64)>, |best, (i, &k)| match best {
            Some((_, b)) if b >= k => best,
            _ => Some((i, k)),
        });
        if let Some((i, _)) = max_index {
            denominator[i] = false;
        }
        Self { numerator, denominator }
    }

    /// Remove Elements Greater than the Mean: entries are first divided by the
    /// number of session subsets they pool, `C(R, R-(i-1))`; the denominator
    /// keeps only nonzero normalised entries strictly below their nonzero mean.
    pub fn regm(counts: &[f64]) -> Self {
        let numerator: Vec<bool> = counts.iter().map(|&k| k != 0.0).collect();
        let normalized = normalized_counts(counts);
        let nonzero: Vec<f64> = normalized.iter().copied().filter(|&k| k != 0.0).collect();
        let denominator = if nonzero.is_empty() {
            vec![false; counts.len()]
        } else {
            let mean = nonzero.iter().sum::<f64>() / nonzero.len() as f64;
            normalized.iter().map(|&k| k != 0.0 && k < mean).collect()
        };
        Self { numerator, denominator }
    }

    pub fn is_denominator_empty(&self) -> bool {
        !self.denominator.iter().any(|&d| d)
    }
}

/// `k'_i = k_i / C(R, R-(i-1))`: the average count per session subset.
pub fn normalized_counts(counts: &[f64]) -> Vec<f64> {
    let r = counts.len() as u64;
    counts.iter().enumerate().map(|(idx, &k)| k / binomial(r, r - idx as u64)).collect()
}

/// Model side of the ratio in log space.
///
/// With `x = p / (1-p)`, `c_i(p) = (1-p)^R C(R, i-1) x^(i-1)`, and the common
/// `(1-p)^R` cancels. Working with logs keeps high-index terms from
/// underflowing when `p` is small.
struct LogRatioModel {
    ln_binom: Vec<f64>,
    numerator: Vec<usize>,
    denominator: Vec<usize>,
}

impl LogRatioModel {
    fn new(windows: &WindowPair) -> Self {
        let r = windows.sessions() as u64;
        let pick = |mask: &[bool]| mask.iter().enumerate().filter(|(_, &m)| m).map(|(j, _)| j).collect();
        Self {
            ln_binom: (0..=r).map(|j| binomial(r, j).ln()).collect(),
            numerator: pick(&windows.numerator),
            denominator: pick(&windows.denominator),
        }
    }

    fn log_sum(&self, idx: &[usize], log_x: f64) -> f64 {
        let term = |j: usize| self.ln_binom[j] + if j == 0 { 0.0 } else { j as f64 * log_x };
        let max = idx.iter().map(|&j| term(j)).fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return max;
        }
        max + idx.iter().map(|&j| (term(j) - max).exp()).sum::<f64>().ln()
    }

    fn eval(&self, p: f64) -> f64 {
        let log_x = p.ln() - (-p).ln_1p();
        self.log_sum(&self.numerator, log_x) - self.log_sum(&self.denominator, log_x)
    }
}

#[cfg(test)]
fn log_model_ratio(windows: &WindowPair, p: f64) -> f64 {
    LogRatioModel::new(windows).eval(p)
}

/// Solve the window-ratio equation for `p`.
///
/// A sign change of `ln f(p) - ln(observed)` is searched on a uniform grid of
/// [`GRID_POINTS`] over `[P_EPSILON, 1 - P_EPSILON]` and refined by bisection
/// to [`ROOT_TOLERANCE`]. Local minima of the absolute residual are also
/// checked for a pair of roots inside one grid cell. When several roots exist,
/// the one with the smallest squared misfit between `k_i` and `N_hat c_i(p)`
/// wins. Without any root the grid minimiser of the absolute residual is
/// refined by golden-section search.
pub fn ratio_solve_p(counts: &[f64], windows: &WindowPair) -> Result<f64, Degenerate> {
    assert_eq!(counts.len(), windows.sessions(), "window length must equal R");
    if counts.iter().all(|&k| k == 0.0) {
        return Err(Degenerate::NoObservations);
    }
    let masked = |mask: &[bool]| -> f64 { counts.iter().zip(mask).filter(|(_, &m)| m).map(|(k, _)| k).sum() };
    let num = masked(&windows.numerator);
    let den = masked(&windows.denominator);
    if den <= 0.0 {
        return Err(Degenerate::EmptyDenominator);
    }
    if num <= 0.0 {
        return Err(Degenerate::EmptyNumerator);
    }
    let log_observed = num.ln() - den.ln();
    let model = LogRatioModel::new(windows);
    let residual = |p: f64| model.eval(p) - log_observed;

    let lo = P_EPSILON;
    let hi = 1.0 - P_EPSILON;
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let grid: Vec<(f64, f64)> = (0..GRID_POINTS)
        .map(|k| {
            let p = if k == GRID_POINTS - 1 { hi } else { lo + k as f64 * step };
            (p, residual(p))
        })
        .collect();

    // A window ratio need not be monotone in p, so the equation can have
    // several roots, and two of them may share a grid cell. Collect every
    // bracketed root plus any pair hidden at a local minimum of |residual|,
    // then keep the root whose implied multiplicity vector fits best.
    let mut roots = Vec::new();
    for (k, pair) in grid.windows(2).enumerate() {
        let (p0, g0) = pair[0];
        let (p1, g1) = pair[1];
        if g0 == 0.0 {
            roots.push(p0);
        } else if g0.is_finite() && g1.is_finite() && g1 != 0.0 && (g0 < 0.0) != (g1 < 0.0) {
            roots.push(bisect(residual, p0, p1, ROOT_TOLERANCE));
        } else if k > 0 && is_local_min(&grid, k) {
            let (a, b) = (grid[k - 1].0, p1);
            let p_ext = residual_extremum(&residual, a, b, g0 > 0.0);
            let g_ext = residual(p_ext);
            if g_ext == 0.0 {
                roots.push(p_ext);
            } else if (g_ext < 0.0) != (g0 < 0.0) {
                roots.push(bisect(residual, a, p_ext, ROOT_TOLERANCE));
                roots.push(bisect(residual, p_ext, b, ROOT_TOLERANCE));
            }
        }
    }
    if grid[GRID_POINTS - 1].1 == 0.0 {
        roots.push(hi);
    }
    if let Some(best) =
        roots.into_iter().map(|p| (p, fit_discrepancy(counts, p))).reduce(|a, b| if b.1 < a.1 { b } else { a })
    {
        return Ok(best.0);
    }

    // No root at all: closest approach of the model ratio.
    let (best, _) = grid.iter().enumerate().filter(|(_, (_, g))| !g.is_nan()).fold(
        (0usize, f64::INFINITY),
        |(bi, bg), (i, (_, g))| {
            if g.abs() < bg {
                (i, g.abs())
            } else {
                (bi, bg)
            }
        },
    );
    let a = grid[best.saturating_sub(1)].0;
    let b = grid[(best + 1).min(GRID_POINTS - 1)].0;
    let p = golden_section_min(|p| residual(p).abs(), a, b, ROOT_TOLERANCE);
    Ok(p.clamp(lo, hi))
}

/// Grid point `k` has a smaller |residual| than both neighbours, all of the
/// same sign.
fn is_local_min(grid: &[(f64, f64)], k: usize) -> bool {
    let (g_prev, g, g_next) = (grid[k - 1].1, grid[k].1, grid[k + 1].1);
    [g_prev, g, g_next].iter().all(|x| x.is_finite())
        && (g_prev < 0.0) == (g < 0.0)
        && (g_next < 0.0) == (g < 0.0)
        && g.abs() <= g_prev.abs()
        && g.abs() <= g_next.abs()
}

/// Point in `[a, b]` where the residual comes closest to zero from its side:
/// the minimum when it is positive, the maximum when negative.
fn residual_extremum(residual: &impl Fn(f64) -> f64, a: f64, b: f64, positive: bool) -> f64 {
    let sign = if positive { 1.0 } else { -1.0 };
    golden_section_min(|p| sign * residual(p), a, b, ROOT_TOLERANCE)
}

/// Squared distance between the observed counts and `N_hat c_i(p)`, with
/// `N_hat = sum(k) / (1 - p^R)`.
fn fit_discrepancy(counts: &[f64], p: f64) -> f64 {
    let r = counts.len();
    let seen: f64 = counts.iter().sum();
    let n_hat = seen / (1.0 - p.powi(r as i32));
    counts
        .iter()
        .enumerate()
        .map(|(idx, &k)| {
            let reads = (r - idx) as i32;
            let expected = n_hat * binomial(r as u64, reads as u64) * (1.0 - p).powi(reads) * p.powi(idx as i32);
            (k - expected).powi(2)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::closed_form::expected_multiplicity_coefficient;

    #[test]
    fn rme_examples() {
        let w = WindowPair::rme(&[80.0, 40.0]);
        assert_eq!(w.numerator, vec![true, true]);
        assert_eq!(w.denominator, vec![false, true]);

        let tie = WindowPair::rme(&[40.0, 40.0]);
        assert_eq!(tie.numerator, vec![true, true]);
        assert_eq!(tie.denominator, vec![false, true]);

        let zero = WindowPair::rme(&[100.0, 0.0]);
        assert_eq!(zero.numerator, vec![true, false]);
        assert_eq!(zero.denominator, vec![false, false]);
        assert!(zero.is_denominator_empty());
    }

    #[test]
    fn regm_examples() {
        let w = WindowPair::regm(&[80.0, 40.0]);
        assert_eq!(normalized_counts(&[80.0, 40.0]), vec![80.0, 20.0]);
        assert_eq!(w.denominator, vec![false, true]);

        let w3 = WindowPair::regm(&[256.0, 192.0, 48.0]);
        assert_eq!(normalized_counts(&[256.0, 192.0, 48.0]), vec![256.0, 64.0, 16.0]);
        assert_eq!(w3.numerator, vec![true, true, true]);
        assert_eq!(w3.denominator, vec![false, true, true]);

        // A lone nonzero entry equals the mean and is not strictly below it.
        let lone = WindowPair::regm(&[100.0, 0.0]);
        assert_eq!(lone.numerator, vec![true, false]);
        assert!(lone.is_denominator_empty());
    }

    #[test]
    fn two_session_full_numerator_ratio() {
        // Observed (80 + 40) / 40 = 3 and model (1 + p) / (2p) give p = 0.2.
        let w = WindowPair::new(vec![true, true], vec![false, true]);
        let p = ratio_solve_p(&[80.0, 40.0], &w).unwrap();
        assert!((p - 0.2).abs() < 1e-9, "{p}");
    }

    #[test]
    fn degenerate_signals() {
        let w = WindowPair::rme(&[100.0, 0.0]);
        assert_eq!(ratio_solve_p(&[100.0, 0.0], &w), Err(Degenerate::EmptyDenominator));
        let w = WindowPair::new(vec![true, true], vec![true, true]);
        assert_eq!(ratio_solve_p(&[0.0, 0.0], &w), Err(Degenerate::NoObservations));
        let w = WindowPair::new(vec![false, true], vec![true, false]);
        assert_eq!(ratio_solve_p(&[10.0, 0.0], &w), Err(Degenerate::EmptyNumerator));
    }

    #[test]
    fn exact_expected_counts_recover_p_for_any_valid_window() {
        let counts = [256.0, 192.0, 48.0];
        let all = [
            (vec![true, true, true], vec![false, true, true]),
            (vec![true, true, true], vec![false, false, true]),
            (vec![true, false, false], vec![false, true, false]),
            (vec![false, true, false], vec![false, false, true]),
            (vec![true, true, false], vec![true, false, true]),
        ];
        for (n, d) in all {
            let w = WindowPair::new(n.clone(), d.clone());
            let p = ratio_solve_p(&counts, &w).unwrap();
            assert!((p - 0.2).abs() < 1e-6, "{n:?}/{d:?} -> {p}");
        }
    }

    #[test]
    fn two_root_ratio_picks_the_consistent_root() {
        // RME drops the middle class here; the ratio also equals the observed
        // value at p = 1/3.
        let counts: Vec<f64> = (1..=3).map(|i| 500.0 * expected_multiplicity_coefficient(i, 3, 0.4).unwrap()).collect();
        let w = WindowPair::rme(&counts);
        assert_eq!(w.denominator, vec![true, false, true]);
        let other = 1.0 / 3.0;
        let obs: f64 = counts.iter().sum::<f64>() / (counts[0] + counts[2]);
        assert!((log_model_ratio(&w, other) - obs.ln()).abs() < 1e-12);
        let p = ratio_solve_p(&counts, &w).unwrap();
        assert!((p - 0.4).abs() < 1e-8, "{p}");
    }

    #[test]
    fn small_p_with_many_sessions_does_not_underflow() {
        let r = 40;
        let p = 0.01;
        let counts: Vec<f64> = (1..=r).map(|i| 1000.0 * expected_multiplicity_coefficient(i, r, p).unwrap()).collect();
        let w = WindowPair::new(counts.iter().map(|_| true).collect(), (0..r).map(|j| j == r - 1).collect());
        let got = ratio_solve_p(&counts, &w).unwrap();
        assert!((got - p).abs() < 1e-6, "{got}");
    }
}
