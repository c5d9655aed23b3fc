//! Browser bindings. Each export returns a flat `Float64Array`; the row
//! layout is given on the function. Seeds are `u32` on the JS side so the
//! page can pass plain numbers.

use missing_tags::estimators::p_missing;
use missing_tags::experiment::{stop_distribution, sweep_block, ExperimentConfig};
use missing_tags::sim::{derive_correlation, CorrelatedSource, IndependentSource, PopulationParams};
use missing_tags::{Estimator, SessionSource, StopPolicy, Tallier};
use wasm_bindgen::prelude::*;

fn source(n_tags: usize, p: f64, rho: f64, seed: u64) -> Result<Box<dyn SessionSource>, String> {
    if rho == 0.0 {
        let params = PopulationParams::new(n_tags, p).map_err(|e| e.to_string())?;
        Ok(Box::new(IndependentSource::new(params, seed)))
    } else {
        let params = derive_correlation(p, rho).map_err(|e| e.to_string())?;
        Ok(Box::new(CorrelatedSource::new(params, n_tags, seed)))
    }
}

fn config(n_tags: usize, p: f64, rho: f64, r_max: usize, trials: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        n_tags,
        ps: vec![p],
        rhos: vec![rho],
        estimators: vec![Estimator::Regm, Estimator::Schnabel],
        r_min: 2,
        r_max,
        trials,
        seed,
        ..Default::default()
    }
}

pub fn missing_curve(n_tags: usize, p: f64, rho: f64, r_max: usize, seed: u64) -> Result<Vec<f64>, String> {
    if r_max < 2 {
        return Err("r_max must be at least 2".into());
    }
    let mut src = source(n_tags, p, rho, seed)?;
    let mut tallier = Tallier::new(n_tags);
    tallier.add_session(&src.next_session());
    let mut out = Vec::with_capacity(4 * (r_max - 1));
    for r in 2..=r_max {
        tallier.add_session(&src.next_session());
        let t = tallier.snapshot();
        let report = Estimator::Regm.estimate(&t.kbar, &t.schnabel).map_err(|e| e.to_string())?;
        let unread = (n_tags as u64 - t.observed_distinct) as f64;
        out.extend([r as f64, p_missing(p, Some(n_tags as f64), r), report.p_m_hat, unread]);
    }
    Ok(out)
}

pub fn estimator_means(
    n_tags: usize,
    p: f64,
    rho: f64,
    r_max: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>, String> {
    let rows = sweep_block(&config(n_tags, p, rho, r_max, trials, seed), p, rho).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    for r in 2..=r_max {
        let at = |est| rows.iter().find(|x| x.estimator == est && x.sessions == r).expect("sweep covers R");
        let (regm, schnabel) = (at(Estimator::Regm), at(Estimator::Schnabel));
        out.extend([
            r as f64,
            regm.mean_p_hat,
            schnabel.mean_p_hat,
            regm.mean_n_hat,
            schnabel.mean_n_hat,
            regm.mean_distinct,
        ]);
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
pub fn stop_summary(
    n_tags: usize,
    p: f64,
    rho: f64,
    threshold: f64,
    margin: usize,
    max_sessions: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>, String> {
    let policy = StopPolicy { threshold, margin_sessions: margin, max_sessions, ..Default::default() };
    let cfg = ExperimentConfig { policy, ..config(n_tags, p, rho, 2, trials, seed) };
    let dist = stop_distribution(&cfg, Estimator::Regm, p, rho).map_err(|e| e.to_string())?;
    let mut out = vec![dist.median_stop(), dist.mean_stop(), dist.miss_rate(), dist.cap_rate()];
    out.extend(dist.histogram(max_sessions).into_iter().map(|c| c as f64));
    Ok(out)
}

/// Rows of `[R, true p_M, estimated p_M (REGM), tags still unread]` for one
/// simulated inventory of `r_max` sessions.
#[wasm_bindgen(js_name = missingCurve)]
pub fn missing_curve_js(n_tags: usize, p: f64, rho: f64, r_max: usize, seed: u32) -> Result<Vec<f64>, JsError> {
    missing_curve(n_tags, p, rho, r_max, seed.into()).map_err(|e| JsError::new(&e))
}

/// Rows of `[R, REGM mean p, Schnabel mean p, REGM mean N, Schnabel mean N,
/// mean distinct read]` for `R = 2..=r_max`.
#[wasm_bindgen(js_name = estimatorMeans)]
pub fn estimator_means_js(
    n_tags: usize,
    p: f64,
    rho: f64,
    r_max: usize,
    trials: usize,
    seed: u32,
) -> Result<Vec<f64>, JsError> {
    estimator_means(n_tags, p, rho, r_max, trials, seed.into()).map_err(|e| JsError::new(&e))
}

/// `[median stop R, mean stop R, miss rate, cap rate]` followed by the count
/// of trials stopping at each `R = 0..=max_sessions`.
#[wasm_bindgen(js_name = stopSummary)]
#[allow(clippy::too_many_arguments)]
pub fn stop_summary_js(
    n_tags: usize,
    p: f64,
    rho: f64,
    threshold: f64,
    margin: usize,
    max_sessions: usize,
    trials: usize,
    seed: u32,
) -> Result<Vec<f64>, JsError> {
    stop_summary(n_tags, p, rho, threshold, margin, max_sessions, trials, seed.into()).map_err(|e| JsError::new(&e))
}
