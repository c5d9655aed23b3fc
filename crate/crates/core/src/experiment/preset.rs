//! Named experiment setups: 500 tags, 1000 trials, threshold `1e-5`,
//! `p` in {0.1, 0.2} and `rho` in {0.1, 0.3}.

use super::ExperimentConfig;
use crate::controller::StopPolicy;
use crate::estimators::Estimator;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Correlated,
    Stop,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Correlated => "correlated",
            Command::Stop => "stop",
        }
    }
}

pub const PRESET_NAMES: [&str; 9] =
    ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "stop-p01", "stop-p02", "stop-corr"];

/// Command and configuration of a named preset.
///
/// - `fig2`: estimates of `p` by RME, REGM and Schnabel, `p = 0.2`.
/// - `fig3`: `p_M` against sessions for `p` in {0.1, 0.2}.
/// - `fig4`: cardinality estimate and its MSE, `p = 0.2`.
/// - `fig5`, `fig6`: correlated sessions, `p = 0.2`, `rho` in {0.1, 0.3}
///   (error estimate and cardinality estimate respectively).
/// - `fig7`: correlated `p_M`, `p` in {0.1, 0.2}, `rho = 0.3`.
/// - `stop-p01`, `stop-p02`: stopping-session distribution with REGM.
/// - `stop-corr`: stopping with correlated sessions and a two-session margin.
pub fn preset(name: &str) -> Option<(Command, ExperimentConfig)> {
    let base = ExperimentConfig {
        n_tags: 500,
        ps: vec![0.2],
        rhos: vec![0.0],
        estimators: vec![Estimator::Regm, Estimator::Schnabel],
        r_min: 2,
        r_max: 12,
        trials: 1000,
        seed: 1,
        policy: StopPolicy::default(),
    };
    let correlated = ExperimentConfig { rhos: vec![0.1, 0.3], policy: StopPolicy::correlated(), ..base.clone() };
    let stop = ExperimentConfig { estimators: vec![Estimator::Regm], ..base.clone() };
    let preset = match name {
        "fig2" => (
            Command::Simulate,
            ExperimentConfig { estimators: vec![Estimator::Rme, Estimator::Regm, Estimator::Schnabel], ..base },
        ),
        "fig3" => (Command::Simulate, ExperimentConfig { ps: vec![0.1, 0.2], ..base }),
        "fig4" => (Command::Simulate, base),
        "fig5" | "fig6" => (Command::Correlated, correlated),
        "fig7" => (Command::Correlated, ExperimentConfig { ps: vec![0.1, 0.2], rhos: vec![0.3], ..correlated }),
        "stop-p01" => (Command::Stop, ExperimentConfig { ps: vec![0.1], ..stop }),
        "stop-p02" => (Command::Stop, stop),
        "stop-corr" => (
            Command::Stop,
            ExperimentConfig { ps: vec![0.1, 0.2], rhos: vec![0.3], policy: StopPolicy::correlated(), ..stop },
        ),
        _ => return None,
    };
    Some(preset)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_is_valid_for_its_command() {
        for name in PRESET_NAMES {
            let (cmd, cfg) = preset(name).unwrap();
            cfg.validate_for(cmd).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(cfg.n_tags, 500);
            assert_eq!(cfg.trials, 1000);
            assert_eq!(cfg.policy.threshold, 1e-5);
            assert!(cfg.ps.iter().all(|p| [0.1, 0.2].contains(p)));
            assert!(cfg.rhos.iter().all(|r| [0.0, 0.1, 0.3].contains(r)));
        }
        assert!(preset("fig9").is_none());
    }
}
