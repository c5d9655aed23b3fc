//! Layered run settings. Sources apply in increasing precedence: preset,
//! config file, `MISSING_TAGS_*` environment variables, command-line flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use missing_tags::experiment::{preset, Command, ExperimentConfig, PRESET_NAMES};
use missing_tags::Estimator;

use crate::CliError;

pub const ENV_PREFIX: &str = "MISSING_TAGS_";

/// Recognised keys, as written in a config file.
pub const KEYS: [&str; 15] = [
    "preset",
    "n",
    "p",
    "rho",
    "trials",
    "seed",
    "estimator",
    "r-min",
    "r-max",
    "threshold",
    "margin",
    "bias",
    "min-sessions",
    "max-sessions",
    "out",
];

/// Every field is optional; unset fields fall through to the layer below.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub preset: Option<String>,
    pub n: Option<usize>,
    pub p: Option<Vec<f64>>,
    pub rho: Option<Vec<f64>>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub estimator: Option<Vec<Estimator>>,
    pub r_min: Option<usize>,
    pub r_max: Option<usize>,
    pub threshold: Option<f64>,
    pub margin: Option<usize>,
    pub bias: Option<f64>,
    pub min_sessions: Option<usize>,
    pub max_sessions: Option<usize>,
    pub out: Option<PathBuf>,
}

fn scalar<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value.parse().map_err(|_| format!("{key}: cannot parse '{value}'"))
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, String> {
    value.split(',').map(|v| scalar(key, v.trim())).collect()
}

impl Settings {
    /// Set one field from its textual form. Keys accept `-` or `_`
    /// separators in any case; list values are comma separated.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let key = key.trim().to_ascii_lowercase().replace('_', "-");
        let value = value.trim();
        match key.as_str() {
            "preset" => self.preset = Some(value.to_owned()),
            "n" => self.n = Some(scalar(&key, value)?),
            "p" => self.p = Some(list(&key, value)?),
            "rho" => self.rho = Some(list(&key, value)?),
            "trials" => self.trials = Some(scalar(&key, value)?),
            "seed" => self.seed = Some(scalar(&key, value)?),
            "estimator" => self.estimator = Some(value.split(',').map(|v| v.trim().parse()).collect::<Result<_, _>>()?),
            "r-min" => self.r_min = Some(scalar(&key, value)?),
            "r-max" => self.r_max = Some(scalar(&key, value)?),
            "threshold" => self.threshold = Some(scalar(&key, value)?),
            "margin" => self.margin = Some(scalar(&key, value)?),
            "bias" => self.bias = Some(scalar(&key, value)?),
            "min-sessions" => self.min_sessions = Some(scalar(&key, value)?),
            "max-sessions" => self.max_sessions = Some(scalar(&key, value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            _ => return Err(format!("unknown key '{key}' (known keys: {})", KEYS.join(", "))),
        }
        Ok(())
    }

    /// Parse `key = value` lines. Blank lines and lines starting with `#`
    /// are skipped.
    pub fn parse_file(text: &str) -> Result<Self, String> {
        let mut settings = Settings::default();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", idx + 1))?;
            settings.set(key, value).map_err(|e| format!("line {}: {e}", idx + 1))?;
        }
        Ok(settings)
    }

    pub fn load_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("config file {}: {e}", path.display())))?;
        Self::parse_file(&text).map_err(|e| CliError::Config(format!("config file {}: {e}", path.display())))
    }

    /// Collect `MISSING_TAGS_<KEY>` variables. `MISSING_TAGS_CONFIG` names a
    /// config file and is handled by the caller.
    pub fn from_env(vars: impl IntoIterator<Item = (String, String)>) -> Result<Self, CliError> {
        let mut settings = Settings::default();
        for (name, value) in vars {
            let Some(key) = name.strip_prefix(ENV_PREFIX) else {
                continue;
            };
            if key == "CONFIG" {
                continue;
            }
            settings.set(key, &value).map_err(|e| CliError::Config(format!("environment {name}: {e}")))?;
        }
        Ok(settings)
    }

    /// Fields set in `higher` win.
    pub fn overlay(self, higher: Settings) -> Settings {
        Settings {
            preset: higher.preset.or(self.preset),
            n: higher.n.or(self.n),
            p: higher.p.or(self.p),
            rho: higher.rho.or(self.rho),
            trials: higher.trials.or(self.trials),
            seed: higher.seed.or(self.seed),
            estimator: higher.estimator.or(self.estimator),
            r_min: higher.r_min.or(self.r_min),
            r_max: higher.r_max.or(self.r_max),
            threshold: higher.threshold.or(self.threshold),
            margin: higher.margin.or(self.margin),
            bias: higher.bias.or(self.bias),
            min_sessions: higher.min_sessions.or(self.min_sessions),
            max_sessions: higher.max_sessions.or(self.max_sessions),
            out: higher.out.or(self.out),
        }
    }

    /// Build and validate the configuration for `command`.
    pub fn resolve(&self, command: Command) -> Result<ExperimentConfig, CliError> {
        let mut config = match &self.preset {
            Some(name) => {
                let (preset_command, config) = preset(name).ok_or_else(|| {
                    CliError::Config(format!("unknown preset '{name}' (known: {})", PRESET_NAMES.join(", ")))
                })?;
                if preset_command != command {
                    return Err(CliError::Config(format!(
                        "preset '{name}' belongs to `{}`, not `{}`",
                        preset_command.name(),
                        command.name()
                    )));
                }
                config
            }
            None => default_config(command),
        };
        let policy = &mut config.policy;
        if let Some(v) = self.threshold {
            policy.threshold = v;
        }
        if let Some(v) = self.margin {
            policy.margin_sessions = v;
        }
        if let Some(v) = self.bias {
            policy.bias_addend = v;
        }
        if let Some(v) = self.min_sessions {
            policy.min_sessions = v;
        }
        if let Some(v) = self.max_sessions {
            policy.max_sessions = v;
        }
        config.n_tags = self.n.unwrap_or(config.n_tags);
        config.ps = self.p.clone().unwrap_or(config.ps);
        config.rhos = self.rho.clone().unwrap_or(config.rhos);
        config.trials = self.trials.unwrap_or(config.trials);
        config.seed = self.seed.unwrap_or(config.seed);
        config.estimators = self.estimator.clone().unwrap_or(config.estimators);
        config.r_min = self.r_min.unwrap_or(config.r_min);
        config.r_max = self.r_max.unwrap_or(config.r_max);
        config.validate_for(command).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(config)
    }
}

fn default_config(command: Command) -> ExperimentConfig {
    let base = ExperimentConfig::default();
    match command {
        Command::Simulate | Command::Correlated => base,
        Command::Stop => ExperimentConfig { estimators: vec![Estimator::Regm], ..base },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_parsing() {
        let s = Settings::parse_file("# sweep\n\nn = 200\np=0.1, 0.2\nestimator = regm,schnabel\nR_MIN = 3\n").unwrap();
        assert_eq!(s.n, Some(200));
        assert_eq!(s.p, Some(vec![0.1, 0.2]));
        assert_eq!(s.estimator, Some(vec![Estimator::Regm, Estimator::Schnabel]));
        assert_eq!(s.r_min, Some(3));
        assert_eq!(Settings::parse_file("n 200").unwrap_err(), "line 1: expected key = value");
        assert!(Settings::parse_file("colour = red").unwrap_err().contains("unknown key 'colour'"));
        assert!(Settings::parse_file("trials = many").unwrap_err().contains("trials: cannot parse 'many'"));
    }

    #[test]
    fn env_variables_use_the_prefix() {
        let vars =
            [("MISSING_TAGS_TRIALS", "7"), ("MISSING_TAGS_R_MAX", "5"), ("MISSING_TAGS_CONFIG", "x"), ("HOME", "/")];
        let s = Settings::from_env(vars.map(|(k, v)| (k.to_owned(), v.to_owned()))).unwrap();
        assert_eq!(s, Settings { trials: Some(7), r_max: Some(5), ..Default::default() });
        assert!(Settings::from_env([("MISSING_TAGS_BOGUS".to_owned(), "1".to_owned())]).is_err());
    }

    #[test]
    fn higher_layers_win() {
        let file = Settings { n: Some(100), trials: Some(5), ..Default::default() };
        let flags = Settings { trials: Some(9), ..Default::default() };
        let merged = file.overlay(flags);
        assert_eq!((merged.n, merged.trials), (Some(100), Some(9)));
    }

    #[test]
    fn presets_resolve_and_can_be_overridden() {
        let s = Settings { preset: Some("fig5".into()), trials: Some(10), ..Default::default() };
        let config = s.resolve(Command::Correlated).unwrap();
        assert_eq!((config.n_tags, config.trials, config.rhos.clone()), (500, 10, vec![0.1, 0.3]));
        assert!(
            matches!(s.resolve(Command::Simulate), Err(CliError::Config(m)) if m.contains("belongs to `correlated`"))
        );
        let unknown = Settings { preset: Some("fig9".into()), ..Default::default() };
        assert!(unknown.resolve(Command::Simulate).is_err());
    }

    #[test]
    fn correlated_without_rho_points_to_simulate() {
        let err = Settings::default().resolve(Command::Correlated).unwrap_err();
        assert!(err.to_string().contains("use `simulate`"), "{err}");
    }
}
