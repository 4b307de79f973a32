use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::combine::FitConfig;
use crate::error::{GmmError, Result};
use crate::game::{GameFixture, DEFAULT_TEMPERATURE_RANGE};
use crate::heuristic::HeuristicSpec;
use crate::rl::RlConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Combined models against the regret and heuristic baselines.
    Baseline,
    /// Every model against a regret model fitted to simulator data.
    Simg,
    /// Varying the fraction of training data available.
    Rho,
    /// Varying how far the regret model's `lambda` is from the fitted one.
    Delta,
    /// Inputs from two different heuristics, tested on both simulators.
    Cross,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Baseline, Suite::Simg, Suite::Rho, Suite::Delta, Suite::Cross];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Baseline => "baseline",
            Suite::Simg => "simg",
            Suite::Rho => "rho",
            Suite::Delta => "delta",
            Suite::Cross => "cross",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = GmmError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| GmmError::Config {
                field: "suite".into(),
                message: format!("unknown suite `{s}`"),
            })
    }
}

fn default_trials() -> u32 {
    20
}
fn default_size() -> usize {
    500
}
fn default_master_seed() -> u64 {
    2010
}
fn default_temperature_range() -> (f64, f64) {
    DEFAULT_TEMPERATURE_RANGE
}
fn default_alt_heuristic() -> HeuristicSpec {
    HeuristicSpec::Constant { p: 0.05 }
}
fn default_pool_rate() -> f64 {
    0.05
}
fn default_suite() -> Suite {
    Suite::Baseline
}
fn default_rho() -> Vec<f64> {
    vec![0.02, 0.05, 0.1, 0.2, 0.5, 1.0]
}
fn default_delta() -> Vec<f64> {
    vec![0.0, 0.25, 0.5, 0.75, 1.0]
}

/// Experiment configuration file (JSON). Only `fixture` is required.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Game fixture path, relative to the config file's directory.
    pub fixture: PathBuf,
    #[serde(default = "default_trials")]
    pub trials: u32,
    #[serde(default = "default_size")]
    pub train_size: usize,
    #[serde(default = "default_size")]
    pub test_size: usize,
    #[serde(default = "default_master_seed")]
    pub master_seed: u64,
    /// Restrict the fixture to its `k` largest companies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgame_top_k: Option<usize>,
    /// Range of the uniformly drawn regret-model temperatures.
    #[serde(default = "default_temperature_range")]
    pub temperature_range: (f64, f64),
    #[serde(default)]
    pub heuristic: HeuristicSpec,
    /// Heuristic behind the second pipeline of the cross-input suite.
    #[serde(default = "default_alt_heuristic")]
    pub alt_heuristic: HeuristicSpec,
    #[serde(default)]
    pub fit: FitConfig,
    /// Learning rate of the pool-weight ascent.
    #[serde(default = "default_pool_rate")]
    pub pool_rate: f64,
    /// Simulator settings; `rl.seed` is replaced by a per-trial derived seed.
    #[serde(default)]
    pub rl: RlConfig,
    #[serde(default = "default_suite")]
    pub suite: Suite,
    #[serde(default = "default_rho")]
    pub rho: Vec<f64>,
    #[serde(default = "default_delta")]
    pub delta: Vec<f64>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn field_err(field: &str, message: impl Into<String>) -> GmmError {
    GmmError::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

impl ExperimentConfig {
    /// Config with every default and the given fixture path.
    pub fn with_fixture(fixture: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            fixture: fixture.into(),
            trials: default_trials(),
            train_size: default_size(),
            test_size: default_size(),
            master_seed: default_master_seed(),
            subgame_top_k: None,
            temperature_range: default_temperature_range(),
            heuristic: HeuristicSpec::Pchange,
            alt_heuristic: default_alt_heuristic(),
            fit: FitConfig::default(),
            pool_rate: default_pool_rate(),
            rl: RlConfig::default(),
            suite: default_suite(),
            rho: default_rho(),
            delta: default_delta(),
            base_dir: PathBuf::new(),
        }
    }

    /// Parses and validates a config; relative paths resolve against `base_dir`.
    pub fn from_json(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| {
            field_err("<root>", format!("{e}"))
        })?;
        cfg.base_dir = base_dir.into();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn fixture_path(&self) -> PathBuf {
        if self.fixture.is_absolute() {
            self.fixture.clone()
        } else {
            self.base_dir.join(&self.fixture)
        }
    }

    /// Loads the fixture, restricted to the top-k subgame when configured.
    pub fn load_fixture(&self) -> Result<GameFixture> {
        let fx = GameFixture::load(self.fixture_path()).map_err(|e| field_err("fixture", e.to_string()))?;
        match self.subgame_top_k {
            Some(k) => fx.top_k(k).map_err(|e| field_err("subgame_top_k", e.to_string())),
            None => Ok(fx),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(field_err("trials", "must be at least 1"));
        }
        if self.train_size < 2 {
            return Err(field_err("train_size", "must be at least 2"));
        }
        if self.test_size == 0 {
            return Err(field_err("test_size", "must be at least 1"));
        }
        if self.subgame_top_k == Some(0) {
            return Err(field_err("subgame_top_k", "must be at least 1"));
        }
        let (lo, hi) = self.temperature_range;
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(field_err(
                "temperature_range",
                format!("[{lo}, {hi}] must be positive and ordered"),
            ));
        }
        self.heuristic
            .validate()
            .map_err(|e| field_err("heuristic", e.to_string()))?;
        self.alt_heuristic
            .validate()
            .map_err(|e| field_err("alt_heuristic", e.to_string()))?;
        self.fit.validate().map_err(|e| field_err("fit", e.to_string()))?;
        if !(self.pool_rate > 0.0 && self.pool_rate.is_finite()) {
            return Err(field_err("pool_rate", "must be positive"));
        }
        self.rl.validate().map_err(|e| field_err("rl", e.to_string()))?;
        for (k, &r) in self.rho.iter().enumerate() {
            if !(r > 0.0 && r <= 1.0) {
                return Err(field_err(&format!("rho[{k}]"), format!("{r} is outside (0, 1]")));
            }
        }
        for (k, &d) in self.delta.iter().enumerate() {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(field_err(&format!("delta[{k}]"), format!("{d} must be >= 0")));
            }
        }
        Ok(())
    }
}

/// Reads and validates a config file; the fixture path resolves against the
/// file's directory.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| GmmError::io(path, e))?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    ExperimentConfig::from_json(&text, dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = ExperimentConfig::from_json(r#"{"fixture": "fx.json"}"#, "/tmp").unwrap();
        assert_eq!(cfg.trials, 20);
        assert_eq!((cfg.train_size, cfg.test_size), (500, 500));
        assert_eq!(cfg.fixture_path(), PathBuf::from("/tmp/fx.json"));
        assert_eq!(cfg.rl.gamma, 0.2);
        assert_eq!(cfg.rl.iterations, 40);
    }

    #[test]
    fn rejects_zero_rho_and_unknown_keys() {
        let err = ExperimentConfig::from_json(r#"{"fixture": "f", "rho": [0.5, 0.0]}"#, "").unwrap_err();
        assert!(matches!(err, GmmError::Config { ref field, .. } if field == "rho[1]"));
        assert!(ExperimentConfig::from_json(r#"{"fixture": "f", "trails": 3}"#, "").is_err());
        assert!(ExperimentConfig::from_json(r#"{"fixture": "f", "delta": [-1]}"#, "").is_err());
    }

    #[test]
    fn json_roundtrip() {
        let mut cfg = ExperimentConfig::with_fixture("fixtures/game.json");
        cfg.subgame_top_k = Some(4);
        cfg.heuristic = HeuristicSpec::Constant { p: 0.3 };
        cfg.fit.learning_rate = 0.1;
        let back = ExperimentConfig::from_json(&cfg.to_json().unwrap(), "").unwrap();
        assert_eq!(back, cfg);
    }
}
