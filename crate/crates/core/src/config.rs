//! Run configuration: a `key = value` file, located by `LCRIT_CONFIG` when set.

use crate::auxseries::{BOUNDARY_SAMPLES, DEFAULT_DELTA, SERIES_CUTOFF};
use crate::lfengine::EvalConfig;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const CONFIG_ENV: &str = "LCRIT_CONFIG";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("reading {0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("parsing config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub precision_bits: u32,
    pub euler_maclaurin_cutoff: u64,
    pub bernoulli_terms: usize,
    pub branch_anchor_sigma: f64,
    pub branch_resolution: f64,
    /// Primes are sieved up to this bound.
    pub sieve_limit: u64,
    /// Cutoff of the smoothed series route for S₁, S₂.
    pub series_cutoff: u64,
    pub boundary_samples: usize,
    pub delta: f64,
    pub seed: u64,
    pub tau_max_height_bits: u32,
    /// Rouché circle constant for the Thm-4 setting: "s2", "s2-literal" or "s1".
    pub circle_source: String,
}

impl Default for Config {
    fn default() -> Self {
        let e = EvalConfig::default();
        Self {
            precision_bits: e.precision_bits,
            euler_maclaurin_cutoff: e.euler_maclaurin_cutoff,
            bernoulli_terms: e.bernoulli_terms,
            branch_anchor_sigma: e.branch_anchor_sigma,
            branch_resolution: e.branch_resolution,
            sieve_limit: 2_000_000,
            series_cutoff: SERIES_CUTOFF,
            boundary_samples: BOUNDARY_SAMPLES,
            delta: DEFAULT_DELTA,
            seed: 0,
            tau_max_height_bits: 480,
            circle_source: "s2".into(),
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let c: Config = toml::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(path.to_path_buf(), e))?;
        Self::parse(&text)
    }

    /// `explicit`, else `$LCRIT_CONFIG`, else defaults.
    pub fn resolve(explicit: Option<&Path>) -> Result<Self, ConfigError> {
        if let Some(p) = explicit {
            return Self::load(p);
        }
        match std::env::var_os(CONFIG_ENV) {
            Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
            _ => Ok(Self::default()),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.eval().validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.sieve_limit < 1000 {
            return Err(ConfigError::Invalid("sieve_limit must be >= 1000".into()));
        }
        if !(self.delta > 0.5 && self.delta < 1.0) {
            return Err(ConfigError::Invalid("delta must lie in (1/2, 1)".into()));
        }
        if self.boundary_samples < 8 {
            return Err(ConfigError::Invalid("boundary_samples must be >= 8".into()));
        }
        self.circle_source
            .parse::<crate::auxseries::CircleSource>()
            .map_err(ConfigError::Invalid)?;
        Ok(())
    }

    pub fn eval(&self) -> EvalConfig {
        EvalConfig {
            precision_bits: self.precision_bits,
            euler_maclaurin_cutoff: self.euler_maclaurin_cutoff,
            bernoulli_terms: self.bernoulli_terms,
            branch_anchor_sigma: self.branch_anchor_sigma,
            branch_resolution: self.branch_resolution,
        }
    }

    pub fn circle_source(&self) -> crate::auxseries::CircleSource {
        self.circle_source.parse().expect("validated")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_value_file() {
        let c = Config::parse("seed = 9\nsieve_limit = 50000\ncircle_source = \"s1\"\n").unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.sieve_limit, 50_000);
        assert_eq!(c.delta, DEFAULT_DELTA);
        assert!(Config::parse("bogus = 1").is_err());
        assert!(Config::parse("delta = 0.3").is_err());
    }
}
