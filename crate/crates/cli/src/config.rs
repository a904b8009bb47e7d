//! Optional TOML configuration. Every key is optional; command-line flags
//! take precedence over the file, the file over built-in defaults.
//!
//! ```toml
//! [search]
//! restarts = 100
//! seed = 1
//! budget = 1500
//! mu_schedule = [1.0, 10.0, 100.0]
//! denominator_bound = 8
//!
//! [tolerances]
//! accept = 1e-10
//! gradient = 1e-6
//! ```

use std::path::Path;

use fibcurv::search::SearchConfig;
use serde::Deserialize;
use thiserror::Error;

pub const GRADIENT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {0}: {1}")]
    Io(String, std::io::Error),
    #[error("parsing {0}: {1}")]
    Toml(String, toml::de::Error),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SearchSection {
    pub restarts: Option<usize>,
    pub seed: Option<u64>,
    pub budget: Option<usize>,
    pub mu_schedule: Option<Vec<f64>>,
    pub denominator_bound: Option<u32>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Objective below which a candidate is rationalised.
    pub accept: Option<f64>,
    /// Largest relative error allowed by the gradient check.
    pub gradient: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub search: SearchSection,
    pub tolerances: Tolerances,
}

impl Config {
    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let cfg: Config = toml::from_str(text).map_err(|e| ConfigError::Toml(origin.into(), e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let name = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(name.clone(), e))?;
        Config::parse(&text, &name)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.into()));
        if self.search.restarts == Some(0) {
            return bad("search.restarts must be at least 1");
        }
        if let Some(mu) = &self.search.mu_schedule {
            if mu.is_empty() || mu.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
                return bad("search.mu_schedule must be a non-empty list of positive numbers");
            }
        }
        for (name, v) in [("accept", self.tolerances.accept), ("gradient", self.tolerances.gradient)] {
            if v.is_some_and(|t| !(t.is_finite() && t > 0.0)) {
                return bad(&format!("tolerances.{name} must be positive"));
            }
        }
        Ok(())
    }

    pub fn search_config(&self) -> SearchConfig {
        let mut c = SearchConfig::default();
        let s = &self.search;
        c.restarts = s.restarts.unwrap_or(c.restarts);
        c.seed = s.seed.unwrap_or(c.seed);
        c.budget = s.budget.unwrap_or(c.budget);
        c.denominator_bound = s.denominator_bound.unwrap_or(c.denominator_bound);
        if let Some(mu) = &s.mu_schedule {
            c.mu_schedule = mu.clone();
        }
        c.accept = self.tolerances.accept.unwrap_or(c.accept);
        c
    }

    pub fn gradient_tolerance(&self) -> f64 {
        self.tolerances.gradient.unwrap_or(GRADIENT_TOLERANCE)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_without_file() {
        let c = Config::default();
        assert_eq!(c.search_config(), SearchConfig::default());
        assert_eq!(c.gradient_tolerance(), 1e-6);
    }

    #[test]
    fn file_overrides() {
        let c = Config::parse("[search]\nseed = 9\n[tolerances]\naccept = 1e-12\n", "test").unwrap();
        let s = c.search_config();
        assert_eq!((s.seed, s.accept, s.restarts), (9, 1e-12, 100));
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        assert!(Config::parse("[search]\nseeds = 9\n", "test").is_err());
        assert!(Config::parse("[tolerances]\ngradient = -1.0\n", "test").is_err());
        assert!(Config::parse("[search]\nrestarts = 0\n", "test").is_err());
    }
}
