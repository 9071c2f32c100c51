use alloc::format;
use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_GAMMA: f64 = 0.9;
pub const DEFAULT_RHO: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("gamma {0} outside [0, 1]")]
    Gamma(f64),
    #[error("rho {0} outside [0, 1)")]
    Rho(f64),
    #[error("unknown feature {0:?} (expected keyword, penalty, type or idf)")]
    UnknownFeature(String),
}

/// A switchable stage of the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Feature {
    /// Aggregate over keywords only instead of every non-tag token.
    Keyword,
    /// Attention-weighted penalty propagation.
    Penalty,
    /// Candidate-set renormalization on a typed trace.
    Type,
    /// IDF reweighting of the candidate set.
    Idf,
}

impl Feature {
    pub const ALL: [Feature; 4] = [
        Feature::Keyword,
        Feature::Penalty,
        Feature::Type,
        Feature::Idf,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Feature::Keyword => "keyword",
            Feature::Penalty => "penalty",
            Feature::Type => "type",
            Feature::Idf => "idf",
        }
    }
}

impl FromStr for Feature {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "keyword" => Ok(Feature::Keyword),
            "penalty" => Ok(Feature::Penalty),
            "type" => Ok(Feature::Type),
            "idf" => Ok(Feature::Idf),
            other => Err(ConfigError::UnknownFeature(other.into())),
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Per-hop decay of propagated penalties, in `[0, 1]`.
    pub gamma: f64,
    /// Candidate-set threshold, in `[0, 1)`. Comparison is strict.
    pub rho: f64,
    pub use_keywords: bool,
    pub use_penalty: bool,
    pub use_type: bool,
    pub use_idf: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self::full(DEFAULT_GAMMA, DEFAULT_RHO)
    }
}

impl PipelineConfig {
    /// Every feature on.
    pub fn full(gamma: f64, rho: f64) -> Self {
        PipelineConfig {
            gamma,
            rho,
            use_keywords: true,
            use_penalty: true,
            use_type: true,
            use_idf: true,
        }
    }

    /// Every feature off: the plain mean of token scores.
    pub fn baseline() -> Self {
        PipelineConfig {
            use_keywords: false,
            use_penalty: false,
            use_type: false,
            use_idf: false,
            ..Self::default()
        }
    }

    pub fn enabled(&self, feature: Feature) -> bool {
        match feature {
            Feature::Keyword => self.use_keywords,
            Feature::Penalty => self.use_penalty,
            Feature::Type => self.use_type,
            Feature::Idf => self.use_idf,
        }
    }

    pub fn set(&mut self, feature: Feature, on: bool) {
        match feature {
            Feature::Keyword => self.use_keywords = on,
            Feature::Penalty => self.use_penalty = on,
            Feature::Type => self.use_type = on,
            Feature::Idf => self.use_idf = on,
        }
    }

    pub fn with(mut self, feature: Feature, on: bool) -> Self {
        self.set(feature, on);
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(ConfigError::Gamma(self.gamma));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(ConfigError::Rho(self.rho));
        }
        Ok(())
    }

    /// Whether token probabilities go through candidate-set correction.
    pub fn corrects_probabilities(&self) -> bool {
        self.use_type || self.use_idf
    }

    /// Stable one-line identity of this configuration.
    pub fn fingerprint(&self) -> String {
        let flag = |on: bool| if on { 1 } else { 0 };
        format!(
            "gamma={};rho={};keyword={};penalty={};type={};idf={}",
            self.gamma,
            self.rho,
            flag(self.use_keywords),
            flag(self.use_penalty),
            flag(self.use_type),
            flag(self.use_idf)
        )
    }
}
