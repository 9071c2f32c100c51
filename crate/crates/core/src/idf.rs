//! Token inverse document frequency.

use alloc::collections::BTreeMap;
use alloc::string::String;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdfError {
    #[error("num_docs must be at least 1")]
    EmptyCorpus,
    #[error("document frequency of {token:?} is {df}, must be at least 1")]
    ZeroFrequency { token: String, df: u64 },
    #[error("document frequency of {token:?} is {df}, exceeds num_docs {num_docs}")]
    FrequencyAboveCorpus {
        token: String,
        df: u64,
        num_docs: u64,
    },
    #[error("default_df {default_df} outside [1, {num_docs}]")]
    DefaultFrequency { default_df: u64, num_docs: u64 },
}

/// Anything that can weight a token by its IDF.
pub trait IdfSource {
    fn idf(&self, token: &str) -> f64;
}

impl<T: IdfSource + ?Sized> IdfSource for &T {
    fn idf(&self, token: &str) -> f64 {
        (**self).idf(token)
    }
}

/// `idf(t) = ln(num_docs / df(t))`, with unseen tokens falling back to
/// `default_df`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdfTable {
    pub num_docs: u64,
    #[serde(default = "default_df")]
    pub default_df: u64,
    pub doc_freq: BTreeMap<String, u64>,
}

fn default_df() -> u64 {
    1
}

impl IdfTable {
    /// Builds a table with `default_df = 1`.
    pub fn build(doc_freq: BTreeMap<String, u64>, num_docs: u64) -> Result<Self, IdfError> {
        Self::with_default(doc_freq, num_docs, 1)
    }

    pub fn with_default(
        doc_freq: BTreeMap<String, u64>,
        num_docs: u64,
        default_df: u64,
    ) -> Result<Self, IdfError> {
        let table = IdfTable {
            num_docs,
            default_df,
            doc_freq,
        };
        table.check()?;
        Ok(table)
    }

    /// Checks the frequency bounds; parsed tables should go through this.
    pub fn check(&self) -> Result<(), IdfError> {
        if self.num_docs == 0 {
            return Err(IdfError::EmptyCorpus);
        }
        if self.default_df == 0 || self.default_df > self.num_docs {
            return Err(IdfError::DefaultFrequency {
                default_df: self.default_df,
                num_docs: self.num_docs,
            });
        }
        for (token, &df) in &self.doc_freq {
            if df == 0 {
                return Err(IdfError::ZeroFrequency {
                    token: token.clone(),
                    df,
                });
            }
            if df > self.num_docs {
                return Err(IdfError::FrequencyAboveCorpus {
                    token: token.clone(),
                    df,
                    num_docs: self.num_docs,
                });
            }
        }
        Ok(())
    }

    pub fn doc_freq(&self, token: &str) -> u64 {
        self.doc_freq
            .get(token)
            .copied()
            .unwrap_or(self.default_df)
            .clamp(1, self.num_docs.max(1))
    }
}

impl IdfSource for IdfTable {
    fn idf(&self, token: &str) -> f64 {
        libm::log(self.num_docs as f64 / self.doc_freq(token) as f64)
    }
}
