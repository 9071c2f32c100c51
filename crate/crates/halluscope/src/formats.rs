//! On-disk JSON formats: traces, annotations, document-frequency counts,
//! IDF tables, score sets and reports.

use std::collections::BTreeMap;
use std::fmt;

use halluscope_core::annotation::AnnotationSet;
use halluscope_core::idf::{IdfError, IdfTable};
use halluscope_core::scoring::ScoreSet;
use halluscope_core::trace::{PassageTrace, SCHEMA_VERSION};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormatError {
    /// Malformed JSON or a field with the wrong shape. `path` points at the
    /// offending field, e.g. `tokens[3].logprob`.
    #[error("{}: {message}", if path.is_empty() || path == "." { "document" } else { path.as_str() })]
    Json { path: String, message: String },
    #[error("unsupported schema_version {found} (this build reads {SCHEMA_VERSION})")]
    SchemaVersion { found: u64 },
    #[error("tokens[{token}].candidates: probabilities are not in non-increasing order")]
    UnsortedCandidates { token: usize },
    #[error(transparent)]
    Idf(#[from] IdfError),
}

fn from_value<T: DeserializeOwned>(value: serde_json::Value) -> Result<T, FormatError> {
    serde_path_to_error::deserialize(value).map_err(|e| FormatError::Json {
        path: e.path().to_string(),
        message: e.into_inner().to_string(),
    })
}

fn from_bytes<T: DeserializeOwned>(raw: &[u8]) -> Result<T, FormatError> {
    let mut de = serde_json::Deserializer::from_slice(raw);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| FormatError::Json {
        path: e.path().to_string(),
        message: e.into_inner().to_string(),
    })?;
    de.end().map_err(|e| FormatError::Json {
        path: String::new(),
        message: e.to_string(),
    })?;
    Ok(value)
}

/// Parses one trace document.
///
/// The schema version is checked before anything else so a newer document
/// is reported as such rather than as a pile of unknown fields.
pub fn parse_trace(raw: &[u8]) -> Result<PassageTrace, FormatError> {
    let value: serde_json::Value = from_bytes(raw)?;
    match value
        .get("schema_version")
        .and_then(serde_json::Value::as_u64)
    {
        Some(v) if v == u64::from(SCHEMA_VERSION) => {}
        Some(found) => return Err(FormatError::SchemaVersion { found }),
        None => {
            return Err(FormatError::Json {
                path: "schema_version".into(),
                message: "missing or not an unsigned integer".into(),
            })
        }
    }
    let trace: PassageTrace = from_value(value)?;
    if let Some(token) = trace.first_unsorted_candidates() {
        return Err(FormatError::UnsortedCandidates { token });
    }
    Ok(trace)
}

pub fn trace_to_json(trace: &PassageTrace) -> String {
    to_pretty(trace)
}

/// Parses an annotation document. Labels are case-sensitive and passage ids
/// must be unique.
pub fn parse_annotations(raw: &[u8]) -> Result<AnnotationSet, FormatError> {
    from_bytes(raw)
}

/// Document-frequency counts as produced by a corpus counter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocFreqCounts {
    pub num_docs: u64,
    pub doc_freq: BTreeMap<String, u64>,
}

pub fn parse_counts(raw: &[u8]) -> Result<DocFreqCounts, FormatError> {
    from_bytes(raw)
}

pub fn build_idf(counts: DocFreqCounts, default_df: u64) -> Result<IdfTable, FormatError> {
    Ok(IdfTable::with_default(
        counts.doc_freq,
        counts.num_docs,
        default_df,
    )?)
}

/// Parses an IDF table and checks its frequency bounds.
pub fn parse_idf(raw: &[u8]) -> Result<IdfTable, FormatError> {
    let table: IdfTable = from_bytes(raw)?;
    table.check()?;
    Ok(table)
}

pub fn idf_to_json(table: &IdfTable) -> String {
    to_pretty(table)
}

pub fn parse_score_set(raw: &[u8]) -> Result<ScoreSet, FormatError> {
    from_bytes(raw)
}

/// Serializes with every score rounded to the fixed output precision.
pub fn score_set_to_json(set: &ScoreSet) -> String {
    to_pretty(&set.rounded())
}

pub fn to_pretty<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("in-memory values always serialize");
    s.push('\n');
    s
}

/// Formats a ratio as a percentage with two decimals, e.g. `0.8979` -> `89.79`.
pub struct Percent(pub f64);

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2}", self.0 * 100.0)
    }
}
