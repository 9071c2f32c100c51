//! Token, sentence and passage hallucination scores.
//!
//! A token's score is `-ln p + 2^H`: the surprisal of the realized token plus
//! the exponentiated base-2 entropy of the distribution it was drawn from.
//! Sentence and passage scores average token scores over keywords; tag tokens
//! never count.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::PipelineConfig;
use crate::trace::{TokenRecord, Variant};

/// Decimal precision kept when a [`ScoreSet`] is serialized.
pub const SERIALIZED_PRECISION: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScoreError {
    #[error("token {index}: probability {prob} is not in (0, 1]")]
    Probability { index: usize, prob: f64 },
    #[error("token {index}: entropy term {value} is not a finite value >= 1")]
    EntropyTerm { index: usize, value: f64 },
    #[error("sentence {0} has no tokens")]
    EmptySentence(usize),
    #[error("sentence {0} contains only tag tokens")]
    TagOnlySentence(usize),
    #[error("passage has no scoreable tokens")]
    EmptyPassage,
}

impl ScoreError {
    /// Attaches the token index to a per-token error.
    pub fn at(self, index: usize) -> Self {
        match self {
            ScoreError::Probability { prob, .. } => ScoreError::Probability { index, prob },
            ScoreError::EntropyTerm { value, .. } => ScoreError::EntropyTerm { index, value },
            other => other,
        }
    }
}

/// Which tokens an aggregate averages over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weighting {
    /// Keywords only, falling back to all non-tag tokens when there are none.
    Keywords,
    /// Every non-tag token with weight one.
    AllTokens,
}

impl Weighting {
    pub fn for_config(config: &PipelineConfig) -> Self {
        if config.use_keywords {
            Weighting::Keywords
        } else {
            Weighting::AllTokens
        }
    }
}

/// `-ln(prob) + entropy_term`.
pub fn token_score(prob: f64, entropy_term: f64) -> Result<f64, ScoreError> {
    if !(prob > 0.0 && prob <= 1.0) {
        return Err(ScoreError::Probability { index: 0, prob });
    }
    if !(entropy_term >= 1.0) || !entropy_term.is_finite() {
        return Err(ScoreError::EntropyTerm {
            index: 0,
            value: entropy_term,
        });
    }
    Ok(-libm::log(prob) + entropy_term)
}

fn mean_of<'a>(
    scores: &[f64],
    tokens: impl Iterator<Item = &'a TokenRecord> + Clone,
    weighting: Weighting,
) -> Option<f64> {
    let mean = |keep: &dyn Fn(&TokenRecord) -> bool| {
        let (sum, n) = tokens
            .clone()
            .filter(|t| !t.is_tag && keep(t))
            .fold((0.0, 0usize), |(s, n), t| (s + scores[t.index], n + 1));
        (n > 0).then(|| sum / n as f64)
    };
    match weighting {
        Weighting::Keywords => mean(&|t| t.is_keyword).or_else(|| mean(&|_| true)),
        Weighting::AllTokens => mean(&|_| true),
    }
}

/// Mean score of one sentence. `scores` is indexed by token index.
pub fn sentence_score(
    scores: &[f64],
    tokens: &[TokenRecord],
    sentence_index: usize,
    weighting: Weighting,
) -> Result<f64, ScoreError> {
    let in_sentence = tokens
        .iter()
        .filter(move |t| t.sentence_index == sentence_index);
    if in_sentence.clone().next().is_none() {
        return Err(ScoreError::EmptySentence(sentence_index));
    }
    mean_of(scores, in_sentence, weighting).ok_or(ScoreError::TagOnlySentence(sentence_index))
}

/// Mean score of the whole passage. `scores` is indexed by token index.
pub fn passage_score(
    scores: &[f64],
    tokens: &[TokenRecord],
    weighting: Weighting,
) -> Result<f64, ScoreError> {
    mean_of(scores, tokens.iter(), weighting).ok_or(ScoreError::EmptyPassage)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TokenScore {
    pub index: usize,
    /// Score before propagation.
    pub h: f64,
    /// Score after propagation.
    pub h_hat: f64,
    /// Attention-weighted sum of earlier penalized keyword scores, before
    /// the `gamma` factor; zero for non-keywords.
    pub penalty: f64,
}

/// Scores of one passage under one configuration.
///
/// `token_scores` lists every non-tag token in trace order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreSet {
    pub passage_id: String,
    pub variant: Variant,
    pub config_fingerprint: String,
    pub config: PipelineConfig,
    pub token_scores: Vec<TokenScore>,
    pub sentence_scores: Vec<f64>,
    pub passage_score: f64,
}

/// Rounds to the nearest multiple of [`SERIALIZED_PRECISION`].
pub fn round_serialized(x: f64) -> f64 {
    let scale = 1.0 / SERIALIZED_PRECISION;
    let r = libm::round(x * scale) / scale;
    // Strip the sign of negative zero so output text is stable.
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

impl ScoreSet {
    pub fn sentence_count(&self) -> usize {
        self.sentence_scores.len()
    }

    /// Copy with every score rounded to the serialized precision.
    pub fn rounded(&self) -> ScoreSet {
        ScoreSet {
            token_scores: self
                .token_scores
                .iter()
                .map(|t| TokenScore {
                    index: t.index,
                    h: round_serialized(t.h),
                    h_hat: round_serialized(t.h_hat),
                    penalty: round_serialized(t.penalty),
                })
                .collect(),
            sentence_scores: self
                .sentence_scores
                .iter()
                .copied()
                .map(round_serialized)
                .collect(),
            passage_score: round_serialized(self.passage_score),
            ..self.clone()
        }
    }
}
