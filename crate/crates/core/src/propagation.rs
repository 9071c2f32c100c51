//! Hallucination propagation between keywords.
//!
//! Each keyword inherits a penalty from the keywords before it: the
//! attention-weighted mean of their already-penalized scores, scaled by
//! `gamma`. Because earlier scores already carry their own penalties, a score
//! reaches `d` hops downstream scaled by `gamma^d`.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::trace::{AttentionRow, TokenRecord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PropagationError {
    #[error("{scores} scores for {tokens} tokens")]
    LengthMismatch { scores: usize, tokens: usize },
    #[error("attention row for token {0} outside the passage")]
    RowOutOfRange(usize),
    #[error("attention row for token {0}, which is not a keyword")]
    RowForNonKeyword(usize),
    #[error("two attention rows for token {0}")]
    DuplicateRow(usize),
    #[error("attention row {i} points at token {j}, which does not precede it")]
    NonCausal { i: usize, j: usize },
}

/// Scores after propagation, indexed by token.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagated {
    pub h_hat: Vec<f64>,
    /// Weighted sum of earlier penalized scores (before `gamma`).
    pub penalty: Vec<f64>,
}

/// Normalizes a row so its weights sum to one. A row whose weights sum to
/// zero yields no weights, i.e. no penalty.
pub fn normalize_weights(row: &AttentionRow) -> Vec<(usize, f64)> {
    normalize(row.weights.iter().copied())
}

fn normalize(weights: impl Iterator<Item = (usize, f64)> + Clone) -> Vec<(usize, f64)> {
    let total: f64 = weights.clone().map(|(_, a)| a).sum();
    if !(total > 0.0) {
        return Vec::new();
    }
    weights.map(|(j, a)| (j, a / total)).collect()
}

/// Applies penalty propagation to raw scores `h` (indexed by token).
///
/// Rows may come in any order. Weights pointing at non-keywords carry no
/// penalty and are dropped before normalization.
pub fn propagate(
    h: &[f64],
    tokens: &[TokenRecord],
    rows: &[AttentionRow],
    gamma: f64,
) -> Result<Propagated, PropagationError> {
    let n = tokens.len();
    if h.len() != n {
        return Err(PropagationError::LengthMismatch {
            scores: h.len(),
            tokens: n,
        });
    }

    let mut by_token: Vec<Option<&AttentionRow>> = vec![None; n];
    for row in rows {
        let slot = by_token
            .get_mut(row.i)
            .ok_or(PropagationError::RowOutOfRange(row.i))?;
        if !tokens[row.i].is_scored_keyword() {
            return Err(PropagationError::RowForNonKeyword(row.i));
        }
        if slot.is_some() {
            return Err(PropagationError::DuplicateRow(row.i));
        }
        if let Some(&(j, _)) = row.weights.iter().find(|&&(j, _)| j >= row.i) {
            return Err(PropagationError::NonCausal { i: row.i, j });
        }
        *slot = Some(row);
    }

    let mut h_hat = h.to_vec();
    let mut penalty = vec![0.0; n];
    for i in 0..n {
        let Some(row) = by_token[i] else { continue };
        let weights = normalize(
            row.weights
                .iter()
                .copied()
                .filter(|&(j, _)| tokens[j].is_scored_keyword()),
        );
        let p: f64 = weights.iter().map(|&(j, w)| w * h_hat[j]).sum();
        penalty[i] = p;
        h_hat[i] = h[i] + gamma * p;
    }

    Ok(Propagated { h_hat, penalty })
}
