//! Ranking and correlation metrics.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("no samples")]
    Empty,
    #[error("no positive samples, recall is undefined")]
    NoPositives,
    #[error("no negative samples")]
    NoNegatives,
    #[error("inputs have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least two observations, got {0}")]
    TooFewSamples(usize),
    #[error("zero variance, correlation is undefined")]
    ZeroVariance,
    #[error("non-finite value at position {0}")]
    NonFinite(usize),
}

/// A scored sample; higher scores mean "more likely positive".
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankedSample {
    pub score: f64,
    pub positive: bool,
}

impl RankedSample {
    pub fn new(score: f64, positive: bool) -> Self {
        RankedSample { score, positive }
    }
}

fn check_finite(values: impl Iterator<Item = f64>) -> Result<(), MetricError> {
    for (k, v) in values.enumerate() {
        if !v.is_finite() {
            return Err(MetricError::NonFinite(k));
        }
    }
    Ok(())
}

/// Non-interpolated average precision, `sum_n (R_n - R_{n-1}) * P_n`, taken
/// over distinct score thresholds in descending order. Samples sharing a
/// score enter the ranking together.
pub fn average_precision(samples: &[RankedSample]) -> Result<f64, MetricError> {
    if samples.is_empty() {
        return Err(MetricError::Empty);
    }
    check_finite(samples.iter().map(|s| s.score))?;
    let positives = samples.iter().filter(|s| s.positive).count();
    if positives == 0 {
        return Err(MetricError::NoPositives);
    }

    let mut order: Vec<&RankedSample> = samples.iter().collect();
    order.sort_by(|a, b| b.score.total_cmp(&a.score));

    let mut ap = 0.0;
    let mut seen = 0usize;
    let mut hits = 0usize;
    let mut prev_recall = 0.0;
    for group in order.chunk_by(|a, b| a.score == b.score) {
        seen += group.len();
        hits += group.iter().filter(|s| s.positive).count();
        let recall = hits as f64 / positives as f64;
        let precision = hits as f64 / seen as f64;
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    Ok(ap)
}

/// Pearson product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, MetricError> {
    if x.len() != y.len() {
        return Err(MetricError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(MetricError::TooFewSamples(x.len()));
    }
    check_finite(x.iter().copied())?;
    check_finite(y.iter().copied())?;

    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(MetricError::ZeroVariance);
    }
    Ok((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// 1-based ranks; tied values share the mean of the ranks they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(Ordering::Equal));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Positions start..end hold ranks start+1 ..= end.
        let rank = (start + 1 + end) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = rank;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64, MetricError> {
    if x.len() != y.len() {
        return Err(MetricError::LengthMismatch(x.len(), y.len()));
    }
    check_finite(x.iter().copied())?;
    check_finite(y.iter().copied())?;
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Mean of true-positive and true-negative rates, predicting positive when
/// `score > threshold`.
pub fn balanced_accuracy(samples: &[RankedSample], threshold: f64) -> Result<f64, MetricError> {
    let (mut tp, mut p, mut tn, mut n) = (0usize, 0usize, 0usize, 0usize);
    for s in samples {
        let predicted = s.score > threshold;
        if s.positive {
            p += 1;
            tp += predicted as usize;
        } else {
            n += 1;
            tn += !predicted as usize;
        }
    }
    if p == 0 {
        return Err(MetricError::NoPositives);
    }
    if n == 0 {
        return Err(MetricError::NoNegatives);
    }
    Ok((tp as f64 / p as f64 + tn as f64 / n as f64) / 2.0)
}

/// Threshold maximizing balanced accuracy, searched over the observed scores
/// plus "everything positive". Ties go to the lowest threshold.
pub fn best_threshold(samples: &[RankedSample]) -> Result<(f64, f64), MetricError> {
    if samples.is_empty() {
        return Err(MetricError::Empty);
    }
    check_finite(samples.iter().map(|s| s.score))?;
    let mut grid: Vec<f64> = samples.iter().map(|s| s.score).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid.insert(0, f64::NEG_INFINITY);

    let mut best = (grid[0], balanced_accuracy(samples, grid[0])?);
    for &t in &grid[1..] {
        let ba = balanced_accuracy(samples, t)?;
        if ba > best.1 {
            best = (t, ba);
        }
    }
    Ok(best)
}
