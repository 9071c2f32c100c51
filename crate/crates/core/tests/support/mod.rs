//! Independent reference implementations used by property and acceptance
//! tests. Nothing here calls into the library's scoring code.
#![allow(dead_code)]

use halluscope_core::trace::{AttentionRow, Candidate, KeywordClass, TokenRecord};

/// Dense causal attention: `att[i][j]` for `j < i`, `None` when unrecorded.
pub type Dense = Vec<Vec<Option<f64>>>;

/// Expands the penalty recursion over every attention path explicitly.
///
/// For keyword `i`: `h_i + sum over paths i -> v1 -> ... -> vd` of
/// `gamma^d * prod(weights along the path) * h_vd`, where the weight of a
/// step `a -> b` is `att[a][b]` divided by the total attention `a` pays to
/// earlier keywords.
pub fn path_expansion(h: &[f64], keyword: &[bool], att: &Dense, gamma: f64) -> Vec<f64> {
    let n = h.len();
    let step_weights: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|a| {
            if !keyword[a] {
                return Vec::new();
            }
            let edges: Vec<(usize, f64)> = (0..a)
                .filter(|&b| keyword[b])
                .filter_map(|b| att[a][b].map(|w| (b, w)))
                .collect();
            let total: f64 = edges.iter().map(|e| e.1).sum();
            if total <= 0.0 {
                return Vec::new();
            }
            edges.into_iter().map(|(b, w)| (b, w / total)).collect()
        })
        .collect();

    fn walk(
        node: usize,
        depth: i32,
        product: f64,
        gamma: f64,
        h: &[f64],
        steps: &[Vec<(usize, f64)>],
        acc: &mut f64,
    ) {
        for &(next, w) in &steps[node] {
            let p = product * w;
            *acc += gamma.powi(depth + 1) * p * h[next];
            walk(next, depth + 1, p, gamma, h, steps, acc);
        }
    }

    (0..n)
        .map(|i| {
            let mut extra = 0.0;
            walk(i, 0, 1.0, gamma, h, &step_weights, &mut extra);
            h[i] + extra
        })
        .collect()
}

/// Average precision by recounting precision and recall from scratch at
/// every distinct threshold (predict positive when `score >= t`).
pub fn ap_brute_force(scores: &[f64], labels: &[bool]) -> f64 {
    let positives = labels.iter().filter(|&&l| l).count() as f64;
    let mut thresholds = scores.to_vec();
    thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());
    thresholds.dedup();
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for t in thresholds {
        let mut tp = 0.0;
        let mut predicted = 0.0;
        for (s, &l) in scores.iter().zip(labels) {
            if *s >= t {
                predicted += 1.0;
                if l {
                    tp += 1.0;
                }
            }
        }
        let recall = tp / positives;
        ap += (recall - prev_recall) * (tp / predicted);
        prev_recall = recall;
    }
    ap
}

/// `2^H` computed with natural logs: `exp(-sum p ln p)`.
pub fn perplexity(probs: &[f64]) -> f64 {
    (-probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|p| p * p.ln())
        .sum::<f64>())
    .exp()
}

/// Minimal valid token: one candidate carrying the realized probability,
/// the rest in the tail.
pub fn token(
    index: usize,
    sentence: usize,
    prob: f64,
    entropy_term: f64,
    keyword: bool,
) -> TokenRecord {
    let text = format!("w{index}");
    TokenRecord {
        index,
        text: text.clone(),
        sentence_index: sentence,
        logprob: prob.ln(),
        entropy_term,
        is_keyword: keyword,
        keyword_class: if keyword {
            KeywordClass::Noun
        } else {
            KeywordClass::None
        },
        entity_type: None,
        is_tag: false,
        candidates: vec![Candidate::new(text, prob)],
        tail_mass: 1.0 - prob,
    }
}

/// Sparse rows for every keyword that has at least one earlier keyword.
pub fn rows_from_dense(keyword: &[bool], att: &Dense) -> Vec<AttentionRow> {
    (0..keyword.len())
        .filter(|&i| keyword[i] && (0..i).any(|j| keyword[j]))
        .map(|i| AttentionRow {
            i,
            weights: (0..i)
                .filter(|&j| keyword[j])
                .filter_map(|j| att[i][j].map(|w| (j, w)))
                .collect(),
        })
        .collect()
}
