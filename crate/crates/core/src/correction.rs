//! Probability correction for typed traces.
//!
//! On a typed trace the candidate distribution at each position was produced
//! with an entity-type tag in the context. Correction keeps the candidates
//! above `rho` (plus the realized token), renormalizes them, optionally
//! reweights them by IDF, and reports the realized token's corrected
//! probability together with the exponentiated entropy of the corrected
//! distribution. Both replace the raw values in the token score.
//!
//! IDF reweighting normalizes over the stored candidate set, not the full
//! vocabulary; `tail_mass` on the token bounds what that leaves out.

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::config::PipelineConfig;
use crate::idf::IdfSource;
use crate::trace::{Candidate, TokenRecord, Variant};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorrectionError {
    #[error("realized token {0:?} is not among the candidates")]
    RealizedMissing(String),
    #[error("candidate set has zero total probability")]
    ZeroMass,
    #[error("entity-type correction needs a typed trace, got {0}")]
    VariantMismatch(Variant),
    #[error("IDF correction requested without an IDF table")]
    MissingIdf,
}

/// A normalized distribution over a candidate set.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectedDistribution {
    pub entries: Vec<Candidate>,
    /// Position of the realized token in `entries`.
    pub realized: usize,
}

impl CorrectedDistribution {
    pub fn realized_prob(&self) -> f64 {
        self.entries[self.realized].1
    }

    /// `2^H` with `H` the base-2 entropy of the entries.
    pub fn entropy_term(&self) -> f64 {
        exp_entropy(self.entries.iter().map(|c| c.1))
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|c| c.1).sum()
    }
}

/// Exponentiated base-2 entropy; zero-probability entries contribute nothing.
pub fn exp_entropy(probs: impl Iterator<Item = f64>) -> f64 {
    let h: f64 = probs.filter(|&p| p > 0.0).map(|p| -p * libm::log2(p)).sum();
    libm::exp2(h)
}

/// Candidates with probability strictly above `rho`, plus the realized token
/// whatever its probability. Order is preserved.
pub fn candidate_set(
    candidates: &[Candidate],
    realized: &str,
    rho: f64,
) -> Result<Vec<Candidate>, CorrectionError> {
    let realized_at = candidates
        .iter()
        .position(|c| c.0 == realized)
        .ok_or_else(|| CorrectionError::RealizedMissing(realized.into()))?;
    Ok(candidates
        .iter()
        .enumerate()
        .filter(|&(k, c)| k == realized_at || c.1 > rho)
        .map(|(_, c)| c.clone())
        .collect())
}

/// Divides every probability by the subset's total mass.
pub fn renormalize(
    subset: Vec<Candidate>,
    realized: &str,
) -> Result<CorrectedDistribution, CorrectionError> {
    let realized_at = subset
        .iter()
        .position(|c| c.0 == realized)
        .ok_or_else(|| CorrectionError::RealizedMissing(realized.into()))?;
    let total: f64 = subset.iter().map(|c| c.1).sum();
    if !(total > 0.0) {
        return Err(CorrectionError::ZeroMass);
    }
    Ok(CorrectedDistribution {
        entries: subset
            .into_iter()
            .map(|Candidate(t, p)| Candidate(t, p / total))
            .collect(),
        realized: realized_at,
    })
}

/// Reweights by IDF: `p(t) * idf(t) / sum_v p(v) * idf(v)` over the set.
///
/// The distribution is returned unchanged when every entry has the same
/// IDF (the factor cancels), or when the realized token would end up with
/// zero mass (its IDF is zero, or every IDF is).
pub fn apply_idf<I: IdfSource + ?Sized>(
    dist: CorrectedDistribution,
    idf: &I,
) -> CorrectedDistribution {
    let weights: Vec<f64> = dist.entries.iter().map(|c| idf.idf(&c.0)).collect();
    let uniform = weights.windows(2).all(|w| w[0] == w[1]);
    let realized_mass = dist.entries[dist.realized].1 * weights[dist.realized];
    if uniform || !(realized_mass > 0.0) {
        return dist;
    }
    let total: f64 = dist
        .entries
        .iter()
        .zip(&weights)
        .map(|(c, w)| c.1 * w)
        .sum();
    CorrectedDistribution {
        entries: dist
            .entries
            .into_iter()
            .zip(weights)
            .map(|(Candidate(t, p), w)| Candidate(t, p * w / total))
            .collect(),
        realized: dist.realized,
    }
}

/// Probability and entropy term that feed the token score under `config`.
///
/// With neither type nor IDF correction enabled the stored values pass
/// through untouched.
pub fn corrected_token_inputs(
    token: &TokenRecord,
    variant: Variant,
    idf: Option<&dyn IdfSource>,
    config: &PipelineConfig,
) -> Result<(f64, f64), CorrectionError> {
    if config.use_type && variant != Variant::Typed {
        return Err(CorrectionError::VariantMismatch(variant));
    }
    if !config.corrects_probabilities() {
        return Ok((token.prob(), token.entropy_term));
    }
    let subset = candidate_set(&token.candidates, &token.text, config.rho)?;
    let mut dist = renormalize(subset, &token.text)?;
    if config.use_idf {
        dist = apply_idf(dist, idf.ok_or(CorrectionError::MissingIdf)?);
    }
    Ok((dist.realized_prob(), dist.entropy_term()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeMap;
    use alloc::vec;

    fn cands(entries: &[(&str, f64)]) -> Vec<Candidate> {
        entries.iter().map(|&(t, p)| Candidate::new(t, p)).collect()
    }

    fn names(c: &[Candidate]) -> Vec<&str> {
        c.iter().map(|c| c.token()).collect()
    }

    struct Fixed(BTreeMap<&'static str, f64>);

    impl IdfSource for Fixed {
        fn idf(&self, token: &str) -> f64 {
            self.0.get(token).copied().unwrap_or(1.0)
        }
    }

    const ABCD: &[(&str, f64)] = &[("A", 0.4), ("B", 0.35), ("C", 0.2), ("D", 0.05)];

    #[test]
    fn threshold_examples() {
        assert_eq!(
            names(&candidate_set(&cands(ABCD), "A", 0.1).unwrap()),
            vec!["A", "B", "C"]
        );
        assert_eq!(candidate_set(&cands(ABCD), "A", 0.0).unwrap(), cands(ABCD));
        assert_eq!(
            names(&candidate_set(&cands(&[("A", 0.99), ("B", 0.01)]), "B", 0.05).unwrap()),
            vec!["A", "B"]
        );
        // Strict comparison: a candidate sitting exactly on rho is dropped.
        assert_eq!(
            names(&candidate_set(&cands(ABCD), "A", 0.2).unwrap()),
            vec!["A", "B"]
        );
        assert_eq!(
            candidate_set(&cands(ABCD), "Z", 0.1),
            Err(CorrectionError::RealizedMissing("Z".into()))
        );
    }

    #[test]
    fn renormalize_examples() {
        let d = renormalize(cands(&ABCD[..3]), "A").unwrap();
        let want = [0.42105, 0.36842, 0.21053];
        for (c, w) in d.entries.iter().zip(want) {
            assert!((c.1 - w).abs() < 1e-5);
        }
        assert_eq!(
            renormalize(cands(&[("A", 0.3)]), "A")
                .unwrap()
                .realized_prob(),
            1.0
        );
        let pair = cands(&[("A", 0.5), ("B", 0.5)]);
        assert_eq!(renormalize(pair.clone(), "B").unwrap().entries, pair);
        assert_eq!(
            renormalize(cands(&[("A", 0.0)]), "A"),
            Err(CorrectionError::ZeroMass)
        );
    }

    #[test]
    fn idf_examples() {
        let pair = renormalize(cands(&[("A", 0.5), ("B", 0.5)]), "A").unwrap();
        let idf = Fixed([("A", 2.0), ("B", 1.0)].into_iter().collect());
        let d = apply_idf(pair.clone(), &idf);
        assert!((d.entries[0].1 - 0.66667).abs() < 1e-5);
        assert!((d.entries[1].1 - 0.33333).abs() < 1e-5);

        let uniform = Fixed([("A", 3.0), ("B", 3.0)].into_iter().collect());
        assert_eq!(apply_idf(pair.clone(), &uniform), pair);

        let single = renormalize(cands(&[("A", 1.0)]), "A").unwrap();
        assert_eq!(apply_idf(single, &idf).realized_prob(), 1.0);
    }

    #[test]
    fn zero_idf_realized_keeps_distribution() {
        let pair = renormalize(cands(&[("A", 0.5), ("B", 0.5)]), "A").unwrap();
        let idf = Fixed([("A", 0.0), ("B", 1.0)].into_iter().collect());
        assert_eq!(apply_idf(pair.clone(), &idf), pair);
    }

    fn typed_token() -> TokenRecord {
        TokenRecord {
            index: 0,
            text: "A".into(),
            sentence_index: 0,
            logprob: libm::log(0.4),
            entropy_term: 3.5,
            is_keyword: true,
            keyword_class: crate::trace::KeywordClass::Noun,
            entity_type: None,
            is_tag: false,
            candidates: cands(ABCD),
            tail_mass: 0.0,
        }
    }

    #[test]
    fn pass_through_without_correction() {
        let mut t = typed_token();
        t.logprob = -core::f64::consts::LN_2;
        t.entropy_term = 2.0;
        let (p, e) =
            corrected_token_inputs(&t, Variant::Plain, None, &PipelineConfig::baseline()).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert_eq!(e, 2.0);
    }

    #[test]
    fn typed_correction_example() {
        let config = PipelineConfig::full(0.9, 0.1);
        let idf = Fixed(BTreeMap::new());
        let (p, e) =
            corrected_token_inputs(&typed_token(), Variant::Typed, Some(&idf), &config).unwrap();
        assert!((p - 0.42105).abs() < 1e-5);
        // 2^H over (8/19, 7/19, 4/19), evaluated independently.
        assert!((e - 2.886714302930051).abs() < 1e-3);
    }

    #[test]
    fn singleton_collapses_to_one_hot() {
        let config = PipelineConfig::full(0.9, 0.5).with(crate::Feature::Idf, false);
        let (p, e) = corrected_token_inputs(&typed_token(), Variant::Typed, None, &config).unwrap();
        assert_eq!((p, e), (1.0, 1.0));
    }

    #[test]
    fn misuse_is_reported() {
        let config = PipelineConfig::default();
        assert_eq!(
            corrected_token_inputs(&typed_token(), Variant::Plain, None, &config),
            Err(CorrectionError::VariantMismatch(Variant::Plain))
        );
        assert_eq!(
            corrected_token_inputs(&typed_token(), Variant::Typed, None, &config),
            Err(CorrectionError::MissingIdf)
        );
    }
}
