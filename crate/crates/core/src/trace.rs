//! Passage trace data model and its invariant checks.
//!
//! A [`PassageTrace`] is everything the scorer knows about one generated
//! passage: realized-token probabilities, the precomputed exponentiated
//! entropy, a truncated candidate distribution per position, keyword/tag
//! flags, and keyword-to-keyword attention after max-pooling over layers and
//! heads.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

/// The only trace schema version this crate reads and writes.
pub const SCHEMA_VERSION: u32 = 1;

/// Allowed gap between `exp(logprob)` and the realized candidate probability.
pub const REALIZED_PROB_TOLERANCE: f64 = 1e-6;

/// Allowed deviation of `sum(candidates) + tail_mass` from one.
pub const MASS_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Context without entity-type tags.
    Plain,
    /// Context with `<TYPE>` tags inserted before every named entity.
    Typed,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Plain => "plain",
            Variant::Typed => "typed",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KeywordClass {
    Entity,
    Noun,
    None,
}

/// One entry of a truncated next-token distribution, serialized as
/// `["token", probability]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate(pub String, pub f64);

impl Candidate {
    pub fn new(token: impl Into<String>, prob: f64) -> Self {
        Candidate(token.into(), prob)
    }

    pub fn token(&self) -> &str {
        &self.0
    }

    pub fn prob(&self) -> f64 {
        self.1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TokenRecord {
    pub index: usize,
    pub text: String,
    pub sentence_index: usize,
    /// Natural log of the realized token's probability.
    pub logprob: f64,
    /// `2^H` with `H` the base-2 entropy over the full vocabulary.
    pub entropy_term: f64,
    pub is_keyword: bool,
    pub keyword_class: KeywordClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entity_type: Option<String>,
    pub is_tag: bool,
    /// Descending by probability; always contains the realized token.
    pub candidates: Vec<Candidate>,
    pub tail_mass: f64,
}

impl TokenRecord {
    /// Probability of the realized token as recorded in `logprob`.
    pub fn prob(&self) -> f64 {
        libm::exp(self.logprob)
    }

    /// Position of the realized token inside `candidates`.
    pub fn realized_position(&self) -> Option<usize> {
        self.candidates.iter().position(|c| c.0 == self.text)
    }

    /// Keyword that takes part in scoring (tag pieces never do).
    pub fn is_scored_keyword(&self) -> bool {
        self.is_keyword && !self.is_tag
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pooling {
    /// Element-wise max over every layer and head.
    #[default]
    #[serde(rename = "max-layers-heads")]
    MaxLayersHeads,
}

/// Pooled attention from keyword `i` to earlier keywords, as `[j, att]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttentionRow {
    pub i: usize,
    pub weights: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Attention {
    pub pooling: Pooling,
    pub rows: Vec<AttentionRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PassageTrace {
    pub schema_version: u32,
    pub passage_id: String,
    pub variant: Variant,
    pub prompt: String,
    pub model_id: String,
    pub tokens: Vec<TokenRecord>,
    pub attention: Attention,
}

impl PassageTrace {
    /// Number of sentences, i.e. the largest `sentence_index` plus one.
    pub fn sentence_count(&self) -> usize {
        self.tokens
            .iter()
            .map(|t| t.sentence_index + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn keyword_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_scored_keyword()).count()
    }

    /// Index of the first token whose candidate list is not non-increasing.
    pub fn first_unsorted_candidates(&self) -> Option<usize> {
        self.tokens
            .iter()
            .position(|t| !candidates_sorted(&t.candidates))
    }

    /// Checks every trace invariant and returns the violations found.
    pub fn validate(&self) -> Vec<Violation> {
        validate_trace(self)
    }
}

fn candidates_sorted(candidates: &[Candidate]) -> bool {
    candidates.windows(2).all(|w| w[0].1 >= w[1].1)
}

/// Which invariant a [`Violation`] breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Invariant {
    SchemaVersion,
    TokenIndex,
    SentenceOrder,
    Logprob,
    RealizedCandidate,
    EntropyTerm,
    CandidateProbability,
    CandidateOrder,
    MassBalance,
    KeywordClass,
    EntityType,
    TagKeyword,
    PlainHasTag,
    AttentionRow,
    AttentionTarget,
    AttentionWeight,
    AttentionCoverage,
}

impl Invariant {
    pub fn name(self) -> &'static str {
        match self {
            Invariant::SchemaVersion => "schema-version",
            Invariant::TokenIndex => "token-index",
            Invariant::SentenceOrder => "sentence-order",
            Invariant::Logprob => "logprob",
            Invariant::RealizedCandidate => "realized-candidate",
            Invariant::EntropyTerm => "entropy-term",
            Invariant::CandidateProbability => "candidate-probability",
            Invariant::CandidateOrder => "candidate-order",
            Invariant::MassBalance => "mass-balance",
            Invariant::KeywordClass => "keyword-class",
            Invariant::EntityType => "entity-type",
            Invariant::TagKeyword => "tag-keyword",
            Invariant::PlainHasTag => "plain-has-tag",
            Invariant::AttentionRow => "attention-row",
            Invariant::AttentionTarget => "attention-target",
            Invariant::AttentionWeight => "attention-weight",
            Invariant::AttentionCoverage => "attention-coverage",
        }
    }
}

/// Where in the trace a violation was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Passage,
    Token(usize),
    AttentionRow(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub invariant: Invariant,
    pub location: Location,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.location {
            Location::Passage => write!(f, "passage")?,
            Location::Token(i) => write!(f, "token {i}")?,
            Location::AttentionRow(i) => write!(f, "attention row i={i}")?,
        }
        write!(f, ": [{}] {}", self.invariant.name(), self.detail)
    }
}

struct Collector(Vec<Violation>);

impl Collector {
    fn push(&mut self, invariant: Invariant, location: Location, detail: String) {
        self.0.push(Violation {
            invariant,
            location,
            detail,
        });
    }
}

/// Returns one entry per broken invariant occurrence; empty means valid.
pub fn validate_trace(trace: &PassageTrace) -> Vec<Violation> {
    let mut out = Collector(Vec::new());

    if trace.schema_version != SCHEMA_VERSION {
        out.push(
            Invariant::SchemaVersion,
            Location::Passage,
            format!(
                "schema_version {} (expected {SCHEMA_VERSION})",
                trace.schema_version
            ),
        );
    }

    let mut prev_sentence: Option<usize> = None;
    for (pos, token) in trace.tokens.iter().enumerate() {
        let loc = Location::Token(pos);
        if token.index != pos {
            out.push(
                Invariant::TokenIndex,
                loc,
                format!("index {} at position {pos}", token.index),
            );
        }
        // Sentences start at 0 and advance by at most one per token.
        let ok_sentence = match prev_sentence {
            None => token.sentence_index == 0,
            Some(s) => token.sentence_index == s || token.sentence_index == s + 1,
        };
        if !ok_sentence {
            let after = prev_sentence.map_or(String::from("start"), |s| format!("{s}"));
            out.push(
                Invariant::SentenceOrder,
                loc,
                format!("sentence_index {} after {after}", token.sentence_index),
            );
        }
        prev_sentence = Some(token.sentence_index);
        check_token(token, loc, trace.variant, &mut out);
    }

    check_attention(trace, &mut out);
    out.0
}

fn check_token(token: &TokenRecord, loc: Location, variant: Variant, out: &mut Collector) {
    if !(token.logprob <= 0.0) || !token.logprob.is_finite() {
        out.push(
            Invariant::Logprob,
            loc,
            format!("logprob {} is not a finite value <= 0", token.logprob),
        );
    }

    match token.realized_position() {
        None => out.push(
            Invariant::RealizedCandidate,
            loc,
            format!("realized token {:?} missing from candidates", token.text),
        ),
        Some(pos) => {
            let stored = token.candidates[pos].1;
            let from_logprob = token.prob();
            if !((stored - from_logprob).abs() <= REALIZED_PROB_TOLERANCE) {
                out.push(
                    Invariant::RealizedCandidate,
                    loc,
                    format!("exp(logprob) = {from_logprob} but candidate probability is {stored}"),
                );
            }
        }
    }

    if !(token.entropy_term >= 1.0) || !token.entropy_term.is_finite() {
        out.push(
            Invariant::EntropyTerm,
            loc,
            format!("entropy_term {} is below 1", token.entropy_term),
        );
    }

    if let Some(bad) = token
        .candidates
        .iter()
        .find(|c| !(0.0..=1.0).contains(&c.1))
    {
        out.push(
            Invariant::CandidateProbability,
            loc,
            format!("candidate {:?} has probability {}", bad.0, bad.1),
        );
    }

    if !candidates_sorted(&token.candidates) {
        out.push(
            Invariant::CandidateOrder,
            loc,
            String::from("candidates are not in non-increasing probability order"),
        );
    }

    let mass: f64 = token.candidates.iter().map(|c| c.1).sum::<f64>() + token.tail_mass;
    if !(0.0..=1.0).contains(&token.tail_mass) || !((mass - 1.0).abs() <= MASS_TOLERANCE) {
        out.push(
            Invariant::MassBalance,
            loc,
            format!(
                "candidates + tail_mass = {mass} (tail_mass {})",
                token.tail_mass
            ),
        );
    }

    if token.is_keyword != (token.keyword_class != KeywordClass::None) {
        out.push(
            Invariant::KeywordClass,
            loc,
            format!(
                "is_keyword = {} with keyword_class {:?}",
                token.is_keyword, token.keyword_class
            ),
        );
    }

    let needs_type = token.keyword_class == KeywordClass::Entity;
    if needs_type != token.entity_type.is_some() {
        out.push(
            Invariant::EntityType,
            loc,
            format!(
                "keyword_class {:?} with entity_type {:?}",
                token.keyword_class, token.entity_type
            ),
        );
    }

    if token.is_tag && token.is_keyword {
        out.push(
            Invariant::TagKeyword,
            loc,
            String::from("tag token is marked as keyword"),
        );
    }

    if token.is_tag && variant == Variant::Plain {
        out.push(
            Invariant::PlainHasTag,
            loc,
            String::from("plain trace contains a tag token"),
        );
    }
}

fn check_attention(trace: &PassageTrace, out: &mut Collector) {
    let tokens = &trace.tokens;
    let mut seen_rows = BTreeSet::new();

    for row in &trace.attention.rows {
        let loc = Location::AttentionRow(row.i);
        match tokens.get(row.i) {
            None => {
                out.push(
                    Invariant::AttentionRow,
                    loc,
                    format!(
                        "row index {} outside passage of {} tokens",
                        row.i,
                        tokens.len()
                    ),
                );
                continue;
            }
            Some(t) if !t.is_scored_keyword() => out.push(
                Invariant::AttentionRow,
                loc,
                String::from("attending token is not a keyword"),
            ),
            Some(_) => {}
        }
        if !seen_rows.insert(row.i) {
            out.push(
                Invariant::AttentionRow,
                loc,
                String::from("duplicate row for the same attending token"),
            );
        }

        let mut prev_j: Option<usize> = None;
        for &(j, att) in &row.weights {
            if j >= row.i {
                out.push(
                    Invariant::AttentionTarget,
                    loc,
                    format!("j = {j} does not precede i"),
                );
            } else if !tokens[j].is_scored_keyword() {
                out.push(
                    Invariant::AttentionTarget,
                    loc,
                    format!("j = {j} is not a keyword"),
                );
            }
            if prev_j.is_some_and(|p| j <= p) {
                out.push(
                    Invariant::AttentionTarget,
                    loc,
                    format!("j = {j} breaks strictly increasing order"),
                );
            }
            prev_j = Some(j);
            if !(0.0..=1.0).contains(&att) {
                out.push(
                    Invariant::AttentionWeight,
                    loc,
                    format!("att[{j}] = {att} outside [0, 1]"),
                );
            }
        }
    }

    let mut earlier_keyword = false;
    for (i, t) in tokens.iter().enumerate() {
        if !t.is_scored_keyword() {
            continue;
        }
        if earlier_keyword && !seen_rows.contains(&i) {
            out.push(
                Invariant::AttentionCoverage,
                Location::Token(i),
                String::from("keyword with preceding keywords has no attention row"),
            );
        }
        earlier_keyword = true;
    }
}
