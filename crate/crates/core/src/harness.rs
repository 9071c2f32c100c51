//! Evaluation tasks, the scoring pipeline and the ablation ladder.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotation::{AnnotationSet, Label};
use crate::config::{ConfigError, Feature, PipelineConfig};
use crate::correction::{corrected_token_inputs, CorrectionError};
use crate::idf::IdfSource;
use crate::metrics::{self, MetricError, RankedSample};
use crate::propagation::{propagate, PropagationError};
use crate::scoring::{
    passage_score, sentence_score, token_score, ScoreError, ScoreSet, TokenScore, Weighting,
};
use crate::trace::{PassageTrace, Variant, Violation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("passage {passage_id}: {} trace violation(s), first: {}", violations.len(), violations[0])]
    InvalidTrace {
        passage_id: String,
        violations: Vec<Violation>,
    },
    #[error("passage {passage_id}: {source}")]
    Correction {
        passage_id: String,
        source: CorrectionError,
    },
    #[error("passage {passage_id}: {source}")]
    Score {
        passage_id: String,
        source: ScoreError,
    },
    #[error("passage {passage_id}: {source}")]
    Propagation {
        passage_id: String,
        source: PropagationError,
    },
    #[error("passage {0} is annotated but has no scores")]
    MissingScores(String),
    #[error("passage {passage_id}: {labels} labelled sentences but {scored} scored sentences")]
    SentenceCountMismatch {
        passage_id: String,
        labels: usize,
        scored: usize,
    },
    #[error("passage {passage_id} has no {variant} trace")]
    MissingVariant {
        passage_id: String,
        variant: Variant,
    },
    #[error("{what}: {source}")]
    Metric {
        what: &'static str,
        source: MetricError,
    },
}

/// Sentence-level evaluation class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SentenceClass {
    /// Positives: major or minor inaccurate.
    Nonfactual,
    /// All-major passages removed; positives: major inaccurate.
    NonfactualStar,
    /// Positives: accurate, ranked by negated score.
    Factual,
}

impl SentenceClass {
    pub const ALL: [SentenceClass; 3] = [
        SentenceClass::Nonfactual,
        SentenceClass::NonfactualStar,
        SentenceClass::Factual,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SentenceClass::Nonfactual => "nonfactual",
            SentenceClass::NonfactualStar => "nonfactual_star",
            SentenceClass::Factual => "factual",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSample {
    pub passage_id: String,
    pub sentence_index: usize,
    pub sample: RankedSample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceTask {
    pub class: SentenceClass,
    pub samples: Vec<TaskSample>,
}

impl SentenceTask {
    pub fn ranked(&self) -> Vec<RankedSample> {
        self.samples.iter().map(|s| s.sample).collect()
    }

    pub fn positives(&self) -> usize {
        self.samples.iter().filter(|s| s.sample.positive).count()
    }

    pub fn average_precision(&self) -> Result<f64, MetricError> {
        metrics::average_precision(&self.ranked())
    }
}

/// Builds the three sentence-level tasks from gold labels and scores.
///
/// Passages are visited in id order, so the result does not depend on how
/// the inputs were assembled. Scored passages without annotations are
/// ignored.
pub fn build_sentence_tasks(
    annotations: &AnnotationSet,
    scores: &BTreeMap<String, ScoreSet>,
) -> Result<[SentenceTask; 3], HarnessError> {
    let mut tasks = SentenceClass::ALL.map(|class| SentenceTask {
        class,
        samples: Vec::new(),
    });

    for (passage_id, labels) in &annotations.passages {
        let set = scores
            .get(passage_id)
            .ok_or_else(|| HarnessError::MissingScores(passage_id.clone()))?;
        if set.sentence_count() != labels.len() {
            return Err(HarnessError::SentenceCountMismatch {
                passage_id: passage_id.clone(),
                labels: labels.len(),
                scored: set.sentence_count(),
            });
        }
        let all_major = labels.iter().all(|&l| l == Label::MajorInaccurate);

        for (sentence_index, (&label, &score)) in
            labels.iter().zip(&set.sentence_scores).enumerate()
        {
            let mut push = |task: usize, score: f64, positive: bool| {
                tasks[task].samples.push(TaskSample {
                    passage_id: passage_id.clone(),
                    sentence_index,
                    sample: RankedSample::new(score, positive),
                });
            };
            push(0, score, label.is_nonfactual());
            if !all_major {
                push(1, score, label == Label::MajorInaccurate);
            }
            push(2, -score, label == Label::Accurate);
        }
    }
    Ok(tasks)
}

/// Gold passage score: mean of accurate = 0, minor = 0.5, major = 1.
pub fn passage_gold(labels: &[Label]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let total: f64 = labels
        .iter()
        .map(|l| match l {
            Label::Accurate => 0.0,
            Label::MinorInaccurate => 0.5,
            Label::MajorInaccurate => 1.0,
        })
        .sum();
    total / labels.len() as f64
}

/// Scores one passage under `config`.
///
/// Per token: corrected probability and entropy term, then the raw score;
/// then propagation when enabled; then sentence and passage means.
pub fn run_pipeline(
    trace: &PassageTrace,
    idf: Option<&dyn IdfSource>,
    config: &PipelineConfig,
) -> Result<ScoreSet, HarnessError> {
    config.validate()?;
    let passage_id = || trace.passage_id.clone();
    let violations = trace.validate();
    if !violations.is_empty() {
        return Err(HarnessError::InvalidTrace {
            passage_id: passage_id(),
            violations,
        });
    }

    let tokens = &trace.tokens;
    // Tag positions keep a zero placeholder; nothing reads them.
    let mut h = vec![0.0; tokens.len()];
    for (i, token) in tokens.iter().enumerate() {
        if token.is_tag {
            continue;
        }
        let (prob, entropy_term) = corrected_token_inputs(token, trace.variant, idf, config)
            .map_err(|source| HarnessError::Correction {
                passage_id: passage_id(),
                source,
            })?;
        h[i] = token_score(prob, entropy_term).map_err(|e| HarnessError::Score {
            passage_id: passage_id(),
            source: e.at(i),
        })?;
    }

    let (h_hat, penalty) = if config.use_penalty {
        let p = propagate(&h, tokens, &trace.attention.rows, config.gamma).map_err(|source| {
            HarnessError::Propagation {
                passage_id: passage_id(),
                source,
            }
        })?;
        (p.h_hat, p.penalty)
    } else {
        (h.clone(), vec![0.0; tokens.len()])
    };

    let weighting = Weighting::for_config(config);
    let score_err = |source| HarnessError::Score {
        passage_id: passage_id(),
        source,
    };
    let sentence_scores = (0..trace.sentence_count())
        .map(|s| sentence_score(&h_hat, tokens, s, weighting))
        .collect::<Result<Vec<_>, _>>()
        .map_err(score_err)?;
    let passage = passage_score(&h_hat, tokens, weighting).map_err(score_err)?;

    let token_scores = tokens
        .iter()
        .filter(|t| !t.is_tag)
        .map(|t| TokenScore {
            index: t.index,
            h: h[t.index],
            h_hat: h_hat[t.index],
            penalty: penalty[t.index],
        })
        .collect();

    Ok(ScoreSet {
        passage_id: passage_id(),
        variant: trace.variant,
        config_fingerprint: config.fingerprint(),
        config: *config,
        token_scores,
        sentence_scores,
        passage_score: passage,
    })
}

/// Sentence AP for the three classes plus passage-level correlations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub nonfactual_ap: f64,
    pub nonfactual_star_ap: f64,
    pub factual_ap: f64,
    pub pearson: f64,
    pub spearman: f64,
}

impl MetricRow {
    /// Values in report column order.
    pub fn columns(&self) -> [f64; 5] {
        [
            self.nonfactual_ap,
            self.nonfactual_star_ap,
            self.factual_ap,
            self.pearson,
            self.spearman,
        ]
    }
}

fn metric<T>(what: &'static str, r: Result<T, MetricError>) -> Result<T, HarnessError> {
    r.map_err(|source| HarnessError::Metric { what, source })
}

/// Gold and predicted passage scores for every annotated passage, in id
/// order.
pub fn passage_pairs(
    annotations: &AnnotationSet,
    scores: &BTreeMap<String, ScoreSet>,
) -> Result<(Vec<f64>, Vec<f64>), HarnessError> {
    let mut gold = Vec::with_capacity(annotations.len());
    let mut predicted = Vec::with_capacity(annotations.len());
    for (id, labels) in &annotations.passages {
        let set = scores
            .get(id)
            .ok_or_else(|| HarnessError::MissingScores(id.clone()))?;
        gold.push(passage_gold(labels));
        predicted.push(set.passage_score);
    }
    Ok((gold, predicted))
}

pub fn evaluate(
    annotations: &AnnotationSet,
    scores: &BTreeMap<String, ScoreSet>,
) -> Result<MetricRow, HarnessError> {
    let [nonfactual, star, factual] = build_sentence_tasks(annotations, scores)?;
    let (gold, predicted) = passage_pairs(annotations, scores)?;
    Ok(MetricRow {
        nonfactual_ap: metric("nonfactual AP", nonfactual.average_precision())?,
        nonfactual_star_ap: metric("nonfactual_star AP", star.average_precision())?,
        factual_ap: metric("factual AP", factual.average_precision())?,
        pearson: metric("pearson", metrics::pearson(&predicted, &gold))?,
        spearman: metric("spearman", metrics::spearman(&predicted, &gold))?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdSource {
    /// Fitted and evaluated on the same sentences.
    InSample,
    /// Fitted on the calibration passages, evaluated on the rest.
    CalibrationSplit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BalancedAccuracy {
    pub threshold: f64,
    pub value: f64,
    pub source: ThresholdSource,
}

/// Balanced accuracy of a task with its threshold chosen by grid search.
///
/// With `calibration`, the threshold is fitted on sentences of those
/// passages and scored on the remaining ones.
pub fn calibrated_balanced_accuracy(
    task: &SentenceTask,
    calibration: Option<&BTreeSet<String>>,
) -> Result<BalancedAccuracy, HarnessError> {
    let (fit, held_out): (Vec<&TaskSample>, Vec<&TaskSample>) = match calibration {
        Some(ids) => task
            .samples
            .iter()
            .partition(|s| ids.contains(&s.passage_id)),
        None => (task.samples.iter().collect(), Vec::new()),
    };
    let fit: Vec<RankedSample> = fit.iter().map(|s| s.sample).collect();
    let (threshold, in_sample) = metric("threshold search", metrics::best_threshold(&fit))?;
    if held_out.is_empty() {
        return Ok(BalancedAccuracy {
            threshold,
            value: in_sample,
            source: ThresholdSource::InSample,
        });
    }
    let held_out: Vec<RankedSample> = held_out.iter().map(|s| s.sample).collect();
    Ok(BalancedAccuracy {
        threshold,
        value: metric(
            "balanced accuracy",
            metrics::balanced_accuracy(&held_out, threshold),
        )?,
        source: ThresholdSource::CalibrationSplit,
    })
}

/// One step of the ablation ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderStep {
    pub label: &'static str,
    pub config: PipelineConfig,
    pub variant: Variant,
}

/// The five cumulative configurations: mean score, then keyword weighting,
/// penalty, entity type and token IDF switched on one at a time. The last
/// two score typed traces.
pub fn ablation_ladder(gamma: f64, rho: f64) -> [LadderStep; 5] {
    let base = PipelineConfig {
        gamma,
        rho,
        ..PipelineConfig::baseline()
    };
    let keyword = base.with(Feature::Keyword, true);
    let penalty = keyword.with(Feature::Penalty, true);
    let typed = penalty.with(Feature::Type, true);
    let idf = typed.with(Feature::Idf, true);
    [
        LadderStep {
            label: "avg(h)",
            config: base,
            variant: Variant::Plain,
        },
        LadderStep {
            label: "+keyword",
            config: keyword,
            variant: Variant::Plain,
        },
        LadderStep {
            label: "+penalty",
            config: penalty,
            variant: Variant::Plain,
        },
        LadderStep {
            label: "+entity type",
            config: typed,
            variant: Variant::Typed,
        },
        LadderStep {
            label: "+token idf",
            config: idf,
            variant: Variant::Typed,
        },
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub label: String,
    pub variant: Variant,
    pub config: PipelineConfig,
    pub metrics: MetricRow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub gamma: f64,
    pub rho: f64,
    pub rows: Vec<AblationRow>,
}

/// Checks that every annotated passage has both trace variants.
pub fn check_variants(
    annotations: &AnnotationSet,
    plain: &BTreeMap<String, PassageTrace>,
    typed: &BTreeMap<String, PassageTrace>,
) -> Result<(), HarnessError> {
    let ids = annotations
        .passages
        .keys()
        .chain(plain.keys())
        .chain(typed.keys());
    for id in ids {
        for (variant, traces) in [(Variant::Plain, plain), (Variant::Typed, typed)] {
            if !traces.contains_key(id) {
                return Err(HarnessError::MissingVariant {
                    passage_id: id.clone(),
                    variant,
                });
            }
        }
    }
    Ok(())
}

/// Scores every trace under one configuration.
pub fn score_all(
    traces: &BTreeMap<String, PassageTrace>,
    idf: Option<&dyn IdfSource>,
    config: &PipelineConfig,
) -> Result<BTreeMap<String, ScoreSet>, HarnessError> {
    traces
        .iter()
        .map(|(id, t)| Ok((id.clone(), run_pipeline(t, idf, config)?)))
        .collect()
}

/// Runs the five-step ladder sequentially.
pub fn run_ablation(
    plain: &BTreeMap<String, PassageTrace>,
    typed: &BTreeMap<String, PassageTrace>,
    annotations: &AnnotationSet,
    idf: Option<&dyn IdfSource>,
    gamma: f64,
    rho: f64,
) -> Result<AblationReport, HarnessError> {
    check_variants(annotations, plain, typed)?;
    let rows = ablation_ladder(gamma, rho)
        .into_iter()
        .map(|step| {
            let traces = match step.variant {
                Variant::Plain => plain,
                Variant::Typed => typed,
            };
            let scores = score_all(traces, idf, &step.config)?;
            Ok(AblationRow {
                label: step.label.into(),
                variant: step.variant,
                config: step.config,
                metrics: evaluate(annotations, &scores)?,
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    Ok(AblationReport { gamma, rho, rows })
}
