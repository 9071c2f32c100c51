//! Report assembly and rendering.
//!
//! Metrics are stored raw (AP in `[0, 1]`, correlations in `[-1, 1]`) and
//! only scaled to percentages when rendered as markdown.

use std::fmt::Write as _;

use halluscope_core::harness::{AblationReport, AblationRow, BalancedAccuracy, MetricRow};
use halluscope_core::scoring::{round_serialized, ScoreSet};
use halluscope_core::PipelineConfig;
use serde::{Deserialize, Serialize};

use crate::formats::Percent;

pub const COLUMNS: [&str; 5] = ["NoFac", "NoFac*", "Fact", "Pear.", "Spear."];

/// Result of `evaluate`: one configuration over a set of passages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub config_fingerprint: String,
    pub config: PipelineConfig,
    pub passages: usize,
    pub sentences: usize,
    pub metrics: MetricRow,
    /// Balanced accuracy on the non-factual class.
    pub balanced_accuracy: BalancedAccuracy,
}

fn round_row(row: &MetricRow) -> MetricRow {
    MetricRow {
        nonfactual_ap: round_serialized(row.nonfactual_ap),
        nonfactual_star_ap: round_serialized(row.nonfactual_star_ap),
        factual_ap: round_serialized(row.factual_ap),
        pearson: round_serialized(row.pearson),
        spearman: round_serialized(row.spearman),
    }
}

/// Copy with metrics rounded to the serialized precision.
pub fn rounded_ablation(report: &AblationReport) -> AblationReport {
    AblationReport {
        rows: report
            .rows
            .iter()
            .map(|r| AblationRow {
                metrics: round_row(&r.metrics),
                ..r.clone()
            })
            .collect(),
        ..report.clone()
    }
}

pub fn rounded_evaluation(report: &EvaluationReport) -> EvaluationReport {
    EvaluationReport {
        metrics: round_row(&report.metrics),
        balanced_accuracy: BalancedAccuracy {
            value: round_serialized(report.balanced_accuracy.value),
            ..report.balanced_accuracy
        },
        ..report.clone()
    }
}

fn table_header(out: &mut String) {
    out.push_str("| Method |");
    for c in COLUMNS {
        let _ = write!(out, " {c} |");
    }
    out.push_str("\n|---|");
    for _ in COLUMNS {
        out.push_str("---:|");
    }
    out.push('\n');
}

fn table_row(out: &mut String, label: &str, row: &MetricRow) {
    let _ = write!(out, "| {label} |");
    for v in row.columns() {
        let _ = write!(out, " {} |", Percent(v));
    }
    out.push('\n');
}

pub fn ablation_markdown(report: &AblationReport) -> String {
    let mut out = format!(
        "Ablation (gamma = {}, rho = {})\n\n",
        report.gamma, report.rho
    );
    table_header(&mut out);
    for row in &report.rows {
        table_row(&mut out, &row.label, &row.metrics);
    }
    out
}

pub fn evaluation_markdown(report: &EvaluationReport) -> String {
    let mut out = format!(
        "Evaluation over {} passages / {} sentences ({})\n\n",
        report.passages, report.sentences, report.config_fingerprint
    );
    table_header(&mut out);
    table_row(&mut out, "scores", &report.metrics);
    let ba = &report.balanced_accuracy;
    let _ = write!(
        out,
        "\nBalanced accuracy (non-factual): {} at threshold {} ({})\n",
        Percent(ba.value),
        ba.threshold,
        match ba.source {
            halluscope_core::harness::ThresholdSource::InSample => "in-sample threshold",
            halluscope_core::harness::ThresholdSource::CalibrationSplit => "calibration split",
        }
    );
    out
}

pub fn score_set_markdown(set: &ScoreSet) -> String {
    let set = set.rounded();
    let mut out = format!(
        "Passage {} ({}, {})\n\n| Sentence | Score |\n|---:|---:|\n",
        set.passage_id, set.variant, set.config_fingerprint
    );
    for (k, s) in set.sentence_scores.iter().enumerate() {
        let _ = writeln!(out, "| {k} | {s:.4} |");
    }
    let _ = writeln!(out, "| passage | {:.4} |", set.passage_score);
    out
}
