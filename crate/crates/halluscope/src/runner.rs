//! Parallel scoring over many passages.
//!
//! Passages are scored on a rayon pool; results are gathered into ordered
//! maps before any metric is computed, so output does not depend on the
//! number of workers.

use std::collections::{BTreeMap, BTreeSet};

use halluscope_core::annotation::AnnotationSet;
use halluscope_core::harness::{
    ablation_ladder, build_sentence_tasks, calibrated_balanced_accuracy, check_variants, evaluate,
    run_pipeline, AblationReport, AblationRow, HarnessError,
};
use halluscope_core::idf::{IdfSource, IdfTable};
use halluscope_core::scoring::ScoreSet;
use halluscope_core::trace::{PassageTrace, Variant};
use halluscope_core::PipelineConfig;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::report::EvaluationReport;

pub struct Runner {
    pool: rayon::ThreadPool,
}

impl Runner {
    /// `jobs = None` uses one worker per logical CPU.
    pub fn new(jobs: Option<usize>) -> Result<Self> {
        let threads = jobs.unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        });
        if threads == 0 {
            return Err(Error::Usage("--jobs must be at least 1".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Usage(format!("cannot start worker pool: {e}")))?;
        Ok(Runner { pool })
    }

    pub fn score(
        &self,
        traces: &BTreeMap<String, PassageTrace>,
        idf: Option<&IdfTable>,
        config: &PipelineConfig,
    ) -> Result<BTreeMap<String, ScoreSet>, HarnessError> {
        self.pool.install(|| {
            traces
                .par_iter()
                .map(|(id, trace)| {
                    let idf = idf.map(|t| t as &dyn IdfSource);
                    Ok((id.clone(), run_pipeline(trace, idf, config)?))
                })
                .collect::<Result<Vec<_>, HarnessError>>()
                .map(|v| v.into_iter().collect())
        })
    }

    /// Scores and evaluates one configuration. Every trace must be annotated
    /// and every annotated passage must have a trace.
    pub fn evaluate(
        &self,
        traces: &BTreeMap<String, PassageTrace>,
        annotations: &AnnotationSet,
        idf: Option<&IdfTable>,
        config: &PipelineConfig,
        calibration: Option<&BTreeSet<String>>,
    ) -> Result<EvaluationReport> {
        check_coverage(traces.keys(), annotations)?;
        let scores = self.score(traces, idf, config)?;
        let metrics = evaluate(annotations, &scores)?;
        let [nonfactual, ..] = build_sentence_tasks(annotations, &scores)?;
        let balanced_accuracy = calibrated_balanced_accuracy(&nonfactual, calibration)?;
        Ok(EvaluationReport {
            config_fingerprint: config.fingerprint(),
            config: *config,
            passages: annotations.len(),
            sentences: nonfactual.samples.len(),
            metrics,
            balanced_accuracy,
        })
    }

    /// The five-row ablation ladder.
    pub fn ablate(
        &self,
        plain: &BTreeMap<String, PassageTrace>,
        typed: &BTreeMap<String, PassageTrace>,
        annotations: &AnnotationSet,
        idf: Option<&IdfTable>,
        gamma: f64,
        rho: f64,
    ) -> Result<AblationReport> {
        check_variants(annotations, plain, typed)?;
        check_coverage(plain.keys(), annotations)?;
        let mut rows = Vec::with_capacity(5);
        for step in ablation_ladder(gamma, rho) {
            let traces = match step.variant {
                Variant::Plain => plain,
                Variant::Typed => typed,
            };
            let scores = self.score(traces, idf, &step.config)?;
            rows.push(AblationRow {
                label: step.label.into(),
                variant: step.variant,
                config: step.config,
                metrics: evaluate(annotations, &scores)?,
            });
        }
        Ok(AblationReport { gamma, rho, rows })
    }
}

fn check_coverage<'a>(
    ids: impl Iterator<Item = &'a String> + Clone,
    annotations: &AnnotationSet,
) -> Result<()> {
    let unannotated: Vec<String> = ids
        .clone()
        .filter(|id| annotations.get(id).is_none())
        .cloned()
        .collect();
    if !unannotated.is_empty() {
        return Err(Error::Unannotated(unannotated));
    }
    let present: BTreeSet<&String> = ids.collect();
    let missing: Vec<String> = annotations
        .passages
        .keys()
        .filter(|id| !present.contains(id))
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingTraces(missing));
    }
    Ok(())
}
