//! Hallucination scoring over recorded language-model inference traces.
//!
//! The crate is `no_std` and only needs `alloc`. It owns the data model
//! ([`trace`], [`annotation`], [`idf`]), the scoring math ([`scoring`],
//! [`propagation`], [`correction`]), the evaluation metrics ([`metrics`]) and
//! the task/ablation assembly ([`harness`]). Reading files, parallel scoring
//! and report rendering live in the `halluscope` companion crate.
//!
//! A typical scoring run:
//!
//! ```
//! use halluscope_core::config::PipelineConfig;
//! use halluscope_core::harness::run_pipeline;
//! # use halluscope_core::trace::*;
//! # fn tok(i: usize, s: usize, p: f64, kw: bool) -> TokenRecord {
//! #     TokenRecord {
//! #         index: i, text: "x".into(), sentence_index: s, logprob: p.ln(),
//! #         entropy_term: 1.5, is_keyword: kw,
//! #         keyword_class: if kw { KeywordClass::Noun } else { KeywordClass::None },
//! #         entity_type: None, is_tag: false,
//! #         candidates: vec![Candidate::new("x", p)], tail_mass: 1.0 - p,
//! #     }
//! # }
//! # let trace = PassageTrace {
//! #     schema_version: 1, passage_id: "p".into(), variant: Variant::Plain,
//! #     prompt: String::new(), model_id: String::new(),
//! #     tokens: vec![tok(0, 0, 0.5, true), tok(1, 0, 0.9, false)],
//! #     attention: Attention::default(),
//! # };
//! let config = PipelineConfig::baseline();
//! let scores = run_pipeline(&trace, None, &config).unwrap();
//! assert_eq!(scores.sentence_scores.len(), 1);
//! ```
#![cfg_attr(not(test), no_std)]
// `!(x > y)` comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod annotation;
pub mod config;
pub mod correction;
pub mod harness;
pub mod idf;
pub mod metrics;
pub mod propagation;
pub mod scoring;
pub mod trace;

pub use annotation::{AnnotationSet, Label};
pub use config::{Feature, PipelineConfig};
pub use idf::{IdfSource, IdfTable};
pub use scoring::{ScoreSet, TokenScore};
pub use trace::{PassageTrace, TokenRecord, Variant};
