//! Command-line interface.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use halluscope_core::config::{Feature, PipelineConfig, DEFAULT_GAMMA, DEFAULT_RHO};
use halluscope_core::harness::run_pipeline;
use halluscope_core::idf::{IdfSource, IdfTable};

use crate::error::{Error, Result};
use crate::formats;
use crate::io;
use crate::report;
use crate::runner::Runner;

#[derive(Debug, Parser)]
#[command(
    name = "halluscope",
    version,
    about = "Reference-free hallucination scores from recorded language-model traces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Markdown,
}

#[derive(Debug, Args)]
pub struct ScoringArgs {
    /// Per-hop decay of propagated penalties.
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    pub gamma: f64,
    /// Candidate-set probability threshold.
    #[arg(long, default_value_t = DEFAULT_RHO)]
    pub rho: f64,
    /// Features to switch off: keyword, penalty, type, idf. Repeatable and
    /// comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub disable: Vec<Feature>,
    /// IDF table; required unless `--disable idf`.
    #[arg(long)]
    pub idf: Option<PathBuf>,
}

impl ScoringArgs {
    pub fn config(&self) -> Result<PipelineConfig> {
        let mut config = PipelineConfig::full(self.gamma, self.rho);
        for &f in &self.disable {
            config.set(f, false);
        }
        config.validate()?;
        Ok(config)
    }

    fn load_idf(&self, config: &PipelineConfig) -> Result<Option<IdfTable>> {
        match (&self.idf, config.use_idf) {
            (Some(path), _) => Ok(Some(io::load_idf(path)?)),
            (None, true) => Err(Error::Usage(
                "IDF correction needs --idf <file> (or --disable idf)".into(),
            )),
            (None, false) => Ok(None),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score one trace and write its score set.
    Score {
        #[arg(long)]
        trace: PathBuf,
        #[command(flatten)]
        scoring: ScoringArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a directory of traces and evaluate against gold annotations.
    Evaluate {
        /// Directory of trace files, one passage each.
        #[arg(long)]
        traces: PathBuf,
        #[arg(long)]
        annotations: PathBuf,
        #[command(flatten)]
        scoring: ScoringArgs,
        /// JSON list of passage ids used to pick the balanced-accuracy
        /// threshold; the rest are scored with it.
        #[arg(long)]
        calibration: Option<PathBuf>,
        /// Directory receiving report.json and report.md.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Markdown)]
        format: Format,
        /// Worker threads; defaults to the number of logical CPUs.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run the five-step ablation ladder over plain and typed traces.
    Ablate {
        #[arg(long)]
        plain: PathBuf,
        #[arg(long)]
        typed: PathBuf,
        #[arg(long)]
        annotations: PathBuf,
        #[arg(long)]
        idf: PathBuf,
        #[arg(long, default_value_t = DEFAULT_GAMMA)]
        gamma: f64,
        #[arg(long, default_value_t = DEFAULT_RHO)]
        rho: f64,
        /// Directory receiving ablation.json and ablation.md.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Markdown)]
        format: Format,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Turn document-frequency counts into an IDF table.
    IdfBuild {
        #[arg(long)]
        counts: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Document frequency assumed for tokens missing from the counts.
        #[arg(long, default_value_t = 1)]
        default_df: u64,
    },
    /// Check a trace against every invariant and list violations.
    Validate {
        #[arg(long)]
        trace: PathBuf,
    },
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|source| Error::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

fn write_reports(dir: &Path, stem: &str, json: &str, markdown: &str) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_owned(),
        source,
    })?;
    io::write(&dir.join(format!("{stem}.json")), json)?;
    io::write(&dir.join(format!("{stem}.md")), markdown)
}

fn load_calibration(path: &Path) -> Result<BTreeSet<String>> {
    let raw = io::read(path)?;
    serde_json::from_slice(&raw).map_err(|e| Error::Format {
        path: path.to_owned(),
        source: formats::FormatError::Json {
            path: String::new(),
            message: e.to_string(),
        },
    })
}

/// Runs one command, writing results to `stdout`. Returns the exit code.
pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<u8> {
    match cli.command {
        Command::Score {
            trace,
            scoring,
            format,
            out,
        } => {
            let config = scoring.config()?;
            let idf = scoring.load_idf(&config)?;
            let trace = io::load_trace(&trace)?;
            let set = run_pipeline(&trace, idf.as_ref().map(|t| t as &dyn IdfSource), &config)?;
            let text = match format {
                Format::Json => formats::score_set_to_json(&set),
                Format::Markdown => report::score_set_markdown(&set),
            };
            match out {
                Some(path) => io::write(&path, &text)?,
                None => emit(stdout, &text)?,
            }
            Ok(0)
        }
        Command::Evaluate {
            traces,
            annotations,
            scoring,
            calibration,
            out,
            format,
            jobs,
        } => {
            let config = scoring.config()?;
            let idf = scoring.load_idf(&config)?;
            let annotations = io::load_annotations(&annotations)?;
            let traces = io::load_trace_dir(&traces)?;
            let calibration = calibration.as_deref().map(load_calibration).transpose()?;
            let runner = Runner::new(jobs)?;
            let result = runner.evaluate(
                &traces,
                &annotations,
                idf.as_ref(),
                &config,
                calibration.as_ref(),
            )?;
            let rounded = report::rounded_evaluation(&result);
            let json = formats::to_pretty(&rounded);
            let markdown = report::evaluation_markdown(&rounded);
            if let Some(dir) = out {
                write_reports(&dir, "report", &json, &markdown)?;
            }
            emit(
                stdout,
                if format == Format::Json {
                    &json
                } else {
                    &markdown
                },
            )?;
            Ok(0)
        }
        Command::Ablate {
            plain,
            typed,
            annotations,
            idf,
            gamma,
            rho,
            out,
            format,
            jobs,
        } => {
            PipelineConfig::full(gamma, rho).validate()?;
            let idf = io::load_idf(&idf)?;
            let annotations = io::load_annotations(&annotations)?;
            let plain = io::load_trace_dir(&plain)?;
            let typed = io::load_trace_dir(&typed)?;
            let runner = Runner::new(jobs)?;
            let result = runner.ablate(&plain, &typed, &annotations, Some(&idf), gamma, rho)?;
            let rounded = report::rounded_ablation(&result);
            let json = formats::to_pretty(&rounded);
            let markdown = report::ablation_markdown(&rounded);
            if let Some(dir) = out {
                write_reports(&dir, "ablation", &json, &markdown)?;
            }
            emit(
                stdout,
                if format == Format::Json {
                    &json
                } else {
                    &markdown
                },
            )?;
            Ok(0)
        }
        Command::IdfBuild {
            counts,
            out,
            default_df,
        } => {
            let parsed = io::load_counts(&counts)?;
            let table = formats::build_idf(parsed, default_df).map_err(|source| Error::Format {
                path: counts.clone(),
                source,
            })?;
            io::write(&out, &formats::idf_to_json(&table))?;
            Ok(0)
        }
        Command::Validate { trace } => {
            let parsed = io::load_trace(&trace)?;
            let violations = parsed.validate();
            for v in &violations {
                let _ = writeln!(stderr, "{}: {v}", trace.display());
            }
            if violations.is_empty() {
                emit(
                    stdout,
                    &format!(
                        "{}: ok ({} tokens, {} keywords)\n",
                        trace.display(),
                        parsed.tokens.len(),
                        parsed.keyword_count()
                    ),
                )?;
                Ok(0)
            } else {
                emit(
                    stdout,
                    &format!("{}: {} violation(s)\n", trace.display(), violations.len()),
                )?;
                Ok(1)
            }
        }
    }
}
