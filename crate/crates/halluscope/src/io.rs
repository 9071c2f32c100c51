//! File loading and writing.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use halluscope_core::annotation::AnnotationSet;
use halluscope_core::idf::IdfTable;
use halluscope_core::trace::PassageTrace;

use crate::error::{Error, Result};
use crate::formats::{self, DocFreqCounts, FormatError};

pub fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

fn parsed<T>(path: &Path, parse: impl FnOnce(&[u8]) -> Result<T, FormatError>) -> Result<T> {
    let raw = read(path)?;
    parse(&raw).map_err(|source| Error::Format {
        path: path.to_owned(),
        source,
    })
}

pub fn load_trace(path: &Path) -> Result<PassageTrace> {
    parsed(path, formats::parse_trace)
}

pub fn load_annotations(path: &Path) -> Result<AnnotationSet> {
    parsed(path, formats::parse_annotations)
}

pub fn load_idf(path: &Path) -> Result<IdfTable> {
    parsed(path, formats::parse_idf)
}

pub fn load_counts(path: &Path) -> Result<DocFreqCounts> {
    parsed(path, formats::parse_counts)
}

/// `*.json` files of a directory in name order.
pub fn json_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let io_err = |source| Error::Io {
        path: dir.to_owned(),
        source,
    };
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err)? {
        let path = entry.map_err(io_err)?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "json") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Every trace in `dir`, keyed by passage id.
pub fn load_trace_dir(dir: &Path) -> Result<BTreeMap<String, PassageTrace>> {
    let mut traces = BTreeMap::new();
    let mut origin: BTreeMap<String, PathBuf> = BTreeMap::new();
    for path in json_files(dir)? {
        let trace = load_trace(&path)?;
        if let Some(first) = origin.get(&trace.passage_id) {
            return Err(Error::DuplicatePassage {
                id: trace.passage_id,
                first: first.clone(),
                second: path,
            });
        }
        origin.insert(trace.passage_id.clone(), path);
        traces.insert(trace.passage_id.clone(), trace);
    }
    Ok(traces)
}
