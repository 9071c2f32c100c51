//! File formats, reports and the command-line front end for
//! [`halluscope_core`].
//!
//! Traces, annotations and IDF tables are JSON documents; see
//! [`formats`] for their shapes. [`runner::Runner`] scores many passages in
//! parallel and [`cli`] wires everything to the `halluscope` binary.

pub mod cli;
pub mod error;
pub mod formats;
pub mod io;
pub mod report;
pub mod runner;

pub use error::{Error, Result};
