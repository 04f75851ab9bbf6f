//! File formats, configuration, synthetic corpora, and reporting for the
//! `agrb` command-line tool. The algorithms live in `agrb-core`; this crate
//! is everything that touches the filesystem.

pub mod config;
pub mod error;
pub mod formats;
pub mod report;
pub mod synth;
pub mod trace;

pub use error::{CliError, Result};
