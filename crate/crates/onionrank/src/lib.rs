//! Corpus ingestion, feature extraction, file formats, the synthetic corpus
//! generator and the `onionrank` command line, on top of `onionrank-core`.

pub mod annotate;
pub mod cli;
pub mod config;
pub mod corpus;
pub mod error;
pub mod extract;
pub mod formats;
pub mod synth;

pub use error::{Error, Result};
