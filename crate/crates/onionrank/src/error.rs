use std::path::{Path, PathBuf};

use onionrank_core::features::FeatureError;
use onionrank_core::graph::GraphError;
use onionrank_core::groundtruth::GroundTruthError;
use onionrank_core::ltr::LtrError;
use onionrank_core::metrics::MetricError;

use crate::corpus::CorpusError;

/// Every failure past argument parsing is a data error.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Ltr(#[from] LtrError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    GroundTruth(#[from] GroundTruthError),
}

impl Error {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io { path: path.to_path_buf(), source }
    }

    pub fn format(path: &Path, message: impl Into<String>) -> Self {
        Self::Format { path: path.to_path_buf(), message: message.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
