//! Allocation-only core of the onion-domain ranking toolkit.
//!
//! Everything in this crate is a pure function of its inputs and builds
//! without `std`:
//!
//! - [`graph`]: directed link graph, PageRank, HITS, Katz, ToRank,
//!   closeness/betweenness/eigenvector centrality and k-shell pruning.
//! - [`features`]: the 40-column feature layout, TF-IDF vocabulary,
//!   address segmentation, gazetteer NER, visual/graph feature blocks and
//!   standardization.
//! - [`ltr`]: the shared 2-hidden-layer scoring network with pointwise,
//!   RankNet and ListNet losses, full-batch training and early stopping.
//! - [`metrics`]: DCG/NDCG, fold plans, cross-validation and the link-based
//!   baseline comparison.
//! - [`groundtruth`]: the 23-question annotation protocol, majority voting
//!   and gain computation.
//!
//! File formats, HTML parsing and the command line live in the `onionrank`
//! crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod features;
pub mod graph;
pub mod groundtruth;
pub mod ltr;
pub mod metrics;

mod math;

pub use features::{FeatureGroup, GroupSet, FEATURE_COUNT, FEATURE_NAMES};
pub use graph::{DiGraph, Ranking, Scores};
pub use ltr::{JudgedDomain, Mlp, Scheme, TrainConfig};
pub use metrics::{dcg_at_k, ndcg_at_k, FoldPlan, NdcgCurve};
