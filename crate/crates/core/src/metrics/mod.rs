//! DCG/NDCG, fold plans, cross-validation and the link-based baseline
//! comparison.
//!
//! DCG@K follows the form with an undiscounted first position:
//!
//! ```text
//! DCG@K = G_1 + Σ_{i=2..K} G_i / log2(i)
//! ```
//!
//! Since `log2(2) = 1`, positions 1 and 2 both count in full.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

mod cv;
mod folds;

pub use cv::{compare_baselines, cross_validate, CvOutcome, FoldOutcome, MethodCurve, DEFAULT_K_LIST, MIN_CV_DOMAINS};
pub use folds::{FoldPlan, FoldRoles, N_FOLDS};

use crate::features::FeatureError;
use crate::graph::GraphError;
use crate::ltr::LtrError;
use crate::math::log2;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricError {
    #[error("cutoff K must be >= 1, got {0}")]
    InvalidK(usize),
    #[error("cannot evaluate an empty ranking")]
    EmptyList,
    #[error("no ground-truth gain for `{0}`")]
    MissingGain(String),
    #[error("need at least {need} domains, got {got}")]
    TooFewDomains { need: usize, got: usize },
    #[error(transparent)]
    Ltr(#[from] LtrError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
}

/// DCG of the first `k` gains (k truncated to the list length).
pub fn dcg_at_k(gains: &[f64], k: usize) -> Result<f64, MetricError> {
    if k < 1 {
        return Err(MetricError::InvalidK(k));
    }
    if gains.is_empty() {
        return Err(MetricError::EmptyList);
    }
    let k = k.min(gains.len());
    Ok(gains[0] + (2..=k).map(|i| gains[i - 1] / log2(i as f64)).sum::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ndcg {
    pub value: f64,
    /// The ideal DCG was zero (all gains zero); `value` is then 0.
    pub degenerate: bool,
}

/// NDCG of gains listed in predicted order; the ideal order is the same
/// gains sorted descending.
pub fn ndcg_from_gains(gains_in_order: &[f64], k: usize) -> Result<Ndcg, MetricError> {
    let dcg = dcg_at_k(gains_in_order, k)?;
    let mut ideal = gains_in_order.to_vec();
    ideal.sort_by(|a, b| b.total_cmp(a));
    let idcg = dcg_at_k(&ideal, k)?;
    if idcg == 0.0 {
        return Ok(Ndcg { value: 0.0, degenerate: true });
    }
    Ok(Ndcg { value: dcg / idcg, degenerate: false })
}

/// NDCG@k of a predicted order of ids against ground-truth gains.
pub fn ndcg_at_k<S: AsRef<str>>(
    predicted_order: &[S],
    truth: &BTreeMap<String, f64>,
    k: usize,
) -> Result<Ndcg, MetricError> {
    let gains = predicted_order
        .iter()
        .map(|id| {
            truth
                .get(id.as_ref())
                .copied()
                .ok_or_else(|| MetricError::MissingGain(String::from(id.as_ref())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    ndcg_from_gains(&gains, k)
}

/// One cutoff of an NDCG curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub k: usize,
    pub mean: f64,
    pub per_fold: Vec<f64>,
}

/// Mean NDCG across folds for increasing cutoffs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NdcgCurve {
    pub points: Vec<CurvePoint>,
}

impl NdcgCurve {
    /// Builds a curve from per-fold values keyed by K (arithmetic mean).
    pub fn from_folds(per_k: BTreeMap<usize, Vec<f64>>) -> Self {
        let points = per_k
            .into_iter()
            .map(|(k, per_fold)| {
                let mean = if per_fold.is_empty() { 0.0 } else { per_fold.iter().sum::<f64>() / per_fold.len() as f64 };
                CurvePoint { k, mean, per_fold }
            })
            .collect();
        Self { points }
    }

    pub fn at(&self, k: usize) -> Option<&CurvePoint> {
        self.points.iter().find(|p| p.k == k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn truth() -> BTreeMap<String, f64> {
        [("A", 3.0), ("B", 2.0), ("C", 1.0)].into_iter().map(|(k, v)| (k.into(), v)).collect()
    }

    #[test]
    fn dcg_values() {
        assert_eq!(dcg_at_k(&[7.0, 1.0], 1).unwrap(), 7.0);
        let d = dcg_at_k(&[2.0, 3.0, 1.0], 3).unwrap();
        assert!((d - (5.0 + 1.0 / libm::log2(3.0))).abs() < 1e-12);
        assert!((d - 5.6309).abs() < 1e-4);
        assert_eq!(dcg_at_k(&[0.0; 4], 4).unwrap(), 0.0);
        assert_eq!(dcg_at_k(&[1.0], 0), Err(MetricError::InvalidK(0)));
        assert_eq!(dcg_at_k(&[], 3), Err(MetricError::EmptyList));
        // k beyond the list is truncated
        assert_eq!(dcg_at_k(&[1.0, 1.0], 10).unwrap(), 2.0);
    }

    #[test]
    fn ndcg_examples() {
        let t = truth();
        assert_eq!(ndcg_at_k(&["A", "B", "C"], &t, 3).unwrap().value, 1.0);
        // first two positions are undiscounted
        assert!((ndcg_at_k(&["B", "A", "C"], &t, 3).unwrap().value - 1.0).abs() < 1e-15);
        let v = ndcg_at_k(&["C", "B", "A"], &t, 3).unwrap().value;
        let want = (3.0 + 3.0 / libm::log2(3.0)) / (5.0 + 1.0 / libm::log2(3.0));
        assert!((v - want).abs() < 1e-12);
        assert!((v - 0.8689).abs() < 1e-4);
    }

    #[test]
    fn ndcg_degenerate_and_missing() {
        let zeros: BTreeMap<String, f64> = [("x".into(), 0.0), ("y".into(), 0.0)].into_iter().collect();
        let n = ndcg_at_k(&["x", "y"], &zeros, 2).unwrap();
        assert!(n.degenerate);
        assert_eq!(n.value, 0.0);
        assert_eq!(ndcg_at_k(&["x", "q"], &zeros, 2), Err(MetricError::MissingGain("q".into())));
    }

    #[test]
    fn curve_means() {
        let mut per_k = BTreeMap::new();
        per_k.insert(5, vec![1.0, 0.5]);
        per_k.insert(1, vec![1.0, 1.0]);
        let c = NdcgCurve::from_folds(per_k);
        assert_eq!(c.points[0].k, 1);
        assert_eq!(c.at(5).unwrap().mean, 0.75);
    }
}
