//! Five-fold cross-validation of a learning-to-rank scheme and of the
//! link-analysis baselines on the same folds.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{ndcg_from_gains, FoldPlan, MetricError, NdcgCurve, N_FOLDS};
use crate::features::StandardizationStats;
use crate::graph::{DiGraph, LinkAlgorithm};
use crate::ltr::{predict_rank, train, JudgedDomain, ModelParams, RankedDomain, Scheme, TrainConfig, TrainHistory};

pub const DEFAULT_K_LIST: [usize; 13] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 15, 20, 25];

/// Below this, some fold would hold a single domain.
pub const MIN_CV_DOMAINS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct FoldOutcome {
    pub iteration: usize,
    pub test_ids: Vec<String>,
    pub ranking: Vec<RankedDomain>,
    pub history: TrainHistory,
    pub params: ModelParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodCurve {
    pub method: String,
    pub curve: NdcgCurve,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvOutcome {
    pub plan: FoldPlan,
    pub method: MethodCurve,
    pub folds: Vec<FoldOutcome>,
    /// Human-readable remarks, e.g. a K truncated to the fold size.
    pub notes: Vec<String>,
}

fn sorted_k_list(k_list: &[usize]) -> Result<Vec<usize>, MetricError> {
    if let Some(&bad) = k_list.iter().find(|&&k| k == 0) {
        return Err(MetricError::InvalidK(bad));
    }
    let mut ks = k_list.to_vec();
    ks.sort_unstable();
    ks.dedup();
    if ks.is_empty() {
        return Err(MetricError::InvalidK(0));
    }
    Ok(ks)
}

fn gain_table(judged: &[JudgedDomain]) -> BTreeMap<String, f64> {
    judged.iter().map(|d| (d.domain_id.clone(), d.gain() as f64)).collect()
}

/// Records NDCG@K of one fold's ordering for every K.
fn score_fold(
    method: &str,
    fold: usize,
    order: &[String],
    gains: &BTreeMap<String, f64>,
    ks: &[usize],
    per_k: &mut BTreeMap<usize, Vec<f64>>,
    notes: &mut Vec<String>,
) -> Result<(), MetricError> {
    let ordered: Vec<f64> = order
        .iter()
        .map(|id| gains.get(id).copied().ok_or_else(|| MetricError::MissingGain(id.clone())))
        .collect::<Result<_, _>>()?;
    for &k in ks {
        if k > ordered.len() {
            notes.push(format!("{method}: K={k} truncated to {} in fold {fold}", ordered.len()));
        }
        let ndcg = ndcg_from_gains(&ordered, k)?;
        if ndcg.degenerate {
            notes.push(format!("{method}: all gains zero in fold {fold}; NDCG@{k} set to 0"));
        }
        per_k.entry(k).or_default().push(ndcg.value);
    }
    Ok(())
}

fn check_count(judged: &[JudgedDomain]) -> Result<(), MetricError> {
    if judged.len() < MIN_CV_DOMAINS {
        return Err(MetricError::TooFewDomains { need: MIN_CV_DOMAINS, got: judged.len() });
    }
    Ok(())
}

/// Cross-validates `scheme` on raw (unstandardized) feature rows.
///
/// Each iteration fits standardization on its three training folds only,
/// trains with early stopping on the validation fold and scores the test
/// fold. The fold plan is seeded by `plan_seed`; training uses `cfg.seed`.
pub fn cross_validate(
    judged: &[JudgedDomain],
    scheme: Scheme,
    cfg: &TrainConfig,
    k_list: &[usize],
    plan_seed: u64,
) -> Result<CvOutcome, MetricError> {
    check_count(judged)?;
    let ks = sorted_k_list(k_list)?;
    let plan = FoldPlan::new(judged.iter().map(|d| d.domain_id.clone()), plan_seed)?;
    let by_id: BTreeMap<&str, &JudgedDomain> = judged.iter().map(|d| (d.domain_id.as_str(), d)).collect();
    let gains = gain_table(judged);
    let width = judged[0].features.len();
    let method = scheme.algorithm();

    let mut per_k = BTreeMap::new();
    let mut notes = Vec::new();
    let mut folds = Vec::with_capacity(N_FOLDS);
    for iteration in 0..N_FOLDS {
        let roles = plan.roles(iteration);
        let pick = |ids: &[String]| -> Vec<&JudgedDomain> { ids.iter().map(|id| by_id[id.as_str()]).collect() };
        let (train_raw, val_raw, test_raw) = (pick(&roles.train), pick(&roles.validation), pick(&roles.test));

        let train_rows: Vec<Vec<f64>> = train_raw.iter().map(|d| d.features.clone()).collect();
        let stats = StandardizationStats::fit(&train_rows, width);
        let standardized = |set: &[&JudgedDomain]| -> Result<Vec<JudgedDomain>, MetricError> {
            set.iter()
                .map(|d| {
                    Ok(JudgedDomain::new(d.domain_id.clone(), d.gain(), stats.apply_row(&d.features)?)?)
                })
                .collect()
        };
        let (tr, va, te) = (standardized(&train_raw)?, standardized(&val_raw)?, standardized(&test_raw)?);

        let (mut params, history) = train(scheme, &tr, &va, cfg)?;
        params.stats = Some(stats.clone());
        let ranking = predict_rank(&params.network, te.iter().map(|d| (d.domain_id.as_str(), d.features.as_slice())))?;
        let order: Vec<String> = ranking.iter().map(|r| r.domain_id.clone()).collect();
        score_fold(method, iteration, &order, &gains, &ks, &mut per_k, &mut notes)?;
        folds.push(FoldOutcome { iteration, test_ids: roles.test, ranking, history, params });
    }

    Ok(CvOutcome {
        plan,
        method: MethodCurve { method: String::from(method), curve: NdcgCurve::from_folds(per_k) },
        folds,
        notes,
    })
}

/// Runs each link algorithm on the subgraph induced by every test fold and
/// scores its ordering against the judged gains. Returns one curve per
/// method, in input order, plus truncation notes.
pub fn compare_baselines(
    judged: &[JudgedDomain],
    graph: &DiGraph,
    plan: &FoldPlan,
    methods: &[LinkAlgorithm],
    k_list: &[usize],
) -> Result<(Vec<MethodCurve>, Vec<String>), MetricError> {
    check_count(judged)?;
    let ks = sorted_k_list(k_list)?;
    let gains = gain_table(judged);
    let mut notes = Vec::new();
    let mut per_method: Vec<BTreeMap<usize, Vec<f64>>> = methods.iter().map(|_| BTreeMap::new()).collect();
    for iteration in 0..N_FOLDS {
        let test = plan.roles(iteration).test;
        let sub = graph.induced_by_labels(test.iter().cloned());
        for (algo, per_k) in methods.iter().zip(per_method.iter_mut()) {
            let ranking = algo.rank(&sub)?;
            let order: Vec<String> = ranking.order().map(|i| String::from(sub.label(i))).collect();
            score_fold(algo.name(), iteration, &order, &gains, &ks, per_k, &mut notes)?;
        }
    }
    let curves = methods
        .iter()
        .zip(per_method)
        .map(|(algo, per_k)| MethodCurve { method: String::from(algo.name()), curve: NdcgCurve::from_folds(per_k) })
        .collect();
    Ok((curves, notes))
}
