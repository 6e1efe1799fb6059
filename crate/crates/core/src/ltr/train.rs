//! Full-batch gradient descent with early stopping on validation NDCG.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{JudgedDomain, LtrError, Mlp, ModelParams, Scheme, TrainConfig};
use crate::metrics::ndcg_from_gains;

/// Dropout masks use a stream distinct from weight initialization.
const DROPOUT_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: f64,
    pub val_ndcg: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainHistory {
    pub epochs: Vec<EpochRecord>,
    /// Epoch whose parameters were kept; 0 means the initial parameters.
    pub best_epoch: usize,
    pub best_val_ndcg: f64,
    pub stopped_early: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedDomain {
    pub domain_id: String,
    pub score: f64,
    pub rank: usize,
}

/// Ranks `(id, standardized features)` pairs by descending evaluation-mode
/// score; ties go to the smaller id.
pub fn predict_rank<'a, I>(network: &Mlp, domains: I) -> Result<Vec<RankedDomain>, LtrError>
where
    I: IntoIterator<Item = (&'a str, &'a [f64])>,
{
    let mut scored = domains
        .into_iter()
        .map(|(id, x)| Ok((String::from(id), network.score(x)?)))
        .collect::<Result<Vec<_>, LtrError>>()?;
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(scored
        .into_iter()
        .enumerate()
        .map(|(i, (domain_id, score))| RankedDomain { domain_id, score, rank: i + 1 })
        .collect())
}

fn validation_ndcg(network: &Mlp, val: &[JudgedDomain], k: usize) -> Result<f64, LtrError> {
    let ranked = predict_rank(network, val.iter().map(|d| (d.domain_id.as_str(), d.features.as_slice())))?;
    let gain_of = |id: &str| val.iter().find(|d| d.domain_id == id).map(|d| d.gain() as f64).unwrap_or(0.0);
    let gains: Vec<f64> = ranked.iter().map(|r| gain_of(&r.domain_id)).collect();
    Ok(ndcg_from_gains(&gains, k).map(|n| n.value).unwrap_or(0.0))
}

fn check_inputs(train: &[JudgedDomain], val: &[JudgedDomain]) -> Result<usize, LtrError> {
    let first = train.first().ok_or(LtrError::EmptyTrainingSet)?;
    if val.is_empty() {
        return Err(LtrError::EmptyValidationSet);
    }
    let dim = first.features.len();
    if let Some(bad) = train.iter().chain(val).find(|d| d.features.len() != dim) {
        return Err(LtrError::DimensionMismatch { expected: dim, got: bad.features.len() });
    }
    let train_ids: BTreeSet<&str> = train.iter().map(|d| d.domain_id.as_str()).collect();
    if let Some(dup) = val.iter().find(|d| train_ids.contains(d.domain_id.as_str())) {
        return Err(LtrError::OverlappingSplits(dup.domain_id.clone()));
    }
    Ok(dim)
}

/// Trains a fresh network under `scheme` on standardized rows.
///
/// After every epoch the validation NDCG@`eval_k` is computed with dropout
/// off. The parameters with the best validation score are returned; training
/// stops once `patience` epochs pass without an improvement above
/// `min_delta`.
pub fn train(
    scheme: Scheme,
    train: &[JudgedDomain],
    val: &[JudgedDomain],
    cfg: &TrainConfig,
) -> Result<(ModelParams, TrainHistory), LtrError> {
    cfg.validate()?;
    let dim = check_inputs(train, val)?;
    let mut network = Mlp::new(dim, cfg.hidden, cfg.init, cfg.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ DROPOUT_STREAM);
    let gains: Vec<f64> = train.iter().map(|d| d.gain() as f64).collect();

    let mut best = validation_ndcg(&network, val, cfg.eval_k)?;
    let mut history = TrainHistory { best_val_ndcg: best, ..Default::default() };
    let mut best_network = network.clone();
    let mut waited = 0;

    for epoch in 1..=cfg.max_epochs {
        let (scores, traces): (Vec<f64>, Vec<_>) = train
            .iter()
            .map(|d| network.forward_traced(&d.features, cfg.dropout, &mut rng))
            .unzip();
        let out = scheme.loss(&scores, &gains, cfg)?;
        if !out.loss.is_finite() {
            return Err(LtrError::NonFiniteLoss { epoch, loss: out.loss });
        }
        let mut grad = network.zeros_like();
        for ((d, trace), &ds) in train.iter().zip(&traces).zip(&out.grad) {
            if ds != 0.0 {
                network.backward(&d.features, trace, ds, &mut grad);
            }
        }
        network.descend(&grad, cfg.learning_rate);

        let val_ndcg = validation_ndcg(&network, val, cfg.eval_k)?;
        history.epochs.push(EpochRecord { epoch, loss: out.loss, val_ndcg });
        if val_ndcg > best + cfg.min_delta {
            best = val_ndcg;
            best_network = network.clone();
            history.best_epoch = epoch;
            history.best_val_ndcg = val_ndcg;
            waited = 0;
        } else {
            waited += 1;
            if waited >= cfg.patience {
                history.stopped_early = true;
                break;
            }
        }
    }

    let params = ModelParams { network: best_network, seed: cfg.seed, scheme, stats: None };
    Ok((params, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltr::Init;
    use alloc::format;
    use alloc::vec;
    use rand::Rng;

    /// Gains are a rounded monotone function of the first two features.
    fn planted(n: usize, seed: u64) -> Vec<JudgedDomain> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|i| {
                let x: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
                let latent = (x[0] * 2.0 + x[1] + 3.0) / 6.0 * 23.0;
                let gain = libm::round(latent).clamp(0.0, 23.0) as u32;
                JudgedDomain::new(format!("d{i:03}"), gain, x).unwrap()
            })
            .collect()
    }

    #[test]
    fn zero_learning_rate_keeps_parameters() {
        let data = planted(30, 1);
        let cfg = TrainConfig { learning_rate: 0.0, max_epochs: 1, hidden: [8, 4], ..Default::default() };
        let (params, history) = train(Scheme::Listwise, &data[..20], &data[20..], &cfg).unwrap();
        assert_eq!(params.network, Mlp::new(6, [8, 4], Init::Glorot, cfg.seed));
        assert_eq!(history.epochs.len(), 1);
    }

    #[test]
    fn same_seed_same_model() {
        let data = planted(40, 2);
        let cfg = TrainConfig { max_epochs: 30, hidden: [16, 8], learning_rate: 0.05, ..Default::default() };
        for scheme in Scheme::ALL {
            let a = train(scheme, &data[..30], &data[30..], &cfg).unwrap();
            let b = train(scheme, &data[..30], &data[30..], &cfg).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn rejects_bad_splits() {
        let data = planted(10, 3);
        let cfg = TrainConfig::default();
        assert_eq!(train(Scheme::Listwise, &[], &data, &cfg).unwrap_err(), LtrError::EmptyTrainingSet);
        assert_eq!(train(Scheme::Listwise, &data, &[], &cfg).unwrap_err(), LtrError::EmptyValidationSet);
        assert!(matches!(
            train(Scheme::Listwise, &data[..6], &data[5..], &cfg),
            Err(LtrError::OverlappingSplits(_))
        ));
    }

    #[test]
    fn listnet_learns_planted_order() {
        let data = planted(200, 4);
        let cfg = TrainConfig { learning_rate: 0.05, max_epochs: 2000, ..Default::default() };
        let (params, history) = train(Scheme::Listwise, &data[..140], &data[140..], &cfg).unwrap();
        assert!(history.best_val_ndcg >= 0.95, "val ndcg {}", history.best_val_ndcg);
        assert!(params.network.is_valid());
    }

    #[test]
    fn predict_rank_ties_and_permutation() {
        let net = Mlp::new(2, [4, 2], Init::Zeros, 0);
        let rows = [("b", vec![1.0, 0.0]), ("a", vec![0.0, 1.0])];
        let r = predict_rank(&net, rows.iter().map(|(id, x)| (*id, x.as_slice()))).unwrap();
        assert_eq!(r[0].domain_id, "a");
        assert_eq!(r[1].rank, 2);
        let single = predict_rank(&net, [("z", &[0.0, 0.0][..])]).unwrap();
        assert_eq!(single[0].rank, 1);
    }
}
