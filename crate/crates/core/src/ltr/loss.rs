//! Ranking losses with analytic gradients with respect to the scores.

use alloc::vec;
use alloc::vec::Vec;

use super::LtrError;
use crate::math::{exp, ln, sigmoid, softplus};

#[derive(Debug, Clone, PartialEq)]
pub struct LossOutput {
    pub loss: f64,
    pub grad: Vec<f64>,
    /// Set when the loss is identically zero because the list carries no
    /// ordering information (RankNet with all gains equal).
    pub degenerate: bool,
}

fn check(scores: &[f64], gains: &[f64], scheme: &'static str, need: usize) -> Result<(), LtrError> {
    if scores.len() != gains.len() {
        return Err(LtrError::LengthMismatch { scores: scores.len(), gains: gains.len() });
    }
    if scores.is_empty() {
        return Err(LtrError::EmptyList);
    }
    if scores.len() < need {
        return Err(LtrError::TooShort { scheme, need, got: scores.len() });
    }
    Ok(())
}

/// Mean squared error against `gain / gain_scale`.
pub fn loss_pointwise(scores: &[f64], gains: &[f64], gain_scale: f64) -> Result<LossOutput, LtrError> {
    check(scores, gains, "pointwise", 1)?;
    let n = scores.len() as f64;
    let mut loss = 0.0;
    let grad = scores
        .iter()
        .zip(gains)
        .map(|(&s, &g)| {
            let diff = s - g / gain_scale;
            loss += diff * diff;
            2.0 * diff / n
        })
        .collect();
    Ok(LossOutput { loss: loss / n, grad, degenerate: false })
}

/// RankNet: mean over ordered pairs `gain_i > gain_j` of
/// `-ln σ(s_i - s_j)`. Pairs with equal gains are skipped.
pub fn loss_ranknet(scores: &[f64], gains: &[f64]) -> Result<LossOutput, LtrError> {
    check(scores, gains, "ranknet", 2)?;
    let n = scores.len();
    let mut grad = vec![0.0; n];
    let mut loss = 0.0;
    let mut pairs = 0usize;
    for i in 0..n {
        for j in 0..n {
            if gains[i] > gains[j] {
                let diff = scores[i] - scores[j];
                loss += softplus(-diff);
                // d/d diff of -ln σ(diff) is -σ(-diff)
                let g = sigmoid(-diff);
                grad[i] -= g;
                grad[j] += g;
                pairs += 1;
            }
        }
    }
    if pairs == 0 {
        return Ok(LossOutput { loss: 0.0, grad, degenerate: true });
    }
    let p = pairs as f64;
    grad.iter_mut().for_each(|g| *g /= p);
    Ok(LossOutput { loss: loss / p, grad, degenerate: false })
}

fn log_softmax(x: &[f64]) -> Vec<f64> {
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_sum = ln(x.iter().map(|v| exp(v - max)).sum::<f64>()) + max;
    x.iter().map(|v| v - log_sum).collect()
}

/// ListNet top-one cross-entropy `-Σ q_i ln p_i` with `p = softmax(scores)`
/// and `q = softmax(gains)`. The gradient is `p - q`.
pub fn loss_listnet(scores: &[f64], gains: &[f64]) -> Result<LossOutput, LtrError> {
    check(scores, gains, "listnet", 2)?;
    let log_p = log_softmax(scores);
    let q: Vec<f64> = log_softmax(gains).into_iter().map(exp).collect();
    let loss = -q.iter().zip(&log_p).map(|(qi, lp)| qi * lp).sum::<f64>();
    let grad = log_p.iter().zip(&q).map(|(lp, qi)| exp(*lp) - qi).collect();
    Ok(LossOutput { loss, grad, degenerate: false })
}
