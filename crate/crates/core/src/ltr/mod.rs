//! Learning-to-rank over a shared two-hidden-layer scoring network.
//!
//! The three schemes differ only in the loss applied to the list of scores
//! of the training set:
//!
//! | scheme    | loss                                           |
//! |-----------|------------------------------------------------|
//! | pointwise | mean squared error against `gain / 23`         |
//! | pairwise  | RankNet: mean `-ln σ(s_i - s_j)` over `g_i > g_j` |
//! | listwise  | ListNet top-one cross-entropy `-Σ q ln p`       |

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

mod loss;
mod model;
mod train;

pub use loss::{loss_listnet, loss_pointwise, loss_ranknet, LossOutput};
pub use model::{Dense, Mlp, ModelParams, HIDDEN_SIZES};
pub use train::{predict_rank, train, EpochRecord, RankedDomain, TrainHistory};

use crate::features::FeatureError;

/// Highest possible gain (number of questionnaire items).
pub const MAX_GAIN: u32 = 23;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LtrError {
    #[error("score list is empty")]
    EmptyList,
    #[error("{scheme} loss needs at least {need} items, got {got}")]
    TooShort { scheme: &'static str, need: usize, got: usize },
    #[error("{scores} scores but {gains} gains")]
    LengthMismatch { scores: usize, gains: usize },
    #[error("model expects {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("gain {0} outside [0, 23]")]
    GainOutOfRange(u32),
    #[error("non-finite loss at epoch {epoch}: {loss}")]
    NonFiniteLoss { epoch: usize, loss: f64 },
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("validation set is empty")]
    EmptyValidationSet,
    #[error("domain `{0}` appears in both training and validation sets")]
    OverlappingSplits(String),
    #[error("invalid training configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("unknown scheme `{0}` (expected pointwise, pairwise or listwise)")]
    UnknownScheme(String),
    #[error(transparent)]
    Feature(#[from] FeatureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Pointwise,
    Pairwise,
    Listwise,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Self::Pointwise, Self::Pairwise, Self::Listwise];

    pub fn name(self) -> &'static str {
        match self {
            Self::Pointwise => "pointwise",
            Self::Pairwise => "pairwise",
            Self::Listwise => "listwise",
        }
    }

    /// Name of the algorithm trained under this scheme.
    pub fn algorithm(self) -> &'static str {
        match self {
            Self::Pointwise => "mlp",
            Self::Pairwise => "ranknet",
            Self::Listwise => "listnet",
        }
    }

    /// Accepts scheme names and algorithm names.
    pub fn parse(name: &str) -> Result<Self, LtrError> {
        match name.trim().to_ascii_lowercase().as_str() {
            "pointwise" | "mlp" => Ok(Self::Pointwise),
            "pairwise" | "ranknet" => Ok(Self::Pairwise),
            "listwise" | "listnet" => Ok(Self::Listwise),
            _ => Err(LtrError::UnknownScheme(name.to_string())),
        }
    }

    /// Loss and gradient of this scheme for one list.
    pub fn loss(self, scores: &[f64], gains: &[f64], cfg: &TrainConfig) -> Result<LossOutput, LtrError> {
        match self {
            Self::Pointwise => loss_pointwise(scores, gains, cfg.pointwise_gain_scale),
            Self::Pairwise => loss_ranknet(scores, gains),
            Self::Listwise => {
                let scaled: Vec<f64> = gains.iter().map(|g| g / cfg.listnet_gain_scale).collect();
                loss_listnet(scores, &scaled)
            }
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A domain with its ground-truth gain and feature row.
#[derive(Debug, Clone, PartialEq)]
pub struct JudgedDomain {
    pub domain_id: String,
    gain: u32,
    pub features: Vec<f64>,
}

impl JudgedDomain {
    pub fn new(domain_id: impl Into<String>, gain: u32, features: Vec<f64>) -> Result<Self, LtrError> {
        if gain > MAX_GAIN {
            return Err(LtrError::GainOutOfRange(gain));
        }
        Ok(Self { domain_id: domain_id.into(), gain, features })
    }

    pub fn gain(&self) -> u32 {
        self.gain
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Init {
    /// Uniform in `±sqrt(6 / (fan_in + fan_out))`, biases zero.
    Glorot,
    /// All parameters zero; the network scores every input as 0.
    Zeros,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub max_epochs: usize,
    /// Epochs without a validation improvement above `min_delta` before
    /// stopping.
    pub patience: usize,
    pub min_delta: f64,
    pub dropout: f64,
    pub seed: u64,
    pub hidden: [usize; 2],
    pub init: Init,
    /// Pointwise targets are `gain / pointwise_gain_scale`.
    pub pointwise_gain_scale: f64,
    /// ListNet reference distribution is `softmax(gain / listnet_gain_scale)`.
    pub listnet_gain_scale: f64,
    /// Cutoff of the validation NDCG used for early stopping.
    pub eval_k: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            max_epochs: 2000,
            patience: 50,
            min_delta: 1e-4,
            dropout: 0.5,
            seed: 0,
            hidden: HIDDEN_SIZES,
            init: Init::Glorot,
            pointwise_gain_scale: MAX_GAIN as f64,
            listnet_gain_scale: 1.0,
            eval_k: 10,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), LtrError> {
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(LtrError::InvalidConfig("learning_rate must be finite and >= 0"));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(LtrError::InvalidConfig("dropout must be in [0, 1)"));
        }
        if self.max_epochs == 0 || self.patience == 0 {
            return Err(LtrError::InvalidConfig("max_epochs and patience must be positive"));
        }
        if self.min_delta < 0.0 {
            return Err(LtrError::InvalidConfig("min_delta must be >= 0"));
        }
        if self.hidden.contains(&0) {
            return Err(LtrError::InvalidConfig("hidden layers must be non-empty"));
        }
        if !(self.pointwise_gain_scale > 0.0 && self.listnet_gain_scale > 0.0) {
            return Err(LtrError::InvalidConfig("gain scales must be positive"));
        }
        if self.eval_k == 0 {
            return Err(LtrError::InvalidConfig("eval_k must be >= 1"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn scheme_aliases() {
        assert_eq!(Scheme::parse("listnet").unwrap(), Scheme::Listwise);
        assert_eq!(Scheme::parse("Pairwise").unwrap(), Scheme::Pairwise);
        assert_eq!(Scheme::parse("mlp").unwrap(), Scheme::Pointwise);
        assert!(Scheme::parse("lambdamart").is_err());
    }

    #[test]
    fn gain_range_checked() {
        assert!(JudgedDomain::new("a", 23, vec![]).is_ok());
        assert_eq!(JudgedDomain::new("a", 24, vec![]), Err(LtrError::GainOutOfRange(24)));
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        let bad = TrainConfig { dropout: 1.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = TrainConfig { learning_rate: f64::NAN, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
