//! Optional TOML run configuration. Command-line flags override file
//! values, which override built-in defaults.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::formats::read_text;

/// Every key is optional; unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub scheme: Option<String>,
    pub groups: Option<String>,
    pub k_list: Option<Vec<usize>>,
    pub learning_rate: Option<f64>,
    pub max_epochs: Option<usize>,
    pub patience: Option<usize>,
    pub min_delta: Option<f64>,
    pub dropout: Option<f64>,
    pub listnet_gain_scale: Option<f64>,
    pub reference_date: Option<String>,
    pub recency_days: Option<u64>,
    pub landing_only: Option<bool>,
    pub invert_keyword_ratio: Option<bool>,
    pub popularity_threshold: Option<usize>,
    pub top_x: Option<usize>,
    pub vocab_size: Option<usize>,
    pub min_df: Option<usize>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub max_iter: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => toml::from_str(&read_text(p)?).map_err(|e| Error::format(p, e.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_known_keys_and_rejects_others() {
        let c: FileConfig = toml::from_str("seed = 7\nk_list = [1, 5]\nlanding_only = true\n").unwrap();
        assert_eq!(c.seed, Some(7));
        assert_eq!(c.k_list, Some(vec![1, 5]));
        assert_eq!(c.landing_only, Some(true));
        assert!(toml::from_str::<FileConfig>("sed = 7\n").is_err());
    }
}
