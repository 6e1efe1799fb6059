//! Document-frequency vocabulary and smoothed TF-IDF weighting.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use super::FeatureError;
use crate::math::{ln, sqrt};

pub const DEFAULT_VOCAB_SIZE: usize = 10_000;
pub const DEFAULT_MIN_DF: usize = 3;

/// Lowercased maximal runs of alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.chars().flat_map(char::to_lowercase).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TfIdfModel {
    vocabulary: Vec<String>,
    document_frequency: Vec<usize>,
    n_documents: usize,
    index: BTreeMap<String, usize>,
}

impl TfIdfModel {
    /// Keeps the `vocab_size` terms of highest document frequency among
    /// those with document frequency `>= min_df`; ties by term.
    pub fn fit<D, T>(documents: D, vocab_size: usize, min_df: usize) -> Result<Self, FeatureError>
    where
        D: IntoIterator<Item = T>,
        T: AsRef<[String]>,
    {
        let mut df: BTreeMap<&str, usize> = BTreeMap::new();
        let mut n_documents = 0;
        let docs: Vec<T> = documents.into_iter().collect();
        for doc in &docs {
            n_documents += 1;
            let distinct: BTreeSet<&str> = doc.as_ref().iter().map(String::as_str).collect();
            for term in distinct {
                *df.entry(term).or_default() += 1;
            }
        }
        if n_documents == 0 {
            return Err(FeatureError::EmptyCorpus);
        }
        let mut terms: Vec<(&str, usize)> = df.into_iter().filter(|&(_, c)| c >= min_df).collect();
        terms.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        terms.truncate(vocab_size);

        let vocabulary: Vec<String> = terms.iter().map(|(t, _)| String::from(*t)).collect();
        let index = vocabulary.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Ok(Self {
            vocabulary,
            document_frequency: terms.iter().map(|&(_, c)| c).collect(),
            n_documents,
            index,
        })
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn document_frequency(&self) -> &[usize] {
        &self.document_frequency
    }

    pub fn n_documents(&self) -> usize {
        self.n_documents
    }

    pub fn term_index(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn contains(&self, term: &str) -> bool {
        self.index.contains_key(term)
    }

    /// `ln((1 + n) / (1 + df)) + 1`.
    pub fn idf(&self, term_index: usize) -> f64 {
        let n = self.n_documents as f64;
        let df = self.document_frequency[term_index] as f64;
        ln((1.0 + n) / (1.0 + df)) + 1.0
    }

    /// L2-normalized tf-idf vector of a tokenized document over the
    /// vocabulary. Out-of-vocabulary tokens are ignored.
    pub fn transform(&self, tokens: &[String]) -> DocVector {
        let mut tf: BTreeMap<usize, f64> = BTreeMap::new();
        for t in tokens {
            if let Some(i) = self.term_index(t) {
                *tf.entry(i).or_default() += 1.0;
            }
        }
        let mut weights: BTreeMap<usize, f64> = tf.into_iter().map(|(i, c)| (i, c * self.idf(i))).collect();
        let norm = sqrt(weights.values().map(|w| w * w).sum());
        if norm > 0.0 {
            weights.values_mut().for_each(|w| *w /= norm);
        }
        DocVector { weights }
    }
}

/// Sparse normalized tf-idf vector keyed by vocabulary index.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DocVector {
    pub weights: BTreeMap<usize, f64>,
}

impl DocVector {
    pub fn weight(&self, model: &TfIdfModel, term: &str) -> f64 {
        model
            .term_index(term)
            .and_then(|i| self.weights.get(&i).copied())
            .unwrap_or(0.0)
    }

    /// Sum of weights of distinct `terms`.
    pub fn sum_distinct<'a, I>(&self, model: &TfIdfModel, terms: I) -> f64
    where
        I: IntoIterator<Item = &'a str>,
    {
        let distinct: BTreeSet<&str> = terms.into_iter().collect();
        distinct.into_iter().map(|t| self.weight(model, t)).sum()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// `[keyword_num, keyword_TF-IDF, keyword_avg_weight, keyword_to_total]`
/// from the weights of a domain's keywords and its total token count.
///
/// `invert_ratio` swaps the last feature to `keyword_num / total_tokens`.
pub fn keyword_features(keyword_weights: &[f64], total_tokens: usize, invert_ratio: bool) -> [f64; 4] {
    let num = keyword_weights.len() as f64;
    let sum: f64 = keyword_weights.iter().sum();
    if keyword_weights.is_empty() {
        return [0.0; 4];
    }
    let ratio = if invert_ratio {
        if total_tokens == 0 { 0.0 } else { num / total_tokens as f64 }
    } else {
        total_tokens as f64 / num
    };
    [num, sum, sum / num, ratio]
}
