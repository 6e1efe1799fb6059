//! The 40-column domain feature layout and the allocation-only pieces of
//! feature extraction.
//!
//! Columns are grouped by source (text 9, named entities 10, HTML 8,
//! visual 6, graph 7) and always appear in the order of [`FEATURE_NAMES`].

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

mod graph_block;
mod ner;
mod segment;
mod standardize;
mod tfidf;
mod visual;

pub use graph_block::{GraphFeatureContext, DEFAULT_TOP_X};
pub use ner::{
    ne_features, EmergingIndex, EntityCategory, Gazetteer, Mention, NeFeatureInput, DEFAULT_POPULARITY_THRESHOLD,
};
pub use segment::{segment_address, Lexicon, Piece, UNKNOWN_CHAR_COST};
pub use standardize::{standardize, StandardizationStats};
pub use tfidf::{keyword_features, tokenize, DocVector, TfIdfModel, DEFAULT_MIN_DF, DEFAULT_VOCAB_SIZE};
pub use visual::{visual_features, VisualCategory, VisualRecord};

pub const FEATURE_COUNT: usize = 40;

pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    // text
    "recently_updated",
    "updates_count",
    "address_words_count",
    "address_letters_count",
    "clones_rate",
    "keyword_num",
    "keyword_TF-IDF",
    "keyword_avg_weight",
    "keyword_to_total",
    // named entities
    "popular_NE_PER",
    "popular_NE_LOC",
    "popular_NE_ORG",
    "popular_NE_PRD",
    "popular_NE_CRTV",
    "popular_NE_GRP",
    "NE_counter",
    "NE_TF-IDF",
    "popular_NE_TF-IDF",
    "emerging_NE",
    // html
    "internal_links",
    "external_links",
    "img_count",
    "needs_credential",
    "has_title",
    "has_H1",
    "TF-IDF_title_H1",
    "TF-IDF_alt",
    // visual
    "suspicious_count",
    "noise_count",
    "total_count",
    "avg_suspicious_conf",
    "avg_normal_conf",
    "suspicious_majority",
    // graph
    "in_degree",
    "out_degree",
    "cls",
    "btwn",
    "eigvec",
    "ToRank_rank",
    "ToRank_top_X",
];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FeatureError {
    #[error("unknown feature group `{0}` (expected text, ner, html, visual, graph or all)")]
    UnknownGroup(String),
    #[error("no feature group selected")]
    NoGroups,
    #[error("cannot build a TF-IDF model from an empty corpus")]
    EmptyCorpus,
    #[error("column count mismatch: matrix has {matrix}, statistics have {stats}")]
    ColumnMismatch { matrix: usize, stats: usize },
    #[error("{block} block expects {expected} values, got {got}")]
    BlockLength { block: &'static str, expected: usize, got: usize },
    #[error("visual record confidence {0} outside [0, 1]")]
    ConfidenceOutOfRange(f64),
    #[error("unknown visual category `{0}`")]
    UnknownVisualCategory(String),
    #[error("unknown entity category `{0}`")]
    UnknownEntityCategory(String),
}

/// Feature source, in column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureGroup {
    Text,
    Ner,
    Html,
    Visual,
    Graph,
}

impl FeatureGroup {
    pub const ALL: [FeatureGroup; 5] = [Self::Text, Self::Ner, Self::Html, Self::Visual, Self::Graph];

    pub fn name(self) -> &'static str {
        match self {
            Self::Text => "text",
            Self::Ner => "ner",
            Self::Html => "html",
            Self::Visual => "visual",
            Self::Graph => "graph",
        }
    }

    /// Column range of this group inside the full vector.
    pub fn columns(self) -> Range<usize> {
        match self {
            Self::Text => 0..9,
            Self::Ner => 9..19,
            Self::Html => 19..27,
            Self::Visual => 27..33,
            Self::Graph => 33..40,
        }
    }

    pub fn len(self) -> usize {
        self.columns().len()
    }

    pub fn parse(name: &str) -> Result<Self, FeatureError> {
        let lower = name.trim().to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|g| g.name() == lower)
            .ok_or_else(|| FeatureError::UnknownGroup(name.to_string()))
    }
}

impl fmt::Display for FeatureGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Non-empty selection of feature groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupSet(u8);

impl GroupSet {
    pub fn all() -> Self {
        Self(0b1_1111)
    }

    pub fn new<I: IntoIterator<Item = FeatureGroup>>(groups: I) -> Result<Self, FeatureError> {
        let bits = groups.into_iter().fold(0u8, |acc, g| acc | 1 << g as u8);
        if bits == 0 {
            Err(FeatureError::NoGroups)
        } else {
            Ok(Self(bits))
        }
    }

    /// Parses `all` or a comma-separated list of group names.
    pub fn parse(spec: &str) -> Result<Self, FeatureError> {
        if spec.trim().eq_ignore_ascii_case("all") {
            return Ok(Self::all());
        }
        let groups = spec
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(FeatureGroup::parse)
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(groups)
    }

    pub fn contains(self, group: FeatureGroup) -> bool {
        self.0 & (1 << group as u8) != 0
    }

    pub fn groups(self) -> impl Iterator<Item = FeatureGroup> {
        FeatureGroup::ALL.into_iter().filter(move |&g| self.contains(g))
    }

    /// Full-vector indices of the selected columns, in layout order.
    pub fn columns(self) -> Vec<usize> {
        self.groups().flat_map(FeatureGroup::columns).collect()
    }

    pub fn column_names(self) -> Vec<&'static str> {
        self.columns().into_iter().map(|i| FEATURE_NAMES[i]).collect()
    }

    pub fn width(self) -> usize {
        self.groups().map(FeatureGroup::len).sum()
    }
}

impl fmt::Display for GroupSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Self::all() {
            return f.write_str("all");
        }
        let mut first = true;
        for g in self.groups() {
            if !first {
                f.write_str(",")?;
            }
            f.write_str(g.name())?;
            first = false;
        }
        Ok(())
    }
}

/// All 40 raw feature values of one domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector(pub [f64; FEATURE_COUNT]);

impl Default for FeatureVector {
    fn default() -> Self {
        Self([0.0; FEATURE_COUNT])
    }
}

impl FeatureVector {
    pub fn block(&self, group: FeatureGroup) -> &[f64] {
        &self.0[group.columns()]
    }

    pub fn set_block(&mut self, group: FeatureGroup, values: &[f64]) -> Result<(), FeatureError> {
        let range = group.columns();
        if values.len() != range.len() {
            return Err(FeatureError::BlockLength { block: group.name(), expected: range.len(), got: values.len() });
        }
        self.0[range].copy_from_slice(values);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        FEATURE_NAMES.iter().position(|&n| n == name).map(|i| self.0[i])
    }

    pub fn select(&self, groups: GroupSet) -> Vec<f64> {
        groups.columns().into_iter().map(|i| self.0[i]).collect()
    }
}

/// One row per domain, restricted to a group selection.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub groups: GroupSet,
    pub ids: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl FeatureMatrix {
    /// Selects `groups` from full vectors. Rows keep the input order.
    pub fn assemble(vectors: &[(String, FeatureVector)], groups: GroupSet) -> Self {
        Self {
            groups,
            ids: vectors.iter().map(|(id, _)| id.clone()).collect(),
            rows: vectors.iter().map(|(_, v)| v.select(groups)).collect(),
        }
    }

    pub fn column_names(&self) -> Vec<&'static str> {
        self.groups.column_names()
    }

    pub fn width(&self) -> usize {
        self.groups.width()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_widths_follow_layout() {
        let widths: Vec<usize> = FeatureGroup::ALL.iter().map(|g| g.len()).collect();
        assert_eq!(widths, [9, 10, 8, 6, 7]);
        assert_eq!(GroupSet::all().width(), 40);
        assert_eq!(GroupSet::all().column_names(), FEATURE_NAMES.to_vec());
    }

    #[test]
    fn group_parsing() {
        assert_eq!(GroupSet::parse("text").unwrap().width(), 9);
        assert_eq!(GroupSet::parse("text,ner,html").unwrap().width(), 27);
        assert_eq!(GroupSet::parse("ALL").unwrap(), GroupSet::all());
        assert_eq!(GroupSet::parse("html, text").unwrap().column_names()[0], "recently_updated");
        assert!(matches!(GroupSet::parse("text,colour"), Err(FeatureError::UnknownGroup(_))));
        assert_eq!(GroupSet::parse(""), Err(FeatureError::NoGroups));
    }

    #[test]
    fn group_set_display_round_trips() {
        for spec in ["all", "text", "ner,graph", "text,ner,html"] {
            let g = GroupSet::parse(spec).unwrap();
            assert_eq!(GroupSet::parse(&alloc::format!("{g}")).unwrap(), g);
        }
    }

    #[test]
    fn matrix_selects_in_layout_order() {
        let mut v = FeatureVector::default();
        v.set_block(FeatureGroup::Visual, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        v.set_block(FeatureGroup::Text, &[9.0; 9]).unwrap();
        let m = FeatureMatrix::assemble(&[("d".into(), v)], GroupSet::parse("visual,text").unwrap());
        assert_eq!(m.width(), 15);
        assert_eq!(m.rows[0][9..], [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert!(v.set_block(FeatureGroup::Graph, &[0.0; 3]).is_err());
    }
}
