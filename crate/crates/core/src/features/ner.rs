//! Gazetteer entity recognition and the named-entity feature block.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::tfidf::{tokenize, DocVector, TfIdfModel};
use super::FeatureError;
use crate::graph::{kshell, UndirectedGraph};

pub const DEFAULT_POPULARITY_THRESHOLD: usize = 5;

/// Entity categories with a popularity flag, in column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityCategory {
    Per,
    Loc,
    Org,
    Prd,
    Crtv,
    Grp,
}

impl EntityCategory {
    pub const ALL: [EntityCategory; 6] = [Self::Per, Self::Loc, Self::Org, Self::Prd, Self::Crtv, Self::Grp];

    pub fn tag(self) -> &'static str {
        match self {
            Self::Per => "PER",
            Self::Loc => "LOC",
            Self::Org => "ORG",
            Self::Prd => "PRD",
            Self::Crtv => "CRTV",
            Self::Grp => "GRP",
        }
    }

    /// Accepts the six tags plus `COR`, which is folded into `ORG`.
    pub fn parse(tag: &str) -> Result<Self, FeatureError> {
        let upper = tag.trim().to_ascii_uppercase();
        if upper == "COR" {
            return Ok(Self::Org);
        }
        Self::ALL
            .into_iter()
            .find(|c| c.tag() == upper)
            .ok_or_else(|| FeatureError::UnknownEntityCategory(tag.to_string()))
    }
}

/// Surface-form dictionary matched case-insensitively on token boundaries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Gazetteer {
    entries: BTreeMap<Vec<String>, EntityCategory>,
    max_tokens: usize,
}

/// One recognized entity occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mention {
    /// Lowercased surface tokens joined by single spaces.
    pub entity: String,
    pub category: EntityCategory,
    pub start: usize,
    pub len: usize,
}

impl Gazetteer {
    /// Later duplicates of a surface form override earlier ones.
    pub fn from_entries<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = (S, EntityCategory)>,
        S: AsRef<str>,
    {
        let mut g = Self::default();
        for (surface, category) in entries {
            let tokens = tokenize(surface.as_ref());
            if tokens.is_empty() {
                continue;
            }
            g.max_tokens = g.max_tokens.max(tokens.len());
            g.entries.insert(tokens, category);
        }
        g
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Greedy left-to-right longest match over a token stream.
    pub fn find_mentions(&self, tokens: &[String]) -> Vec<Mention> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            let longest = self.max_tokens.min(tokens.len() - i);
            let hit = (1..=longest)
                .rev()
                .find_map(|len| self.entries.get(&tokens[i..i + len]).map(|&c| (len, c)));
            match hit {
                Some((len, category)) => {
                    out.push(Mention { entity: tokens[i..i + len].join(" "), category, start: i, len });
                    i += len;
                }
                None => i += 1,
            }
        }
        out
    }
}

/// Product entities in the lowest k-shell of the corpus-wide co-occurrence
/// graph (two products are linked when some domain mentions both).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmergingIndex {
    emerging: BTreeSet<String>,
}

impl EmergingIndex {
    /// `domains` yields the distinct product entities of each domain.
    pub fn build<'a, D, E>(domains: D) -> Self
    where
        D: IntoIterator<Item = E>,
        E: IntoIterator<Item = &'a str>,
    {
        let per_domain: Vec<BTreeSet<&str>> = domains.into_iter().map(|d| d.into_iter().collect()).collect();
        let nodes: BTreeSet<&str> = per_domain.iter().flatten().copied().collect();
        let nodes: Vec<&str> = nodes.into_iter().collect();
        if nodes.is_empty() {
            return Self::default();
        }
        let id = |e: &str| nodes.binary_search(&e).unwrap();
        let mut g = UndirectedGraph::with_nodes(nodes.len());
        for set in &per_domain {
            let ids: Vec<usize> = set.iter().map(|e| id(e)).collect();
            for (k, &a) in ids.iter().enumerate() {
                for &b in &ids[k + 1..] {
                    g.add_edge(a, b);
                }
            }
        }
        let shells = kshell(&g);
        let min_shell = shells.iter().copied().min().unwrap_or(0);
        let emerging = nodes
            .iter()
            .zip(&shells)
            .filter(|(_, &s)| s == min_shell)
            .map(|(e, _)| String::from(*e))
            .collect();
        Self { emerging }
    }

    pub fn from_entities<I, S>(entities: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self { emerging: entities.into_iter().map(Into::into).collect() }
    }

    pub fn is_emerging(&self, entity: &str) -> bool {
        self.emerging.contains(entity)
    }

    pub fn entities(&self) -> impl Iterator<Item = &str> {
        self.emerging.iter().map(String::as_str)
    }
}

pub struct NeFeatureInput<'a> {
    pub mentions: &'a [Mention],
    pub doc: &'a DocVector,
    pub tfidf: &'a TfIdfModel,
    pub popularity_threshold: usize,
    pub emerging: &'a EmergingIndex,
}

/// The 10 named-entity features: six popularity flags (PER, LOC, ORG, PRD,
/// CRTV, GRP), mention count, tf-idf mass of entity tokens, tf-idf mass of
/// popular-entity tokens, and mentions of emerging products.
///
/// Tf-idf sums run over distinct tokens.
pub fn ne_features(input: &NeFeatureInput<'_>) -> [f64; 10] {
    let mut counts: BTreeMap<(&str, EntityCategory), usize> = BTreeMap::new();
    for m in input.mentions {
        *counts.entry((m.entity.as_str(), m.category)).or_default() += 1;
    }
    let is_popular = |c: usize| c >= input.popularity_threshold;

    let mut out = [0.0; 10];
    for (slot, category) in EntityCategory::ALL.iter().enumerate() {
        let popular = counts.iter().any(|(&(_, c), &n)| c == *category && is_popular(n));
        out[slot] = if popular { 1.0 } else { 0.0 };
    }
    out[6] = input.mentions.len() as f64;
    let all_tokens = counts.keys().flat_map(|(e, _)| e.split(' '));
    out[7] = input.doc.sum_distinct(input.tfidf, all_tokens);
    let popular_tokens = counts.iter().filter(|(_, &n)| is_popular(n)).flat_map(|((e, _), _)| e.split(' '));
    out[8] = input.doc.sum_distinct(input.tfidf, popular_tokens);
    out[9] = counts
        .iter()
        .filter(|(&(e, c), _)| c == EntityCategory::Prd && input.emerging.is_emerging(e))
        .map(|(_, &n)| n as f64)
        .sum();
    out
}
