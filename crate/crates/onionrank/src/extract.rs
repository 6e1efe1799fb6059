//! Corpus-level feature extraction: builds the shared models (vocabulary,
//! clone index, emerging entities, link graph) and the 40-column vector of
//! every domain.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::LazyLock;

use chrono::{DateTime, Days, NaiveDate, NaiveDateTime, NaiveTime, Utc};
use md5::{Digest, Md5};
use onionrank_core::features::{
    keyword_features, ne_features, segment_address, tokenize, visual_features, EmergingIndex, EntityCategory,
    FeatureError, FeatureGroup, FeatureVector, Gazetteer, GraphFeatureContext, Lexicon, Mention, NeFeatureInput,
    TfIdfModel, DEFAULT_MIN_DF, DEFAULT_POPULARITY_THRESHOLD, DEFAULT_TOP_X, DEFAULT_VOCAB_SIZE,
};
use onionrank_core::graph::ToRankConfig;
use regex::Regex;

use crate::corpus::{derive_link_graph, href_host, normalize_whitespace, Corpus, Domain, VisualSidecar};

pub const DEFAULT_RECENCY_DAYS: u64 = 90;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureConfig {
    /// Anchor for `recently_updated`; defaults to the corpus scrape date.
    pub reference_date: Option<NaiveDate>,
    pub recency_days: u64,
    pub vocab_size: usize,
    pub min_df: usize,
    pub popularity_threshold: usize,
    pub top_x: usize,
    pub torank: ToRankConfig,
    pub invert_keyword_ratio: bool,
    pub landing_only: bool,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            reference_date: None,
            recency_days: DEFAULT_RECENCY_DAYS,
            vocab_size: DEFAULT_VOCAB_SIZE,
            min_df: DEFAULT_MIN_DF,
            popularity_threshold: DEFAULT_POPULARITY_THRESHOLD,
            top_x: DEFAULT_TOP_X,
            torank: ToRankConfig::default(),
            invert_keyword_ratio: false,
            landing_only: false,
        }
    }
}

const MONTHS: [&str; 12] = [
    "january", "february", "march", "april", "may", "june", "july", "august", "september", "october", "november",
    "december",
];

static ISO_DATE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\b(\d{4})-(\d{2})-(\d{2})(?:[T ](\d{2}):(\d{2})(?::(\d{2}))?)?").expect("static regex")
});
static SLASH_DATE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\b(\d{1,2})/(\d{1,2})/(\d{4})\b").expect("static regex"));
static MONTH_DATE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?i)\b(january|february|march|april|may|june|july|august|september|october|november|december)\s+(\d{1,2}),\s*(\d{4})\b",
    )
    .expect("static regex")
});
static CREDENTIAL_NAME: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)login|user|pass|signin").expect("static regex"));

fn num(s: Option<regex::Match<'_>>) -> Option<u32> {
    s.and_then(|m| m.as_str().parse().ok())
}

/// Distinct timestamps found in `text`: `YYYY-MM-DD` with optional time,
/// `DD/MM/YYYY` (read as `MM/DD/YYYY` when the first reading is invalid) and
/// `Month DD, YYYY`.
pub fn parse_timestamps(text: &str) -> BTreeSet<NaiveDateTime> {
    let mut out = BTreeSet::new();
    for c in ISO_DATE.captures_iter(text) {
        let date = NaiveDate::from_ymd_opt(num(c.get(1)).unwrap_or(0) as i32, num(c.get(2)).unwrap_or(0), num(c.get(3)).unwrap_or(0));
        let time = match c.get(4) {
            Some(_) => NaiveTime::from_hms_opt(num(c.get(4)).unwrap_or(99), num(c.get(5)).unwrap_or(99), num(c.get(6)).unwrap_or(0)),
            None => Some(NaiveTime::MIN),
        };
        if let (Some(d), Some(t)) = (date, time) {
            out.insert(d.and_time(t));
        }
    }
    for c in SLASH_DATE.captures_iter(text) {
        let (a, b, y) = (num(c.get(1)).unwrap_or(0), num(c.get(2)).unwrap_or(0), num(c.get(3)).unwrap_or(0) as i32);
        if let Some(d) = NaiveDate::from_ymd_opt(y, b, a).or_else(|| NaiveDate::from_ymd_opt(y, a, b)) {
            out.insert(d.and_time(NaiveTime::MIN));
        }
    }
    for c in MONTH_DATE.captures_iter(text) {
        let month = MONTHS.iter().position(|m| m.eq_ignore_ascii_case(&c[1])).map(|i| i as u32 + 1);
        let d = month.and_then(|m| NaiveDate::from_ymd_opt(num(c.get(3)).unwrap_or(0) as i32, m, num(c.get(2)).unwrap_or(0)));
        if let Some(d) = d {
            out.insert(d.and_time(NaiveTime::MIN));
        }
    }
    out
}

/// MD5 of the lowercased, whitespace-collapsed text.
pub fn text_fingerprint(text: &str) -> [u8; 16] {
    let normalized = normalize_whitespace(&text.to_lowercase());
    Md5::digest(normalized.as_bytes()).into()
}

/// The onion label of an address: host without the `.onion` suffix.
pub fn address_label(host: &str) -> &str {
    let host = host.strip_suffix(".onion").unwrap_or(host);
    host.rsplit('.').next().unwrap_or(host)
}

/// `[address_words_count, address_letters_count]` over the known pieces.
pub fn address_features(host: &str, lexicon: &Lexicon) -> [f64; 2] {
    let pieces = segment_address(address_label(host), lexicon);
    let known: Vec<_> = pieces.iter().filter(|p| p.known).collect();
    [known.len() as f64, known.iter().map(|p| p.text.chars().count()).sum::<usize>() as f64]
}

struct DomainText<'a> {
    domain: &'a Domain,
    text: String,
    tokens: Vec<String>,
    mentions: Vec<Mention>,
}

fn html_features(
    domain: &Domain,
    landing_only: bool,
    doc: &onionrank_core::features::DocVector,
    tfidf: &TfIdfModel,
) -> [f64; 8] {
    let own = domain.host();
    let mut internal = BTreeSet::new();
    let mut external = BTreeSet::new();
    let (mut imgs, mut credential, mut has_title, mut has_h1) = (0usize, false, false, false);
    let mut heading_tokens = Vec::new();
    let mut alt_tokens = Vec::new();
    for page in domain.pages_for(landing_only) {
        for link in &page.hyperlinks {
            match href_host(&link.href, &own) {
                Some(h) if h == own => internal.insert(link.href.as_str()),
                Some(_) => external.insert(link.href.as_str()),
                None => false,
            };
        }
        let f = &page.facts;
        imgs += f.img_count;
        credential |= f.password_inputs > 0 || f.input_names.iter().any(|n| CREDENTIAL_NAME.is_match(n));
        if let Some(t) = f.title.as_deref().filter(|t| !t.trim().is_empty()) {
            has_title = true;
            heading_tokens.extend(tokenize(t));
        }
        for h in f.h1.iter().filter(|h| !h.trim().is_empty()) {
            has_h1 = true;
            heading_tokens.extend(tokenize(h));
        }
        for alt in &f.img_alts {
            alt_tokens.extend(tokenize(alt));
        }
    }
    let flag = |b: bool| if b { 1.0 } else { 0.0 };
    [
        internal.len() as f64,
        external.len() as f64,
        imgs as f64,
        flag(credential),
        flag(has_title),
        flag(has_h1),
        doc.sum_distinct(tfidf, heading_tokens.iter().map(String::as_str)),
        doc.sum_distinct(tfidf, alt_tokens.iter().map(String::as_str)),
    ]
}

/// Computes the full 40-column vector of every domain, in corpus order.
pub fn extract_features(
    corpus: &Corpus,
    gazetteer: &Gazetteer,
    lexicon: &Lexicon,
    visual: &VisualSidecar,
    cfg: &FeatureConfig,
) -> Result<Vec<(String, FeatureVector)>, FeatureError> {
    if corpus.domains.is_empty() {
        return Err(FeatureError::EmptyCorpus);
    }
    let texts: Vec<DomainText<'_>> = corpus
        .domains
        .iter()
        .map(|d| {
            let text = d.text(cfg.landing_only);
            let tokens = tokenize(&text);
            let mentions = gazetteer.find_mentions(&tokens);
            DomainText { domain: d, text, tokens, mentions }
        })
        .collect();

    let tfidf = TfIdfModel::fit(texts.iter().map(|t| t.tokens.as_slice()), cfg.vocab_size, cfg.min_df)?;
    let mut clone_counts: BTreeMap<[u8; 16], usize> = BTreeMap::new();
    for t in &texts {
        *clone_counts.entry(text_fingerprint(&t.text)).or_default() += 1;
    }
    let emerging = EmergingIndex::build(texts.iter().map(|t| {
        t.mentions.iter().filter(|m| m.category == EntityCategory::Prd).map(|m| m.entity.as_str()).collect::<Vec<_>>()
    }));
    let graph = derive_link_graph(corpus);
    let graph_ctx = GraphFeatureContext::new(&graph, &cfg.torank, cfg.top_x);
    let reference = cfg
        .reference_date
        .or_else(|| corpus.scrape_date().map(|t: DateTime<Utc>| t.date_naive()))
        .expect("non-empty corpus has a scrape date");
    let threshold = reference.checked_sub_days(Days::new(cfg.recency_days)).unwrap_or(NaiveDate::MIN);

    let mut out = Vec::with_capacity(texts.len());
    for t in &texts {
        let doc = tfidf.transform(&t.tokens);
        let stamps = parse_timestamps(&t.text);
        let recent = stamps.iter().any(|s| s.date() >= threshold);
        let [words, letters] = address_features(&t.domain.host(), lexicon);
        let clones = clone_counts[&text_fingerprint(&t.text)];
        let keywords: BTreeSet<&str> = t.tokens.iter().map(String::as_str).filter(|w| tfidf.contains(w)).collect();
        let weights: Vec<f64> = keywords.iter().map(|w| doc.weight(&tfidf, w)).collect();
        let kw = keyword_features(&weights, t.tokens.len(), cfg.invert_keyword_ratio);

        let mut v = FeatureVector::default();
        let text_block = [
            if recent { 1.0 } else { 0.0 },
            stamps.len() as f64,
            words,
            letters,
            clones as f64,
            kw[0],
            kw[1],
            kw[2],
            kw[3],
        ];
        v.set_block(FeatureGroup::Text, &text_block)?;
        let ne = ne_features(&NeFeatureInput {
            mentions: &t.mentions,
            doc: &doc,
            tfidf: &tfidf,
            popularity_threshold: cfg.popularity_threshold,
            emerging: &emerging,
        });
        v.set_block(FeatureGroup::Ner, &ne)?;
        v.set_block(FeatureGroup::Html, &html_features(t.domain, cfg.landing_only, &doc, &tfidf))?;
        v.set_block(FeatureGroup::Visual, &visual_features(visual.for_domain(&t.domain.domain_id)))?;
        v.set_block(FeatureGroup::Graph, &graph_ctx.features(&t.domain.domain_id))?;
        out.push((t.domain.domain_id.clone(), v));
    }
    Ok(out)
}
