//! The 23-question annotation protocol: judge assignment, majority voting
//! and gain.
//!
//! Question order is the questionnaire table read left column top to bottom,
//! then right column. Answer vectors everywhere use this order.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const N_QUESTIONS: usize = 23;
pub const QUESTIONNAIRE_VERSION: u32 = 1;
pub const JUDGES_PER_DOMAIN: usize = 3;
pub const DEFAULT_BATCH_SIZE: usize = 23;

pub const QUESTIONS: [&str; N_QUESTIONS] = [
    "Has a satisfactory FAQ?",
    "Has a professional design?",
    "Has a subjective title?",
    "Provides safe shipping?",
    "Offers reward or discount?",
    "Sell more than 10 products?",
    "Shipping worldwide service?",
    "Reputation content?",
    "Accepts only Cryptocurrency?",
    "Can customers add a review/feedback?",
    "Need text spotting for the products' images",
    "Has more than 10 sub-pages?",
    "Has a communication channel?",
    "Has real images for the products?",
    "Sells between 2 to 10 products?",
    "Domain name has a meaning?",
    "Products majority are illegal?",
    "Still accessible in TOR network?",
    "Sells at least one popular product?",
    "Requires login/ registration?",
    "Recently updated?",
    "Do you feel that this domain is trustable?",
    "Are you satisfied with the products description?",
];

pub type Answers = [bool; N_QUESTIONS];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroundTruthError {
    #[error("expected {expected} answers, got {got}")]
    WrongAnswerCount { expected: usize, got: usize },
    #[error("majority vote needs exactly {expected} records, got {got}")]
    WrongRecordCount { expected: usize, got: usize },
    #[error("records mix domains `{0}` and `{1}`")]
    DomainMismatch(String, String),
    #[error("annotator `{annotator}` judged `{domain}` more than once")]
    DuplicateAnnotator { domain: String, annotator: String },
    #[error("cannot give each domain {per_domain} distinct judges with {annotators} annotators")]
    Infeasible { annotators: usize, per_domain: usize },
    #[error("duplicate id `{0}` in assignment input")]
    DuplicateId(String),
    #[error("no domains to assign")]
    NoDomains,
    #[error("batch size must be >= 1")]
    InvalidBatchSize,
}

/// One annotator's answers for one domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationRecord {
    pub domain_id: String,
    pub annotator_id: String,
    pub answers: Answers,
}

impl AnnotationRecord {
    pub fn new(
        domain_id: impl Into<String>,
        annotator_id: impl Into<String>,
        answers: &[bool],
    ) -> Result<Self, GroundTruthError> {
        let answers: Answers = answers
            .try_into()
            .map_err(|_| GroundTruthError::WrongAnswerCount { expected: N_QUESTIONS, got: answers.len() })?;
        Ok(Self { domain_id: domain_id.into(), annotator_id: annotator_id.into(), answers })
    }
}

/// Per-question 2-of-3 vote over three records of the same domain by three
/// distinct annotators.
pub fn majority_vote(records: &[AnnotationRecord]) -> Result<Answers, GroundTruthError> {
    if records.len() != JUDGES_PER_DOMAIN {
        return Err(GroundTruthError::WrongRecordCount { expected: JUDGES_PER_DOMAIN, got: records.len() });
    }
    let domain = &records[0].domain_id;
    let mut seen = BTreeSet::new();
    for r in records {
        if &r.domain_id != domain {
            return Err(GroundTruthError::DomainMismatch(domain.clone(), r.domain_id.clone()));
        }
        if !seen.insert(r.annotator_id.as_str()) {
            return Err(GroundTruthError::DuplicateAnnotator {
                domain: domain.clone(),
                annotator: r.annotator_id.clone(),
            });
        }
    }
    let mut unified = [false; N_QUESTIONS];
    for (q, out) in unified.iter_mut().enumerate() {
        *out = records.iter().filter(|r| r.answers[q]).count() >= 2;
    }
    Ok(unified)
}

/// Number of affirmative answers.
pub fn gain(unified: &[bool]) -> Result<u32, GroundTruthError> {
    if unified.len() != N_QUESTIONS {
        return Err(GroundTruthError::WrongAnswerCount { expected: N_QUESTIONS, got: unified.len() });
    }
    Ok(unified.iter().filter(|&&a| a).count() as u32)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    pub domain_id: String,
    pub unified: Answers,
    pub gain: u32,
}

/// Unified answers per domain. Domains without exactly three records are
/// returned separately with their record count.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MergedAnnotations {
    pub truths: Vec<GroundTruth>,
    pub incomplete: Vec<(String, usize)>,
}

/// Groups records by domain and votes each complete triple.
pub fn merge_annotations(records: &[AnnotationRecord]) -> Result<MergedAnnotations, GroundTruthError> {
    let mut by_domain: BTreeMap<&str, Vec<AnnotationRecord>> = BTreeMap::new();
    for r in records {
        by_domain.entry(r.domain_id.as_str()).or_default().push(r.clone());
    }
    let mut merged = MergedAnnotations::default();
    for (domain, mut group) in by_domain {
        if group.len() != JUDGES_PER_DOMAIN {
            merged.incomplete.push((String::from(domain), group.len()));
            continue;
        }
        group.sort_by(|a, b| a.annotator_id.cmp(&b.annotator_id));
        let unified = majority_vote(&group)?;
        merged.truths.push(GroundTruth { domain_id: String::from(domain), unified, gain: gain(&unified)? });
    }
    Ok(merged)
}

/// Judges per domain and batches per annotator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentPlan {
    pub seed: u64,
    pub per_domain: usize,
    judges: BTreeMap<String, Vec<String>>,
    batches: BTreeMap<String, Vec<Vec<String>>>,
}

impl AssignmentPlan {
    pub fn judges(&self, domain_id: &str) -> Option<&[String]> {
        self.judges.get(domain_id).map(Vec::as_slice)
    }

    pub fn batches(&self, annotator_id: &str) -> Option<&[Vec<String>]> {
        self.batches.get(annotator_id).map(Vec::as_slice)
    }

    pub fn domains(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.judges.iter().map(|(d, j)| (d.as_str(), j.as_slice()))
    }

    pub fn annotators(&self) -> impl Iterator<Item = (&str, &[Vec<String>])> {
        self.batches.iter().map(|(a, b)| (a.as_str(), b.as_slice()))
    }

    pub fn total_assignments(&self) -> usize {
        self.batches.values().flatten().map(Vec::len).sum()
    }
}

fn unique_sorted(ids: &[String]) -> Result<Vec<String>, GroundTruthError> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id.clone()) {
            return Err(GroundTruthError::DuplicateId(id.clone()));
        }
    }
    Ok(seen.into_iter().collect())
}

/// Splits `items` into `round(len / batch_size)` (at least one) contiguous
/// batches whose sizes differ by at most one.
fn split_batches(items: Vec<String>, batch_size: usize) -> Vec<Vec<String>> {
    if items.is_empty() {
        return Vec::new();
    }
    let n = items.len();
    let count = ((n + batch_size / 2) / batch_size).max(1);
    let (base, extra) = (n / count, n % count);
    let mut out = Vec::with_capacity(count);
    let mut it = items.into_iter();
    for b in 0..count {
        let size = base + usize::from(b < extra);
        out.push(it.by_ref().take(size).collect());
    }
    out
}

/// Assigns `per_domain` distinct annotators to every domain.
///
/// Domains and annotators are shuffled with `seed`; the domain at shuffled
/// position `i` goes to annotators `per_domain*i .. per_domain*i + per_domain`
/// taken cyclically, so annotator loads differ by at most one. Each
/// annotator's domains are then cut into batches near `batch_size`.
pub fn assignment_plan(
    domain_ids: &[String],
    annotator_ids: &[String],
    per_domain: usize,
    batch_size: usize,
    seed: u64,
) -> Result<AssignmentPlan, GroundTruthError> {
    if batch_size == 0 {
        return Err(GroundTruthError::InvalidBatchSize);
    }
    let mut domains = unique_sorted(domain_ids)?;
    let mut annotators = unique_sorted(annotator_ids)?;
    if domains.is_empty() {
        return Err(GroundTruthError::NoDomains);
    }
    if per_domain == 0 || annotators.len() < per_domain {
        return Err(GroundTruthError::Infeasible { annotators: annotators.len(), per_domain });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    domains.shuffle(&mut rng);
    annotators.shuffle(&mut rng);

    let a = annotators.len();
    let mut judges = BTreeMap::new();
    let mut loads: BTreeMap<String, Vec<String>> = annotators.iter().map(|id| (id.clone(), Vec::new())).collect();
    for (i, domain) in domains.iter().enumerate() {
        let mut chosen: Vec<String> = (0..per_domain).map(|j| annotators[(per_domain * i + j) % a].clone()).collect();
        for judge in &chosen {
            loads.get_mut(judge).expect("annotator present").push(domain.clone());
        }
        chosen.sort();
        judges.insert(domain.clone(), chosen);
    }
    let batches = loads.into_iter().map(|(id, items)| (id, split_batches(items, batch_size))).collect();
    Ok(AssignmentPlan { seed, per_domain, judges, batches })
}
