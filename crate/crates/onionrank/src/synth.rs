//! Seeded synthetic corpora with a planted latent attractiveness per domain.
//!
//! Every domain draws `a ~ U[0, 23]`. With `s = a / 23`, the amount of shop
//! content, entity mentions, recent dates, images, headings, readable
//! address words and inbound links all grow with `s`. Three simulated
//! annotators answer a questionnaire whose planted answers sum to
//! `round(a)`, each answer flipped with probability `sigma`.
//!
//! Output is written through the same formats the ingester reads.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Days, NaiveDate, Utc};
use onionrank_core::features::VisualCategory;
use onionrank_core::groundtruth::{AnnotationRecord, N_QUESTIONS};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::formats::{annotation_line, fmt_f64, planted_csv, questionnaire_text, write_text};

pub const DEFAULT_N_DOMAINS: usize = 290;
pub const SYNTH_ANNOTATORS: [&str; 3] = ["synth-a", "synth-b", "synth-c"];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n_domains: usize,
    pub seed: u64,
    /// Per-answer flip probability of each simulated annotator.
    pub sigma: f64,
    /// Expected inbound links of the most attractive domain, before the
    /// attractiveness curve is applied.
    pub link_density: f64,
    /// Standard deviation of the noise added to `s` before it drives a
    /// feature quantity.
    pub feature_noise: f64,
    pub scrape_time: DateTime<Utc>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_domains: DEFAULT_N_DOMAINS,
            seed: 0,
            sigma: 0.1,
            link_density: 3.0,
            feature_noise: 0.15,
            scrape_time: DateTime::parse_from_rfc3339("2026-01-15T12:00:00Z").expect("static date").to_utc(),
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_domains < 10 {
            return Err(Error::Invalid(format!("n_domains must be >= 10, got {}", self.n_domains)));
        }
        if !(0.0..=1.0).contains(&self.sigma) {
            return Err(Error::Invalid(format!("sigma must be in [0, 1], got {}", self.sigma)));
        }
        if !(self.link_density >= 0.0 && self.feature_noise >= 0.0) {
            return Err(Error::Invalid("link_density and feature_noise must be >= 0".into()));
        }
        Ok(())
    }
}

/// Paths written by [`generate`] and the planted ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthOutput {
    pub corpus: PathBuf,
    pub annotations: PathBuf,
    pub planted: PathBuf,
    pub planted_edges: PathBuf,
    pub gazetteer: PathBuf,
    pub lexicon: PathBuf,
    pub visual: PathBuf,
    pub questionnaire: PathBuf,
    /// `(domain_id, a)` in id order.
    pub latent: Vec<(String, f64)>,
    pub edges: BTreeSet<(String, String)>,
    pub records: Vec<AnnotationRecord>,
}

const PRODUCTS: &[&str] = &[
    "cocaine", "mdma", "lsd", "ketamine", "cannabis", "hashish", "heroin", "oxycodone", "xanax", "amphetamine",
    "psilocybin", "mescaline", "diazepam", "methadone", "codeine", "tramadol", "modafinil", "adderall", "kush",
    "ecstasy",
];
const PEOPLE: &[&str] = &["walter white", "pablo escobar", "ross ulbricht", "howard marks"];
const PLACES: &[&str] = &["amsterdam", "colombia", "netherlands", "germany", "canada", "bogota"];
const ORGS: &[&str] = &["europol", "interpol", "dea", "fbi"];
const WORKS: &[&str] = &["breaking bad", "narcos", "trainspotting"];
const GROUPS: &[&str] = &["sinaloa cartel", "hells angels", "cali cartel"];
const SHOP_WORDS: &[&str] = &[
    "shipping", "stealth", "escrow", "bitcoin", "monero", "vendor", "quality", "discount", "review", "feedback",
    "worldwide", "tracking", "refund", "pure", "tested", "gram", "price", "order", "customer", "support", "secure",
    "pgp", "reship", "guarantee", "batch", "sample", "wholesale", "premium", "delivery", "packaging",
];
const FILLER: &[&str] = &[
    "welcome", "page", "site", "the", "and", "for", "with", "our", "you", "we", "this", "here", "more", "info",
    "about", "contact", "home", "news", "please", "thanks",
];
const LEXICON: &[&str] = &[
    "the", "and", "market", "drug", "shop", "store", "best", "dark", "green", "happy", "pharma", "weed", "king",
    "world", "cloud", "empire", "dream", "silk", "road", "express", "candy", "magic", "house", "club", "city",
    "planet", "nexus", "alpha", "prime", "secret",
];
const VANITY: &[&str] = &[
    "market", "drug", "shop", "store", "best", "dark", "green", "happy", "pharma", "weed", "king", "world", "cloud",
    "empire", "dream", "silk", "road", "candy", "magic", "house", "club", "city", "nexus", "alpha", "prime",
];
/// Characters used to pad addresses; no lexicon word can be formed from them.
const PAD: &[u8] = b"234567qxzjv";
const EXTERNAL_HOSTS: &[&str] = &["example.com", "bitcoin.org", "torproject.org", "getmonero.org"];
const MONTHS: [&str; 12] = [
    "January", "February", "March", "April", "May", "June", "July", "August", "September", "October", "November",
    "December",
];

struct Plan {
    id: String,
    address: String,
    latent: f64,
    clone: bool,
}

fn noisy(rng: &mut ChaCha8Rng, s: f64, sd: f64) -> f64 {
    let n = if sd > 0.0 { Normal::new(0.0, sd).expect("positive sd").sample(rng) } else { 0.0 };
    (s + n).clamp(0.0, 1.0)
}

fn make_address(rng: &mut ChaCha8Rng, s: f64, noise: f64, taken: &mut BTreeSet<String>) -> String {
    loop {
        let n_words = (noisy(rng, s, noise) * 3.0).round() as usize;
        let mut label: String = VANITY.choose_multiple(rng, n_words).copied().collect();
        label.truncate(16);
        while label.len() < 16 {
            label.push(*PAD.choose(rng).expect("non-empty") as char);
        }
        let address = format!("{label}.onion");
        if taken.insert(address.clone()) {
            return address;
        }
    }
}

fn format_date(rng: &mut ChaCha8Rng, d: NaiveDate) -> String {
    use chrono::Datelike;
    match rng.random_range(0..3) {
        0 => d.format("%Y-%m-%d").to_string(),
        1 => d.format("%d/%m/%Y").to_string(),
        _ => format!("{} {}, {}", MONTHS[d.month0() as usize], d.day(), d.year()),
    }
}

fn words(rng: &mut ChaCha8Rng, pool: &[&str], n: usize) -> String {
    (0..n).map(|_| *pool.choose(rng).expect("non-empty")).collect::<Vec<_>>().join(" ")
}

struct Pages {
    files: BTreeMap<&'static str, String>,
    visual: Vec<(String, VisualCategory, f64)>,
}

fn domain_pages(
    rng: &mut ChaCha8Rng,
    plan: &Plan,
    out_links: &[&str],
    cfg: &SynthConfig,
    reference: NaiveDate,
) -> Pages {
    let mut files = BTreeMap::new();
    let mut visual = Vec::new();
    if plan.clone {
        files.insert("index", "<html><head></head><body><p>This site has moved. Check back later.</p></body></html>\n".into());
        return Pages { files, visual };
    }
    let s = plan.latent / 23.0;
    let nz = cfg.feature_noise;
    let mut index = String::from("<html><head>");
    let p = 0.15 + 0.8 * noisy(rng, s, nz);
    if rng.random_bool(p) {
        let _ = write!(index, "<title>{} {} shop</title>", words(rng, PRODUCTS, 1), words(rng, SHOP_WORDS, 1));
    }
    index.push_str("<style>body { color: #333 }</style></head><body>");
    let p = 0.1 + 0.85 * noisy(rng, s, nz);
    if rng.random_bool(p) {
        let _ = write!(index, "<h1>{} {}</h1>", words(rng, SHOP_WORDS, 1), words(rng, PRODUCTS, 1));
    }
    let _ = write!(index, "<p>{}</p>", words(rng, FILLER, 12));
    index.push_str(r#"<a href="/products.html">products</a> <a href="/about.html">about</a>"#);

    let n_dates = (noisy(rng, s, nz) * 5.0).round() as usize + rng.random_range(0..2);
    for _ in 0..n_dates {
        let recent = noisy(rng, s, nz);
        let days = if rng.random_bool(recent) { rng.random_range(0..80) } else { rng.random_range(120..1000) };
        let d = reference.checked_sub_days(Days::new(days)).expect("in range");
        let _ = write!(index, "<p>Updated {}</p>", format_date(rng, d));
    }
    let p = 0.05 + 0.9 * noisy(rng, s, nz);
    if rng.random_bool(p) {
        index.push_str(r#"<form><input name="username"><input type="password" name="pw"></form>"#);
    }
    let n_images = (noisy(rng, s, nz) * 8.0).round() as usize;
    for i in 0..n_images {
        let product = *PRODUCTS.choose(rng).expect("non-empty");
        let _ = write!(index, r#"<img src="/img/{i}.jpg" alt="{product} {}">"#, words(rng, SHOP_WORDS, 1));
        let category = if rng.random_bool(0.2 + 0.7 * s) {
            *[VisualCategory::Drugs, VisualCategory::Drugs, VisualCategory::Cryptocurrency, VisualCategory::CounterfeitMoney]
                .choose(rng)
                .expect("non-empty")
        } else {
            VisualCategory::Others
        };
        visual.push((format!("img/{i}.jpg"), category, rng.random_range(0.5..1.0)));
    }
    index.push_str("<script>var t = 'tracking bitcoin escrow';</script></body></html>\n");
    files.insert("index", index);

    let n_products = 1 + (noisy(rng, s, nz) * 14.0).round() as usize;
    let stock: Vec<&str> = {
        let k = 2 + (noisy(rng, s, nz) * 6.0).round() as usize;
        PRODUCTS.choose_multiple(rng, k).copied().collect()
    };
    let mut products = String::from("<html><head></head><body><ul>");
    for _ in 0..n_products {
        let p = *stock.choose(rng).expect("non-empty");
        let price: u32 = rng.random_range(10..500);
        let _ = write!(
            products,
            "<li><p>{p} {} {} price {price} bitcoin {}</p></li>",
            words(rng, SHOP_WORDS, 4),
            p,
            words(rng, FILLER, 3)
        );
    }
    products.push_str("</ul></body></html>\n");
    files.insert("products", products);

    let n_entities = (noisy(rng, s, nz) * 8.0).round() as usize;
    let mut about = String::from("<html><body><p>");
    about.push_str(&words(rng, FILLER, 10));
    for _ in 0..n_entities {
        let pool = [PEOPLE, PLACES, ORGS, WORKS, GROUPS].choose(rng).copied().expect("non-empty");
        let _ = write!(about, " {} {}", words(rng, pool, 1), words(rng, FILLER, 2));
    }
    about.push_str("</p></body></html>\n");
    files.insert("about", about);

    if !out_links.is_empty() || rng.random_bool(0.3) {
        let mut links = String::from("<html><body><p>friends</p>");
        for host in out_links {
            let _ = write!(links, r#"<a href="http://{host}/">{}</a> "#, words(rng, VANITY, 1));
        }
        if rng.random_bool(0.5) {
            let ext = *EXTERNAL_HOSTS.choose(rng).expect("non-empty");
            let _ = write!(links, r#"<a href="https://{ext}/">{ext}</a>"#);
        }
        links.push_str("</body></html>\n");
        files.insert("links", links);
    }
    Pages { files, visual }
}

fn gazetteer_text() -> String {
    let mut s = String::new();
    for (pool, tag) in [(PRODUCTS, "PRD"), (PEOPLE, "PER"), (PLACES, "LOC"), (ORGS, "ORG"), (WORKS, "CRTV"), (GROUPS, "GRP")] {
        for e in pool {
            let _ = writeln!(s, "{e}\t{tag}");
        }
    }
    s
}

/// Planted answers with exactly `round(a)` affirmatives.
fn planted_answers(rng: &mut ChaCha8Rng, latent: f64) -> [bool; N_QUESTIONS] {
    let mut idx: Vec<usize> = (0..N_QUESTIONS).collect();
    idx.shuffle(rng);
    let mut answers = [false; N_QUESTIONS];
    for &q in &idx[..latent.round() as usize] {
        answers[q] = true;
    }
    answers
}

/// Writes a synthetic corpus and its sidecar files under `out_dir`.
pub fn generate(cfg: &SynthConfig, out_dir: &Path) -> Result<SynthOutput> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let width = (cfg.n_domains - 1).to_string().len().max(3);
    let mut taken = BTreeSet::new();
    let plans: Vec<Plan> = (0..cfg.n_domains)
        .map(|i| {
            let latent = rng.random_range(0.0..=23.0);
            let s = latent / 23.0;
            let address = make_address(&mut rng, s, cfg.feature_noise, &mut taken);
            let clone = s < 0.3 && rng.random_bool(0.3);
            Plan { id: format!("d{i:0width$}"), address, latent, clone }
        })
        .collect();

    let n = plans.len() as f64;
    let mut edges = BTreeSet::new();
    let mut out_links: Vec<Vec<&str>> = vec![Vec::new(); plans.len()];
    for (u, src) in plans.iter().enumerate() {
        for (v, dst) in plans.iter().enumerate() {
            let sv = dst.latent / 23.0;
            let p = (cfg.link_density / n * (0.1 + 1.9 * sv * sv)).min(1.0);
            // moved-site clones carry no link page
            if u != v && !src.clone && rng.random_bool(p) {
                edges.insert((src.id.clone(), dst.id.clone()));
                out_links[u].push(dst.address.as_str());
            }
        }
    }

    let corpus = out_dir.join("corpus");
    let reference = cfg.scrape_time.date_naive();
    let scrape = cfg.scrape_time.to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    let mut visual = String::new();
    for (plan, links) in plans.iter().zip(&out_links) {
        let dir = corpus.join(&plan.id);
        let meta = serde_json::json!({ "address": plan.address, "scrape_time": scrape });
        write_text(&dir.join("meta.json"), &format!("{meta}\n"))?;
        let pages = domain_pages(&mut rng, plan, links, cfg, reference);
        for (page_id, html) in &pages.files {
            write_text(&dir.join("pages").join(format!("{page_id}.html")), html)?;
        }
        for (image_ref, category, conf) in pages.visual {
            let rec = serde_json::json!({
                "domain_id": plan.id,
                "image_ref": image_ref,
                "category": category.name(),
                "confidence": conf,
            });
            let _ = writeln!(visual, "{rec}");
        }
    }

    let mut records = Vec::new();
    let mut annotations = String::new();
    for plan in &plans {
        let truth = planted_answers(&mut rng, plan.latent);
        for annotator in SYNTH_ANNOTATORS {
            let answers: Vec<bool> = truth.iter().map(|&a| a ^ rng.random_bool(cfg.sigma)).collect();
            let r = AnnotationRecord::new(plan.id.clone(), annotator, &answers)?;
            annotations.push_str(&annotation_line(&r));
            annotations.push('\n');
            records.push(r);
        }
    }

    let latent: Vec<(String, f64)> = plans.iter().map(|p| (p.id.clone(), p.latent)).collect();
    let out = SynthOutput {
        corpus,
        annotations: out_dir.join("annotations.ndjson"),
        planted: out_dir.join("planted.csv"),
        planted_edges: out_dir.join("planted_edges.tsv"),
        gazetteer: out_dir.join("gazetteer.tsv"),
        lexicon: out_dir.join("lexicon.txt"),
        visual: out_dir.join("visual.ndjson"),
        questionnaire: out_dir.join("questionnaire.txt"),
        latent,
        edges,
        records,
    };
    write_text(&out.annotations, &annotations)?;
    write_text(&out.planted, &planted_csv(&out.latent))?;
    let edge_text: String = out.edges.iter().map(|(a, b)| format!("{a}\t{b}\n")).collect();
    write_text(&out.planted_edges, &edge_text)?;
    write_text(&out.gazetteer, &gazetteer_text())?;
    write_text(&out.lexicon, &(LEXICON.join("\n") + "\n"))?;
    write_text(&out.visual, &visual)?;
    write_text(&out.questionnaire, &questionnaire_text())?;
    log::info!(
        "synth: {} domains, {} planted edges, sigma {}",
        plans.len(),
        out.edges.len(),
        fmt_f64(cfg.sigma)
    );
    Ok(out)
}
