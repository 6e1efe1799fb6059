//! On-disk corpus ingestion, domain link graph and the visual sidecar.
//!
//! Layout: `<root>/<domain_id>/meta.json` holding `address` and
//! `scrape_time` (RFC 3339), and `<root>/<domain_id>/pages/<page_id>.html`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use ego_tree::NodeRef;
use onionrank_core::features::{VisualCategory, VisualRecord};
use onionrank_core::DiGraph;
use scraper::{Html, Node, Selector};
use serde::Deserialize;
use url::Url;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("corpus root {0} is not a directory")]
    NotADirectory(PathBuf),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
}

impl CorpusError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io { path: path.to_path_buf(), source }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperlink {
    pub href: String,
    pub anchor_text: String,
}

/// Markup facts read once at ingest so feature extraction never reparses.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HtmlFacts {
    pub title: Option<String>,
    pub h1: Vec<String>,
    pub img_alts: Vec<String>,
    pub img_count: usize,
    pub password_inputs: usize,
    /// `name` and `id` attributes of every input element.
    pub input_names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageDocument {
    pub page_id: String,
    pub raw_html: Vec<u8>,
    pub visible_text: String,
    pub hyperlinks: Vec<Hyperlink>,
    pub facts: HtmlFacts,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    pub domain_id: String,
    pub address: String,
    pub scrape_time: DateTime<Utc>,
    /// Sorted by page id.
    pub pages: Vec<PageDocument>,
}

/// The page named `index` when present, otherwise the first page.
pub const LANDING_PAGE: &str = "index";

impl Domain {
    /// Pages feature extraction looks at.
    pub fn pages_for(&self, landing_only: bool) -> &[PageDocument] {
        if !landing_only {
            return &self.pages;
        }
        let i = self.pages.iter().position(|p| p.page_id == LANDING_PAGE).unwrap_or(0);
        &self.pages[i..(i + 1).min(self.pages.len())]
    }

    /// Visible text of the selected pages joined by newlines.
    pub fn text(&self, landing_only: bool) -> String {
        let pages = self.pages_for(landing_only);
        pages.iter().map(|p| p.visible_text.as_str()).collect::<Vec<_>>().join("\n")
    }

    pub fn host(&self) -> String {
        normalize_host(&self.address)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    /// Sorted by domain id.
    pub domains: Vec<Domain>,
}

impl Corpus {
    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.domains.iter().map(|d| d.domain_id.as_str())
    }

    pub fn get(&self, domain_id: &str) -> Option<&Domain> {
        self.domains
            .binary_search_by(|d| d.domain_id.as_str().cmp(domain_id))
            .ok()
            .map(|i| &self.domains[i])
    }

    /// Latest scrape time in the corpus.
    pub fn scrape_date(&self) -> Option<DateTime<Utc>> {
        self.domains.iter().map(|d| d.scrape_time).max()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub domains_loaded: usize,
    pub pages_loaded: usize,
    pub skipped_pages: Vec<(PathBuf, String)>,
    pub domain_errors: Vec<(String, String)>,
    pub warnings: Vec<String>,
}

impl fmt::Display for IngestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ingest: {} domains, {} pages", self.domains_loaded, self.pages_loaded)?;
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        for (id, e) in &self.domain_errors {
            writeln!(f, "domain {id} skipped: {e}")?;
        }
        for (p, e) in &self.skipped_pages {
            writeln!(f, "page {} skipped: {e}", p.display())?;
        }
        Ok(())
    }
}

#[derive(Deserialize)]
struct Meta {
    address: String,
    scrape_time: String,
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>, CorpusError> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| CorpusError::io(dir, e))? {
        out.push(entry.map_err(|e| CorpusError::io(dir, e))?.path());
    }
    out.sort();
    Ok(out)
}

fn read_meta(path: &Path) -> Result<(String, DateTime<Utc>), String> {
    let raw = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let meta: Meta = serde_json::from_str(&raw).map_err(|e| format!("{}: {e}", path.display()))?;
    if meta.address.trim().is_empty() {
        return Err(format!("{}: empty address", path.display()));
    }
    let t = DateTime::parse_from_rfc3339(&meta.scrape_time)
        .map_err(|e| format!("{}: scrape_time: {e}", path.display()))?;
    Ok((meta.address.trim().to_string(), t.with_timezone(&Utc)))
}

fn ingest_domain(dir: &Path, domain_id: &str, report: &mut IngestReport) -> Result<Domain, String> {
    let (address, scrape_time) = read_meta(&dir.join("meta.json"))?;
    let pages_dir = dir.join("pages");
    let files = sorted_entries(&pages_dir).map_err(|e| e.to_string())?;
    let mut pages = Vec::new();
    for path in files.into_iter().filter(|p| p.extension().is_some_and(|e| e == "html")) {
        let page_id = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        match fs::read(&path) {
            Ok(bytes) => match String::from_utf8(bytes) {
                Ok(html) => pages.push(parse_page(&page_id, &html)),
                Err(_) => report.skipped_pages.push((path, "not valid UTF-8".into())),
            },
            Err(e) => report.skipped_pages.push((path, e.to_string())),
        }
    }
    if pages.is_empty() {
        return Err("no readable pages".into());
    }
    pages.sort_by(|a, b| a.page_id.cmp(&b.page_id));
    Ok(Domain { domain_id: domain_id.to_string(), address, scrape_time, pages })
}

/// Loads every domain directory under `root`. Domains with a missing or
/// malformed meta file, or without readable pages, are reported and skipped.
pub fn ingest_corpus(root: &Path) -> Result<(Corpus, IngestReport), CorpusError> {
    if !root.is_dir() {
        return Err(CorpusError::NotADirectory(root.to_path_buf()));
    }
    let mut report = IngestReport::default();
    let mut domains = Vec::new();
    for dir in sorted_entries(root)?.into_iter().filter(|p| p.is_dir()) {
        let Some(id) = dir.file_name().and_then(|s| s.to_str()).map(str::to_string) else {
            report.warnings.push(format!("skipping non-UTF-8 directory {}", dir.display()));
            continue;
        };
        match ingest_domain(&dir, &id, &mut report) {
            Ok(d) => {
                report.pages_loaded += d.pages.len();
                domains.push(d);
            }
            Err(e) => report.domain_errors.push((id, e)),
        }
    }
    if domains.is_empty() {
        report.warnings.push(format!("no domains found under {}", root.display()));
    }
    report.domains_loaded = domains.len();
    Ok((Corpus { domains }, report))
}

const BLOCK_TAGS: &[&str] = &[
    "address", "article", "aside", "blockquote", "body", "br", "dd", "div", "dl", "dt", "fieldset", "figcaption",
    "figure", "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6", "head", "header", "hr", "html", "li", "main",
    "nav", "ol", "option", "p", "pre", "section", "select", "table", "tbody", "td", "tfoot", "th", "thead", "title",
    "tr", "ul",
];

const HIDDEN_TAGS: &[&str] = &["script", "style", "noscript", "template"];

fn collect_text(node: NodeRef<'_, Node>, out: &mut String) {
    match node.value() {
        Node::Text(t) => out.push_str(t),
        Node::Element(e) => {
            let name = e.name();
            if HIDDEN_TAGS.contains(&name) {
                return;
            }
            let block = BLOCK_TAGS.contains(&name);
            if block {
                out.push(' ');
            }
            for child in node.children() {
                collect_text(child, out);
            }
            if block {
                out.push(' ');
            }
        }
        Node::Document | Node::Fragment => node.children().for_each(|c| collect_text(c, out)),
        _ => {}
    }
}

/// Collapses whitespace runs to one space and trims.
pub fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn element_text(el: scraper::ElementRef<'_>) -> String {
    let mut s = String::new();
    collect_text(*el, &mut s);
    normalize_whitespace(&s)
}

fn selector(css: &str) -> Selector {
    Selector::parse(css).expect("static selector")
}

/// Parses one page: visible text (script/style/comments dropped, block
/// elements separated by spaces), anchor links and markup facts.
pub fn parse_page(page_id: &str, html: &str) -> PageDocument {
    let doc = Html::parse_document(html);
    let mut raw_text = String::new();
    collect_text(doc.tree.root(), &mut raw_text);

    let hyperlinks = doc
        .select(&selector("a[href]"))
        .map(|a| Hyperlink {
            href: a.value().attr("href").unwrap_or_default().trim().to_string(),
            anchor_text: element_text(a),
        })
        .collect();

    let title = doc.select(&selector("title")).next().map(element_text);
    let h1 = doc.select(&selector("h1")).map(element_text).collect();
    let imgs: Vec<_> = doc.select(&selector("img")).collect();
    let img_alts = imgs.iter().filter_map(|i| i.value().attr("alt")).map(normalize_whitespace).collect();
    let inputs: Vec<_> = doc.select(&selector("input")).collect();
    let password_inputs = inputs
        .iter()
        .filter(|i| i.value().attr("type").is_some_and(|t| t.trim().eq_ignore_ascii_case("password")))
        .count();
    let input_names = inputs
        .iter()
        .flat_map(|i| [i.value().attr("name"), i.value().attr("id")])
        .flatten()
        .map(str::to_string)
        .collect();

    PageDocument {
        page_id: page_id.to_string(),
        raw_html: html.as_bytes().to_vec(),
        visible_text: normalize_whitespace(&raw_text),
        hyperlinks,
        facts: HtmlFacts { title, h1, img_count: imgs.len(), img_alts, password_inputs, input_names },
    }
}

/// Lowercased host without a leading `www.` or port. Accepts bare host
/// names as well as URLs.
pub fn normalize_host(address: &str) -> String {
    let a = address.trim();
    let host = match Url::parse(a) {
        Ok(u) if u.host_str().is_some() => u.host_str().unwrap_or_default().to_string(),
        _ => {
            let rest = a.split_once("://").map_or(a, |(_, r)| r);
            let rest = rest.split(['/', '?', '#']).next().unwrap_or_default();
            let rest = rest.rsplit_once('@').map_or(rest, |(_, h)| h);
            rest.split(':').next().unwrap_or_default().to_string()
        }
    };
    let host = host.to_ascii_lowercase();
    host.strip_prefix("www.").map(str::to_string).unwrap_or(host)
}

/// Host an href points to, resolved against the page's own host.
/// `None` for hrefs without a network host (mailto:, javascript:, ...)
/// and for malformed ones.
pub fn href_host(href: &str, own_host: &str) -> Option<String> {
    let base = Url::parse(&format!("http://{own_host}/")).ok()?;
    let url = base.join(href).ok()?;
    if !matches!(url.scheme(), "http" | "https") {
        return None;
    }
    let host = url.host_str()?.to_ascii_lowercase();
    Some(host.strip_prefix("www.").map(str::to_string).unwrap_or(host))
}

/// Domain-level directed graph: `A -> B` iff a page of `A` links to `B`'s
/// host. Self-links and links to hosts outside the corpus are dropped.
pub fn derive_link_graph(corpus: &Corpus) -> DiGraph {
    let by_host: BTreeMap<String, &str> = corpus.domains.iter().map(|d| (d.host(), d.domain_id.as_str())).collect();
    let mut edges = BTreeSet::new();
    for d in &corpus.domains {
        let own = d.host();
        for page in &d.pages {
            for link in &page.hyperlinks {
                let Some(host) = href_host(&link.href, &own) else { continue };
                if let Some(&dst) = by_host.get(&host) {
                    if dst != d.domain_id {
                        edges.insert((d.domain_id.as_str(), dst));
                    }
                }
            }
        }
    }
    DiGraph::from_labeled(corpus.ids(), edges)
}

#[derive(Deserialize)]
struct VisualLine {
    domain_id: String,
    image_ref: String,
    category: String,
    confidence: f64,
}

/// Visual records per domain plus a description of every rejected line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VisualSidecar {
    pub records: BTreeMap<String, Vec<VisualRecord>>,
    pub rejected: Vec<String>,
}

impl VisualSidecar {
    pub fn for_domain(&self, domain_id: &str) -> &[VisualRecord] {
        self.records.get(domain_id).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Reads newline-delimited JSON image records. Invalid lines are rejected
/// and logged; blank lines are ignored.
pub fn load_visual_records(path: &Path) -> Result<VisualSidecar, CorpusError> {
    let file = fs::File::open(path).map_err(|e| CorpusError::io(path, e))?;
    let mut out = VisualSidecar::default();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CorpusError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str::<VisualLine>(&line).map_err(|e| e.to_string()).and_then(|v| {
            let category = VisualCategory::parse(&v.category).map_err(|e| e.to_string())?;
            VisualRecord::new(v.domain_id, v.image_ref, category, v.confidence).map_err(|e| e.to_string())
        });
        match parsed {
            Ok(r) => out.records.entry(r.domain_id.clone()).or_default().push(r),
            Err(e) => {
                let msg = format!("{}:{}: {e}", path.display(), n + 1);
                log::warn!("visual record rejected: {msg}");
                out.rejected.push(msg);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn script_is_not_visible() {
        let p = parse_page("index", "<p>hi<script>x()</script></p>");
        assert_eq!(p.visible_text, "hi");
    }

    #[test]
    fn style_comments_and_blocks() {
        let p = parse_page(
            "x",
            "<html><head><style>p{}</style><title>T</title></head><body><!-- c --><p>one</p><p>two <b>th</b>ree</p></body></html>",
        );
        assert_eq!(p.visible_text, "T one two three");
        assert_eq!(p.facts.title.as_deref(), Some("T"));
    }

    #[test]
    fn links_from_anchor_href_only() {
        let p = parse_page("x", r#"<a href=" http://b.onion/x ">B</a><link href="http://c.onion"><a>none</a>"#);
        assert_eq!(p.hyperlinks, vec![Hyperlink { href: "http://b.onion/x".into(), anchor_text: "B".into() }]);
    }

    #[test]
    fn host_normalization() {
        assert_eq!(normalize_host("WWW.Abc.onion:8080/path"), "abc.onion");
        assert_eq!(normalize_host("http://www.abc.onion/"), "abc.onion");
        assert_eq!(href_host("/local", "a.onion").as_deref(), Some("a.onion"));
        assert_eq!(href_host("https://WWW.B.onion:81/q?x", "a.onion").as_deref(), Some("b.onion"));
        assert_eq!(href_host("mailto:x@y.z", "a.onion"), None);
        assert_eq!(href_host("http://[bad", "a.onion"), None);
    }

    #[test]
    fn facts_cover_inputs_and_images() {
        let p = parse_page(
            "x",
            r#"<h1> Shop </h1><img src=a alt="blue pills"><img src=b><input type="PASSWORD"><input name="user_name">"#,
        );
        assert_eq!(p.facts.h1, vec!["Shop"]);
        assert_eq!(p.facts.img_count, 2);
        assert_eq!(p.facts.img_alts, vec!["blue pills"]);
        assert_eq!(p.facts.password_inputs, 1);
        assert_eq!(p.facts.input_names, vec!["user_name"]);
    }
}
