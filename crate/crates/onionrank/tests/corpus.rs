use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use onionrank::corpus::{derive_link_graph, ingest_corpus};
use onionrank::synth::{generate, SynthConfig};

fn write(path: &Path, contents: &[u8]) {
    fs::create_dir_all(path.parent().unwrap()).unwrap();
    fs::write(path, contents).unwrap();
}

fn meta(address: &str) -> String {
    format!(r#"{{"address": "{address}", "scrape_time": "2025-03-01T10:00:00Z"}}"#)
}

#[test]
fn ingest_reads_pages_and_reports_problems() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    write(&root.join("alpha/meta.json"), meta("alphaaaa.onion").as_bytes());
    write(
        &root.join("alpha/pages/index.html"),
        br#"<html><head><title>Alpha</title><script>var hidden = 1;</script><style>p {}</style></head>
<body><h1>Welcome</h1><p>Fresh <b>stock</b></p><div>today</div>
<a href="http://bravoooo.onion/shop">bravo</a> <a href="/about.html">about</a>
<a href="http://alphaaaa.onion/x">self</a> <a href="mailto:x@y">mail</a>
<img src="a.png" alt="blue pills"><input type="password" name="pw"></body></html>"#,
    );
    write(&root.join("bravo/meta.json"), meta("http://BRAVOOOO.onion/").as_bytes());
    write(&root.join("bravo/pages/index.html"), b"<p>bravo home</p>");
    write(&root.join("bravo/pages/broken.html"), &[0xff, 0xfe, 0x00, 0x41]);
    write(&root.join("charlie/meta.json"), b"{not json");
    write(&root.join("charlie/pages/index.html"), b"<p>never read</p>");

    let (corpus, report) = ingest_corpus(root).unwrap();
    assert_eq!(corpus.ids().collect::<Vec<_>>(), ["alpha", "bravo"]);
    assert_eq!(report.domains_loaded, 2);
    assert_eq!(report.pages_loaded, 2);
    assert_eq!(report.skipped_pages.len(), 1);
    assert_eq!(report.domain_errors.len(), 1);
    assert_eq!(report.domain_errors[0].0, "charlie");

    let page = &corpus.get("alpha").unwrap().pages[0];
    assert!(!page.visible_text.contains("hidden"));
    assert!(!page.visible_text.contains("p {}"));
    assert!(page.visible_text.contains("Welcome Fresh stock today"));
    assert_eq!(page.hyperlinks.len(), 4);
    assert_eq!(page.facts.title.as_deref(), Some("Alpha"));
    assert_eq!(page.facts.img_alts, ["blue pills"]);
    assert_eq!(page.facts.password_inputs, 1);

    let g = derive_link_graph(&corpus);
    let edges: Vec<(&str, &str)> = g.edges().map(|(u, v)| (g.label(u), g.label(v))).collect();
    assert_eq!(edges, [("alpha", "bravo")]);
}

#[test]
fn missing_root_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ingest_corpus(&dir.path().join("absent")).is_err());
}

#[test]
fn derived_graph_matches_planted_links() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SynthConfig { n_domains: 120, seed: 9, ..SynthConfig::default() };
    let out = generate(&cfg, dir.path()).unwrap();
    let (corpus, report) = ingest_corpus(&out.corpus).unwrap();
    assert_eq!(report.domains_loaded, 120);
    assert!(report.domain_errors.is_empty() && report.skipped_pages.is_empty());
    let g = derive_link_graph(&corpus);
    let derived: BTreeSet<(String, String)> =
        g.edges().map(|(u, v)| (g.label(u).to_string(), g.label(v).to_string())).collect();
    assert!(!out.edges.is_empty());
    assert_eq!(derived, out.edges);
}
