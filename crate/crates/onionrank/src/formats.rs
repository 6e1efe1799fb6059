//! Readers and writers for every file the toolkit consumes or emits.
//!
//! Floating-point values are written with 17 significant digits so a
//! write/read cycle is bit-exact.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use onionrank_core::features::{
    EntityCategory, FeatureMatrix, Gazetteer, GroupSet, Lexicon, StandardizationStats, FEATURE_NAMES,
};
use onionrank_core::graph::Ranking;
use onionrank_core::groundtruth::{AnnotationRecord, GroundTruth, N_QUESTIONS, QUESTIONNAIRE_VERSION, QUESTIONS};
use onionrank_core::ltr::{Dense, EpochRecord, Mlp, ModelParams, RankedDomain, Scheme};
use onionrank_core::metrics::MethodCurve;
use onionrank_core::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 17 significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(s: &str, path: &Path, line: usize) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::format(path, format!("line {line}: bad number `{s}`")))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn csv_line(fields: &[String]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(fields).expect("in-memory write");
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn csv_reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(file))
}

// ---------------------------------------------------------------- features

/// Feature CSV contents: ids, column names and raw rows.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub columns: Vec<String>,
    pub ids: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl FeatureTable {
    /// Restricts to the columns of `groups`, which must all be present.
    pub fn select(&self, groups: GroupSet) -> Result<FeatureMatrix> {
        let wanted = groups.column_names();
        let idx = wanted
            .iter()
            .map(|name| {
                self.columns
                    .iter()
                    .position(|c| c == name)
                    .ok_or_else(|| Error::Invalid(format!("feature table has no column `{name}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FeatureMatrix {
            groups,
            ids: self.ids.clone(),
            rows: self.rows.iter().map(|r| idx.iter().map(|&i| r[i]).collect()).collect(),
        })
    }
}

pub fn feature_csv(matrix: &FeatureMatrix) -> String {
    let mut out = String::new();
    let mut header = vec!["domain_id".to_string()];
    header.extend(matrix.column_names().iter().map(|s| s.to_string()));
    out.push_str(&csv_line(&header));
    for (id, row) in matrix.ids.iter().zip(&matrix.rows) {
        let mut fields = vec![id.clone()];
        fields.extend(row.iter().map(|&x| fmt_f64(x)));
        out.push_str(&csv_line(&fields));
    }
    out
}

pub fn read_feature_csv(path: &Path) -> Result<FeatureTable> {
    let mut r = csv_reader(path)?;
    let headers = r.headers()?.clone();
    if headers.get(0) != Some("domain_id") {
        return Err(Error::format(path, "first column must be domain_id"));
    }
    let columns: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    if let Some(bad) = columns.iter().find(|c| !FEATURE_NAMES.contains(&c.as_str())) {
        return Err(Error::format(path, format!("unknown feature column `{bad}`")));
    }
    let mut table = FeatureTable { columns, ids: Vec::new(), rows: Vec::new() };
    for (n, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != table.columns.len() + 1 {
            return Err(Error::format(path, format!("line {}: expected {} fields", n + 2, table.columns.len() + 1)));
        }
        table.ids.push(rec[0].to_string());
        table.rows.push(rec.iter().skip(1).map(|f| parse_f64(f, path, n + 2)).collect::<Result<_>>()?);
    }
    Ok(table)
}

// ------------------------------------------------------- gazetteer, lexicon

/// `surface_form<TAB>category` per line; `#` starts a comment line.
pub fn read_gazetteer(path: &Path) -> Result<Gazetteer> {
    let text = read_text(path)?;
    let mut entries = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (surface, cat) = line
            .split_once('\t')
            .ok_or_else(|| Error::format(path, format!("line {}: expected surface<TAB>category", n + 1)))?;
        let cat = EntityCategory::parse(cat.trim()).map_err(|e| Error::format(path, format!("line {}: {e}", n + 1)))?;
        entries.push((surface.trim().to_string(), cat));
    }
    Ok(Gazetteer::from_entries(entries))
}

/// One word per line, most frequent first.
pub fn read_lexicon(path: &Path) -> Result<Lexicon> {
    let text = read_text(path)?;
    let lex = Lexicon::from_ranked(text.lines().map(str::trim).filter(|w| !w.is_empty()));
    if lex.is_empty() {
        return Err(Error::format(path, "lexicon is empty"));
    }
    Ok(lex)
}

// -------------------------------------------------------------------- model

#[derive(Serialize, Deserialize)]
struct LayerFile {
    inputs: usize,
    outputs: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct StatsFile {
    mean: Vec<f64>,
    std: Vec<f64>,
}

#[derive(Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    scheme: String,
    seed: u64,
    columns: Vec<String>,
    layers: Vec<LayerFile>,
    stats: Option<StatsFile>,
}

/// A trained network with the feature columns it expects.
#[derive(Debug, Clone, PartialEq)]
pub struct SavedModel {
    pub params: ModelParams,
    pub columns: Vec<String>,
}

const MODEL_FORMAT: &str = "onionrank-model";

fn json_array(values: &[f64]) -> String {
    let items: Vec<String> = values.iter().map(|&v| fmt_f64(v)).collect();
    format!("[{}]", items.join(","))
}

pub fn model_json(model: &SavedModel) -> String {
    let p = &model.params;
    let mut s = String::new();
    s.push_str("{\n");
    let _ = writeln!(s, "  \"format\": \"{MODEL_FORMAT}\",");
    s.push_str("  \"version\": 1,\n");
    let _ = writeln!(s, "  \"scheme\": \"{}\",", p.scheme.name());
    let _ = writeln!(s, "  \"seed\": {},", p.seed);
    let _ = writeln!(s, "  \"columns\": {},", serde_json::to_string(&model.columns).expect("strings serialize"));
    s.push_str("  \"layers\": [\n");
    let layers = p.network.layers();
    for (i, l) in layers.iter().enumerate() {
        let _ = write!(
            s,
            "    {{\"inputs\": {}, \"outputs\": {}, \"weights\": {}, \"bias\": {}}}",
            l.inputs,
            l.outputs,
            json_array(&l.weights),
            json_array(&l.bias)
        );
        s.push_str(if i + 1 < layers.len() { ",\n" } else { "\n" });
    }
    s.push_str("  ],\n");
    match &p.stats {
        Some(st) => {
            let _ = writeln!(s, "  \"stats\": {{\"mean\": {}, \"std\": {}}}", json_array(&st.mean), json_array(&st.std));
        }
        None => s.push_str("  \"stats\": null\n"),
    }
    s.push_str("}\n");
    s
}

pub fn read_model(path: &Path) -> Result<SavedModel> {
    let raw = read_text(path)?;
    let f: ModelFile = serde_json::from_str(&raw).map_err(|e| Error::format(path, e.to_string()))?;
    if f.format != MODEL_FORMAT || f.version != 1 {
        return Err(Error::format(path, "not an onionrank model file (version 1)"));
    }
    let [h1, h2, out]: [LayerFile; 3] =
        f.layers.try_into().map_err(|_| Error::format(path, "expected exactly three layers"))?;
    let dense = |l: LayerFile| Dense { inputs: l.inputs, outputs: l.outputs, weights: l.weights, bias: l.bias };
    let network = Mlp { hidden1: dense(h1), hidden2: dense(h2), output: dense(out) };
    if !network.is_valid() {
        return Err(Error::format(path, "inconsistent layer shapes or non-finite weights"));
    }
    if network.input_dim() != f.columns.len() {
        return Err(Error::format(path, "column list does not match the input width"));
    }
    let stats = f.stats.map(|s| StandardizationStats { mean: s.mean, std: s.std });
    if stats.as_ref().is_some_and(|s| s.mean.len() != f.columns.len() || s.std.len() != f.columns.len()) {
        return Err(Error::format(path, "standardization stats do not match the input width"));
    }
    let scheme = Scheme::parse(&f.scheme).map_err(|e| Error::format(path, e.to_string()))?;
    Ok(SavedModel { params: ModelParams { network, seed: f.seed, scheme, stats }, columns: f.columns })
}

pub fn history_csv(epochs: &[EpochRecord]) -> String {
    let mut s = String::from("epoch,loss,val_ndcg10\n");
    for e in epochs {
        let _ = writeln!(s, "{},{},{}", e.epoch, fmt_f64(e.loss), fmt_f64(e.val_ndcg));
    }
    s
}

// ----------------------------------------------------------- graph, ranking

/// `src<TAB>dst` per line, sorted.
pub fn edge_list(graph: &DiGraph) -> String {
    let mut edges: Vec<(&str, &str)> = graph.edges().map(|(u, v)| (graph.label(u), graph.label(v))).collect();
    edges.sort_unstable();
    edges.iter().map(|(a, b)| format!("{a}\t{b}\n")).collect()
}

/// Reads an edge list; nodes are the edge endpoints plus `extra_nodes`.
pub fn read_edge_list(path: &Path, extra_nodes: &[String]) -> Result<DiGraph> {
    let text = read_text(path)?;
    let mut edges = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (a, b) = line
            .split_once('\t')
            .ok_or_else(|| Error::format(path, format!("line {}: expected src<TAB>dst", n + 1)))?;
        edges.push((a.trim().to_string(), b.trim().to_string()));
    }
    let mut nodes: Vec<String> = extra_nodes.to_vec();
    nodes.extend(edges.iter().flat_map(|(a, b)| [a.clone(), b.clone()]));
    Ok(DiGraph::from_labeled(nodes, edges))
}

/// `node,score,rank` for a graph ranking.
pub fn graph_ranking_csv(graph: &DiGraph, ranking: &Ranking) -> String {
    let mut s = String::from("node,score,rank\n");
    for (pos, &(node, score)) in ranking.entries().iter().enumerate() {
        s.push_str(&csv_line(&[graph.label(node).to_string(), fmt_f64(score), (pos + 1).to_string()]));
    }
    s
}

/// `node,score,rank` for a model ranking.
pub fn ranked_domains_csv(ranked: &[RankedDomain]) -> String {
    let mut s = String::from("node,score,rank\n");
    for r in ranked {
        s.push_str(&csv_line(&[r.domain_id.clone(), fmt_f64(r.score), r.rank.to_string()]));
    }
    s
}

/// Node ids of a ranking CSV in rank order.
pub fn read_ranking_csv(path: &Path) -> Result<Vec<String>> {
    #[derive(Deserialize)]
    struct Row {
        node: String,
        rank: usize,
    }
    let mut rows: Vec<Row> = csv_reader(path)?.deserialize().collect::<Result<_, _>>()?;
    rows.sort_by_key(|r| r.rank);
    Ok(rows.into_iter().map(|r| r.node).collect())
}

// ------------------------------------------------------------------ reports

/// `method,K,fold,ndcg` rows, folds in index order.
pub fn report_csv(curves: &[MethodCurve]) -> String {
    let mut s = String::from("method,K,fold,ndcg\n");
    for c in curves {
        for p in &c.curve.points {
            for (fold, v) in p.per_fold.iter().enumerate() {
                let _ = writeln!(s, "{},{},{},{}", c.method, p.k, fold, fmt_f64(*v));
            }
        }
    }
    s
}

/// `method,K,mean_ndcg` rows.
pub fn summary_csv(curves: &[MethodCurve]) -> String {
    let mut s = String::from("method,K,mean_ndcg\n");
    for c in curves {
        for p in &c.curve.points {
            let _ = writeln!(s, "{},{},{}", c.method, p.k, fmt_f64(p.mean));
        }
    }
    s
}

// -------------------------------------------------------------- annotations

#[derive(Serialize, Deserialize)]
struct AnnotationLine {
    domain_id: String,
    annotator_id: String,
    answers: Vec<bool>,
}

pub fn annotation_line(r: &AnnotationRecord) -> String {
    let line = AnnotationLine {
        domain_id: r.domain_id.clone(),
        annotator_id: r.annotator_id.clone(),
        answers: r.answers.to_vec(),
    };
    serde_json::to_string(&line).expect("plain data serializes")
}

/// Reads newline-delimited annotation records; a missing file is empty.
pub fn read_annotations(path: &Path) -> Result<Vec<AnnotationRecord>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let l: AnnotationLine =
            serde_json::from_str(&line).map_err(|e| Error::format(path, format!("line {}: {e}", n + 1)))?;
        out.push(
            AnnotationRecord::new(l.domain_id, l.annotator_id, &l.answers)
                .map_err(|e| Error::format(path, format!("line {}: {e}", n + 1)))?,
        );
    }
    Ok(out)
}

/// Appends one record and flushes, so an interrupted session keeps every
/// completed domain.
pub fn append_annotation(path: &Path, record: &AnnotationRecord) -> Result<()> {
    let mut f = fs::OpenOptions::new().create(true).append(true).open(path).map_err(|e| Error::io(path, e))?;
    writeln!(f, "{}", annotation_line(record)).and_then(|_| f.flush()).map_err(|e| Error::io(path, e))
}

/// Versioned questionnaire: a version line, then one question per line.
pub fn questionnaire_text() -> String {
    let mut s = format!("# questionnaire version {QUESTIONNAIRE_VERSION}\n");
    for q in QUESTIONS {
        s.push_str(q);
        s.push('\n');
    }
    s
}

/// Parses a questionnaire file and checks it matches the built-in one.
pub fn check_questionnaire(path: &Path) -> Result<()> {
    let text = read_text(path)?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    let version: Option<u32> = header.strip_prefix("# questionnaire version ").and_then(|v| v.trim().parse().ok());
    if version != Some(QUESTIONNAIRE_VERSION) {
        return Err(Error::format(path, format!("expected questionnaire version {QUESTIONNAIRE_VERSION}")));
    }
    let questions: Vec<&str> = lines.filter(|l| !l.trim().is_empty()).collect();
    if questions.len() != N_QUESTIONS || questions.iter().zip(QUESTIONS).any(|(a, b)| a.trim() != b) {
        return Err(Error::format(path, "questions differ from the built-in questionnaire"));
    }
    Ok(())
}

/// `domain_id,gain` rows.
pub fn gains_csv(truths: &[GroundTruth]) -> String {
    let mut s = String::from("domain_id,gain\n");
    for t in truths {
        s.push_str(&csv_line(&[t.domain_id.clone(), t.gain.to_string()]));
    }
    s
}

/// `domain_id,latent_gain` rows.
pub fn planted_csv(rows: &[(String, f64)]) -> String {
    let mut s = String::from("domain_id,latent_gain\n");
    for (id, g) in rows {
        s.push_str(&csv_line(&[id.clone(), fmt_f64(*g)]));
    }
    s
}

pub fn read_planted_csv(path: &Path) -> Result<BTreeMap<String, f64>> {
    #[derive(Deserialize)]
    struct Row {
        domain_id: String,
        latent_gain: f64,
    }
    let rows: Vec<Row> = csv_reader(path)?.deserialize().collect::<Result<_, _>>()?;
    Ok(rows.into_iter().map(|r| (r.domain_id, r.latent_gain)).collect())
}

// ----------------------------------------------------------------- manifest

/// Everything needed to rerun a command; written next to its outputs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub seed: Option<u64>,
    pub config: BTreeMap<String, String>,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(subcommand: &str) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            ..Default::default()
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use onionrank_core::ltr::Init;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.0] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
    }

    #[test]
    fn model_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        let network = Mlp::new(3, [5, 4], Init::Glorot, 11);
        let stats = StandardizationStats { mean: vec![0.1, 0.2, 1.0 / 3.0], std: vec![1.0, 0.0, 2.5] };
        let model = SavedModel {
            params: ModelParams { network, seed: 11, scheme: Scheme::Pairwise, stats: Some(stats) },
            columns: vec!["in_degree".into(), "out_degree".into(), "cls".into()],
        };
        write_text(&path, &model_json(&model)).unwrap();
        assert_eq!(read_model(&path).unwrap(), model);
    }

    #[test]
    fn questionnaire_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q.txt");
        write_text(&path, &questionnaire_text()).unwrap();
        check_questionnaire(&path).unwrap();
        write_text(&path, "# questionnaire version 2\n").unwrap();
        assert!(check_questionnaire(&path).is_err());
    }
}
