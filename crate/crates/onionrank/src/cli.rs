//! Command-line entry point.
//!
//! Exit status: 0 on success, 1 on a usage error, 2 on a data error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};
use onionrank_core::features::{GroupSet, StandardizationStats};
use onionrank_core::graph::{HitsConfig, KatzConfig, LinkAlgorithm, PageRankConfig, ToRankConfig};
use onionrank_core::groundtruth::{assignment_plan, merge_annotations, DEFAULT_BATCH_SIZE, JUDGES_PER_DOMAIN};
use onionrank_core::ltr::{predict_rank, train, JudgedDomain, ModelParams, Scheme, TrainConfig};
use onionrank_core::metrics::{compare_baselines, cross_validate, ndcg_at_k, FoldPlan, MethodCurve, DEFAULT_K_LIST};
use onionrank_core::DiGraph;

use crate::annotate::{plan_csv, read_batch, run_session};
use crate::config::FileConfig;
use crate::corpus::{derive_link_graph, ingest_corpus, load_visual_records, Corpus, VisualSidecar};
use crate::error::{Error, Result};
use crate::extract::{extract_features, FeatureConfig};
use crate::formats::{
    edge_list, feature_csv, fmt_f64, gains_csv, graph_ranking_csv, history_csv, model_json, questionnaire_text,
    ranked_domains_csv, read_annotations, read_edge_list, read_feature_csv, read_gazetteer, read_lexicon, read_model,
    read_ranking_csv, report_csv, summary_csv, write_text, FeatureTable, RunManifest, SavedModel,
};
use crate::synth::{generate, SynthConfig};

#[derive(Debug, Parser)]
#[command(name = "onionrank", version, about = "Rank onion domains by learned attractiveness")]
pub struct Cli {
    /// TOML file with default values for any option.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic corpus with planted attractiveness.
    Synth(SynthArgs),
    /// Load a corpus, print the ingest report and write the link graph.
    Ingest(IngestArgs),
    /// Compute the feature matrix.
    Features(FeaturesArgs),
    /// Train a ranking model.
    Train(TrainArgs),
    /// Rank domains with a trained model.
    Rank(RankArgs),
    /// NDCG@K of a ranking against annotations.
    Eval(EvalArgs),
    /// Rank the link graph with PageRank, HITS, Katz or ToRank.
    Baseline(BaselineArgs),
    /// Five-fold cross-validation of a scheme and the link baselines.
    Cv(CvArgs),
    /// Annotation plan, interactive sessions and vote merging.
    #[command(subcommand)]
    Annotate(AnnotateCommand),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = crate::synth::DEFAULT_N_DOMAINS)]
    pub n_domains: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 0.1)]
    pub sigma: f64,
    #[arg(long, default_value_t = 3.0)]
    pub link_density: f64,
    #[arg(long, default_value_t = 0.15)]
    pub feature_noise: f64,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Directory for `domains.csv` and `edges.tsv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CorpusArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// TSV `surface_form<TAB>category`.
    #[arg(long)]
    pub gazetteer: Option<PathBuf>,
    /// Unigram word list, most frequent first.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Newline-delimited JSON image records.
    #[arg(long)]
    pub visual: Option<PathBuf>,
    /// Recency anchor (YYYY-MM-DD); defaults to the corpus scrape date.
    #[arg(long, value_parser = parse_date)]
    pub reference_date: Option<NaiveDate>,
    /// Use only the landing page of each domain.
    #[arg(long)]
    pub landing_only: bool,
    /// Use keywords / total words for keyword_to_total.
    #[arg(long)]
    pub invert_keyword_ratio: bool,
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Comma list of text, ner, html, visual, graph, or `all`.
    #[arg(long, value_parser = parse_groups)]
    pub groups: Option<GroupSet>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct TrainingArgs {
    #[arg(long, value_parser = parse_scheme)]
    pub scheme: Option<Scheme>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub max_epochs: Option<usize>,
    #[arg(long)]
    pub patience: Option<usize>,
    #[arg(long)]
    pub min_delta: Option<f64>,
    #[arg(long)]
    pub dropout: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Feature CSV; computed from the corpus options when absent.
    #[arg(long)]
    pub features: Option<PathBuf>,
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Annotation records (.ndjson) or gains (`domain_id,gain` .csv).
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long, value_parser = parse_groups)]
    pub groups: Option<GroupSet>,
    #[command(flatten)]
    pub training: TrainingArgs,
    #[arg(long)]
    pub out: PathBuf,
    /// Per-epoch CSV; defaults next to the model.
    #[arg(long)]
    pub history: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub features: Option<PathBuf>,
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Ranking CSV `node,score,rank`.
    #[arg(long)]
    pub ranking: PathBuf,
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long, value_parser = parse_k_list)]
    pub k_list: Option<KList>,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AlgoArgs {
    /// Damping or attenuation factor.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Katz base weight or ToRank connectivity weight.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Edge list `src<TAB>dst`, used instead of a corpus.
    #[arg(long)]
    pub edges: Option<PathBuf>,
    #[arg(long, value_parser = ["pagerank", "hits", "katz", "torank"])]
    pub algo: String,
    #[command(flatten)]
    pub params: AlgoArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CvArgs {
    #[arg(long)]
    pub features: Option<PathBuf>,
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Edge list for the baselines; derived from the corpus when absent.
    #[arg(long)]
    pub edges: Option<PathBuf>,
    #[arg(long)]
    pub annotations: PathBuf,
    #[arg(long, value_parser = parse_groups)]
    pub groups: Option<GroupSet>,
    #[arg(long, value_parser = parse_k_list)]
    pub k_list: Option<KList>,
    #[command(flatten)]
    pub training: TrainingArgs,
    /// Output directory for report.csv, summary.csv, notes.txt and the
    /// manifest.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum AnnotateCommand {
    /// Assign three judges to every domain and cut batches.
    Plan(PlanArgs),
    /// Answer the questionnaire for one batch (resumable).
    Run(RunArgs),
    /// Majority-vote the records and write `domain_id,gain`.
    Merge(MergeArgs),
    /// Write the versioned questionnaire file.
    Questionnaire {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Comma-separated annotator ids.
    #[arg(long, value_delimiter = ',', required = true)]
    pub annotators: Vec<String>,
    #[arg(long, default_value_t = JUDGES_PER_DOMAIN)]
    pub per_domain: usize,
    #[arg(long, default_value_t = DEFAULT_BATCH_SIZE)]
    pub batch_size: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub plan: PathBuf,
    #[arg(long)]
    pub annotator: String,
    #[arg(long)]
    pub batch: usize,
    /// Append-only annotation file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MergeArgs {
    #[arg(long, required = true, num_args = 1..)]
    pub annotations: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KList(pub Vec<usize>);

fn parse_date(s: &str) -> std::result::Result<NaiveDate, String> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|e| format!("expected YYYY-MM-DD: {e}"))
}

fn parse_groups(s: &str) -> std::result::Result<GroupSet, String> {
    GroupSet::parse(s).map_err(|e| e.to_string())
}

fn parse_scheme(s: &str) -> std::result::Result<Scheme, String> {
    Scheme::parse(s).map_err(|e| e.to_string())
}

fn parse_k_list(s: &str) -> std::result::Result<KList, String> {
    let ks = s
        .split(',')
        .map(|k| k.trim().parse::<usize>().map_err(|_| format!("bad K `{k}`")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if ks.contains(&0) {
        return Err("K must be >= 1".into());
    }
    Ok(KList(ks))
}

fn pick<T>(cli: Option<T>, file: Option<T>, default: T) -> T {
    cli.or(file).unwrap_or(default)
}

fn data_err(e: impl std::fmt::Display) -> Error {
    Error::Invalid(e.to_string())
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn write_manifest(path: &Path, m: &RunManifest) -> Result<()> {
    write_text(path, &m.to_json())
}

fn load_corpus(path: &Path) -> Result<Corpus> {
    let (corpus, report) = ingest_corpus(path)?;
    eprint!("{report}");
    Ok(corpus)
}

fn feature_config(args: &CorpusArgs, file: &FileConfig) -> Result<FeatureConfig> {
    let d = FeatureConfig::default();
    let file_date = file.reference_date.as_deref().map(parse_date).transpose().map_err(data_err)?;
    Ok(FeatureConfig {
        reference_date: args.reference_date.or(file_date),
        recency_days: pick(None, file.recency_days, d.recency_days),
        vocab_size: pick(None, file.vocab_size, d.vocab_size),
        min_df: pick(None, file.min_df, d.min_df),
        popularity_threshold: pick(None, file.popularity_threshold, d.popularity_threshold),
        top_x: pick(None, file.top_x, d.top_x),
        torank: d.torank,
        invert_keyword_ratio: args.invert_keyword_ratio || file.invert_keyword_ratio.unwrap_or(false),
        landing_only: args.landing_only || file.landing_only.unwrap_or(false),
    })
}

fn record_feature_config(m: &mut RunManifest, args: &CorpusArgs, cfg: &FeatureConfig) {
    let c = &mut m.config;
    c.insert("reference_date".into(), cfg.reference_date.map(|d| d.to_string()).unwrap_or_else(|| "scrape date".into()));
    c.insert("recency_days".into(), cfg.recency_days.to_string());
    c.insert("vocab_size".into(), cfg.vocab_size.to_string());
    c.insert("min_df".into(), cfg.min_df.to_string());
    c.insert("popularity_threshold".into(), cfg.popularity_threshold.to_string());
    c.insert("top_x".into(), cfg.top_x.to_string());
    c.insert("landing_only".into(), cfg.landing_only.to_string());
    c.insert("invert_keyword_ratio".into(), cfg.invert_keyword_ratio.to_string());
    for (k, v) in [("corpus", &args.corpus), ("gazetteer", &args.gazetteer), ("lexicon", &args.lexicon), ("visual", &args.visual)] {
        if let Some(p) = v {
            m.inputs.insert(k.into(), path_str(p));
        }
    }
}

/// Full 40-column table computed from the corpus options.
fn compute_table(args: &CorpusArgs, cfg: &FeatureConfig) -> Result<(FeatureTable, Corpus)> {
    let need = |p: &Option<PathBuf>, flag: &str| {
        p.clone().ok_or_else(|| Error::Invalid(format!("--{flag} is required to compute features")))
    };
    let corpus = load_corpus(&need(&args.corpus, "corpus")?)?;
    let gazetteer = read_gazetteer(&need(&args.gazetteer, "gazetteer")?)?;
    let lexicon = read_lexicon(&need(&args.lexicon, "lexicon")?)?;
    let visual = match &args.visual {
        Some(p) => load_visual_records(p)?,
        None => VisualSidecar::default(),
    };
    let vectors = extract_features(&corpus, &gazetteer, &lexicon, &visual, cfg)?;
    let full = onionrank_core::features::FeatureMatrix::assemble(&vectors, GroupSet::all());
    let table = FeatureTable {
        columns: full.column_names().iter().map(|s| s.to_string()).collect(),
        ids: full.ids,
        rows: full.rows,
    };
    Ok((table, corpus))
}

/// Feature table from `--features`, or computed from the corpus options.
fn feature_source(
    features: &Option<PathBuf>,
    args: &CorpusArgs,
    file: &FileConfig,
    m: &mut RunManifest,
) -> Result<(FeatureTable, Option<Corpus>)> {
    match features {
        Some(p) => {
            m.inputs.insert("features".into(), path_str(p));
            Ok((read_feature_csv(p)?, None))
        }
        None => {
            let cfg = feature_config(args, file)?;
            record_feature_config(m, args, &cfg);
            let (t, c) = compute_table(args, &cfg)?;
            Ok((t, Some(c)))
        }
    }
}

/// Gains from annotation records (majority vote) or a `domain_id,gain` CSV.
fn load_gains(path: &Path) -> Result<BTreeMap<String, u32>> {
    if path.extension().is_some_and(|e| e == "csv") {
        #[derive(serde::Deserialize)]
        struct Row {
            domain_id: String,
            gain: u32,
        }
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let rows: Vec<Row> = csv::Reader::from_reader(file).deserialize().collect::<std::result::Result<_, _>>()?;
        return Ok(rows.into_iter().map(|r| (r.domain_id, r.gain)).collect());
    }
    let merged = merge_annotations(&read_annotations(path)?)?;
    for (d, n) in &merged.incomplete {
        log::warn!("domain {d} has {n} annotation records; needs {JUDGES_PER_DOMAIN}, skipped");
    }
    Ok(merged.truths.into_iter().map(|t| (t.domain_id, t.gain)).collect())
}

fn judged_domains(table: &FeatureTable, groups: GroupSet, gains: &BTreeMap<String, u32>) -> Result<Vec<JudgedDomain>> {
    let m = table.select(groups)?;
    let mut out = Vec::new();
    let mut unjudged = 0;
    for (id, row) in m.ids.into_iter().zip(m.rows) {
        match gains.get(&id) {
            Some(&g) => out.push(JudgedDomain::new(id, g, row)?),
            None => unjudged += 1,
        }
    }
    if unjudged > 0 {
        log::warn!("{unjudged} domains have features but no gain; left out");
    }
    Ok(out)
}

fn train_config(args: &TrainingArgs, file: &FileConfig) -> Result<(Scheme, TrainConfig)> {
    let d = TrainConfig::default();
    let scheme = match (&args.scheme, &file.scheme) {
        (Some(s), _) => *s,
        (None, Some(s)) => Scheme::parse(s)?,
        (None, None) => Scheme::Listwise,
    };
    let cfg = TrainConfig {
        learning_rate: pick(args.learning_rate, file.learning_rate, d.learning_rate),
        max_epochs: pick(args.max_epochs, file.max_epochs, d.max_epochs),
        patience: pick(args.patience, file.patience, d.patience),
        min_delta: pick(args.min_delta, file.min_delta, d.min_delta),
        dropout: pick(args.dropout, file.dropout, d.dropout),
        seed: pick(args.seed, file.seed, d.seed),
        listnet_gain_scale: pick(None, file.listnet_gain_scale, d.listnet_gain_scale),
        ..d
    };
    cfg.validate()?;
    Ok((scheme, cfg))
}

fn record_train_config(m: &mut RunManifest, scheme: Scheme, cfg: &TrainConfig) {
    m.seed = Some(cfg.seed);
    let c = &mut m.config;
    c.insert("scheme".into(), scheme.name().into());
    c.insert("learning_rate".into(), fmt_f64(cfg.learning_rate));
    c.insert("max_epochs".into(), cfg.max_epochs.to_string());
    c.insert("patience".into(), cfg.patience.to_string());
    c.insert("min_delta".into(), fmt_f64(cfg.min_delta));
    c.insert("dropout".into(), fmt_f64(cfg.dropout));
    c.insert("listnet_gain_scale".into(), fmt_f64(cfg.listnet_gain_scale));
    c.insert("hidden".into(), format!("{}x{}", cfg.hidden[0], cfg.hidden[1]));
}

fn groups_of(cli: Option<GroupSet>, file: &FileConfig) -> Result<GroupSet> {
    match (cli, &file.groups) {
        (Some(g), _) => Ok(g),
        (None, Some(s)) => Ok(GroupSet::parse(s)?),
        (None, None) => Ok(GroupSet::all()),
    }
}

fn k_list_of(cli: Option<KList>, file: &FileConfig) -> Vec<usize> {
    cli.map(|k| k.0).or_else(|| file.k_list.clone()).unwrap_or_else(|| DEFAULT_K_LIST.to_vec())
}

fn algorithm(name: &str, p: &AlgoArgs, file: &FileConfig) -> Result<LinkAlgorithm> {
    let alpha = p.alpha.or(file.alpha);
    let beta = p.beta.or(file.beta);
    let max_iter = p.max_iter.or(file.max_iter);
    Ok(match name {
        "pagerank" => {
            let d = PageRankConfig::default();
            LinkAlgorithm::PageRank(PageRankConfig {
                alpha: alpha.unwrap_or(d.alpha),
                max_iter: max_iter.unwrap_or(d.max_iter),
                ..d
            })
        }
        "hits" => {
            let d = HitsConfig::default();
            LinkAlgorithm::Hits(HitsConfig { max_iter: max_iter.unwrap_or(d.max_iter), ..d })
        }
        "katz" => {
            let d = KatzConfig::default();
            LinkAlgorithm::Katz(KatzConfig {
                alpha: alpha.unwrap_or(d.alpha),
                beta: beta.unwrap_or(d.beta),
                max_iter: max_iter.unwrap_or(d.max_iter),
                ..d
            })
        }
        "torank" => {
            let d = ToRankConfig::default();
            LinkAlgorithm::ToRank(ToRankConfig { alpha: alpha.unwrap_or(d.alpha), beta: beta.unwrap_or(d.beta) })
        }
        other => return Err(Error::Invalid(format!("unknown algorithm `{other}`"))),
    })
}

fn cmd_synth(a: &SynthArgs, file: &FileConfig) -> Result<()> {
    let cfg = SynthConfig {
        n_domains: a.n_domains,
        seed: pick(a.seed, file.seed, 0),
        sigma: a.sigma,
        link_density: a.link_density,
        feature_noise: a.feature_noise,
        ..SynthConfig::default()
    };
    let out = generate(&cfg, &a.out)?;
    let mut m = RunManifest::new("synth");
    m.seed = Some(cfg.seed);
    m.config.insert("n_domains".into(), cfg.n_domains.to_string());
    m.config.insert("sigma".into(), fmt_f64(cfg.sigma));
    m.config.insert("link_density".into(), fmt_f64(cfg.link_density));
    m.config.insert("feature_noise".into(), fmt_f64(cfg.feature_noise));
    m.config.insert("scrape_time".into(), cfg.scrape_time.to_rfc3339());
    for (k, p) in [
        ("corpus", &out.corpus),
        ("annotations", &out.annotations),
        ("planted", &out.planted),
        ("planted_edges", &out.planted_edges),
        ("gazetteer", &out.gazetteer),
        ("lexicon", &out.lexicon),
        ("visual", &out.visual),
        ("questionnaire", &out.questionnaire),
    ] {
        m.outputs.insert(k.into(), path_str(p));
    }
    write_manifest(&a.out.join("manifest.json"), &m)
}

fn cmd_ingest(a: &IngestArgs) -> Result<()> {
    let corpus = load_corpus(&a.corpus)?;
    let graph = derive_link_graph(&corpus);
    eprintln!("link graph: {} nodes, {} edges", graph.node_count(), graph.edge_count());
    let Some(out) = &a.out else { return Ok(()) };
    let mut domains = String::from("domain_id,address,pages,visible_chars,hyperlinks\n");
    for d in &corpus.domains {
        let chars: usize = d.pages.iter().map(|p| p.visible_text.chars().count()).sum();
        let links: usize = d.pages.iter().map(|p| p.hyperlinks.len()).sum();
        domains.push_str(&format!("{},{},{},{chars},{links}\n", d.domain_id, d.address, d.pages.len()));
    }
    write_text(&out.join("domains.csv"), &domains)?;
    write_text(&out.join("edges.tsv"), &edge_list(&graph))?;
    let mut m = RunManifest::new("ingest");
    m.inputs.insert("corpus".into(), path_str(&a.corpus));
    m.outputs.insert("domains".into(), path_str(&out.join("domains.csv")));
    m.outputs.insert("edges".into(), path_str(&out.join("edges.tsv")));
    write_manifest(&out.join("manifest.json"), &m)
}

fn cmd_features(a: &FeaturesArgs, file: &FileConfig) -> Result<()> {
    let mut m = RunManifest::new("features");
    let cfg = feature_config(&a.corpus, file)?;
    record_feature_config(&mut m, &a.corpus, &cfg);
    let groups = groups_of(a.groups, file)?;
    m.config.insert("groups".into(), groups.to_string());
    let (table, _) = compute_table(&a.corpus, &cfg)?;
    write_text(&a.out, &feature_csv(&table.select(groups)?))?;
    m.outputs.insert("features".into(), path_str(&a.out));
    write_manifest(&sibling(&a.out, "manifest.json"), &m)
}

fn cmd_train(a: &TrainArgs, file: &FileConfig) -> Result<()> {
    let mut m = RunManifest::new("train");
    let (scheme, cfg) = train_config(&a.training, file)?;
    record_train_config(&mut m, scheme, &cfg);
    let groups = groups_of(a.groups, file)?;
    m.config.insert("groups".into(), groups.to_string());
    let (table, _) = feature_source(&a.features, &a.corpus, file, &mut m)?;
    m.inputs.insert("annotations".into(), path_str(&a.annotations));
    let judged = judged_domains(&table, groups, &load_gains(&a.annotations)?)?;

    // one fold validates, the other four train
    let plan = FoldPlan::new(judged.iter().map(|d| d.domain_id.clone()), cfg.seed)?;
    let validation_fold = plan.roles(0).validation_fold;
    let (val_raw, train_raw): (Vec<_>, Vec<_>) =
        judged.into_iter().partition(|d| plan.fold_of(&d.domain_id) == Some(validation_fold));
    let rows: Vec<Vec<f64>> = train_raw.iter().map(|d| d.features.clone()).collect();
    let stats = StandardizationStats::fit(&rows, groups.width());
    let standardize = |set: Vec<JudgedDomain>| -> Result<Vec<JudgedDomain>> {
        set.into_iter()
            .map(|d| Ok(JudgedDomain::new(d.domain_id.clone(), d.gain(), stats.apply_row(&d.features)?)?))
            .collect()
    };
    let (tr, va) = (standardize(train_raw)?, standardize(val_raw)?);
    let (mut params, history) = train(scheme, &tr, &va, &cfg)?;
    params.stats = Some(stats);
    eprintln!(
        "trained {} epochs; best validation NDCG@{} = {:.4} at epoch {}",
        history.epochs.len(),
        cfg.eval_k,
        history.best_val_ndcg,
        history.best_epoch
    );
    let model = SavedModel { params, columns: groups.column_names().iter().map(|s| s.to_string()).collect() };
    write_text(&a.out, &model_json(&model))?;
    let history_path = a.history.clone().unwrap_or_else(|| sibling(&a.out, "history.csv"));
    write_text(&history_path, &history_csv(&history.epochs))?;
    m.outputs.insert("model".into(), path_str(&a.out));
    m.outputs.insert("history".into(), path_str(&history_path));
    write_manifest(&sibling(&a.out, "manifest.json"), &m)
}

fn rank_with(model: &SavedModel, table: &FeatureTable) -> Result<Vec<onionrank_core::ltr::RankedDomain>> {
    let idx = model
        .columns
        .iter()
        .map(|c| {
            table
                .columns
                .iter()
                .position(|t| t == c)
                .ok_or_else(|| Error::Invalid(format!("features lack model column `{c}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    let params: &ModelParams = &model.params;
    let rows = table
        .rows
        .iter()
        .map(|r| {
            let raw: Vec<f64> = idx.iter().map(|&i| r[i]).collect();
            match &params.stats {
                Some(s) => Ok(s.apply_row(&raw)?),
                None => Ok(raw),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(predict_rank(&params.network, table.ids.iter().map(String::as_str).zip(rows.iter().map(Vec::as_slice)))?)
}

fn cmd_rank(a: &RankArgs, file: &FileConfig) -> Result<()> {
    let mut m = RunManifest::new("rank");
    let model = read_model(&a.model)?;
    m.inputs.insert("model".into(), path_str(&a.model));
    m.seed = Some(model.params.seed);
    let (table, _) = feature_source(&a.features, &a.corpus, file, &mut m)?;
    write_text(&a.out, &ranked_domains_csv(&rank_with(&model, &table)?))?;
    m.outputs.insert("ranking".into(), path_str(&a.out));
    write_manifest(&sibling(&a.out, "manifest.json"), &m)
}

fn cmd_eval(a: &EvalArgs, file: &FileConfig) -> Result<()> {
    let order = read_ranking_csv(&a.ranking)?;
    let gains = load_gains(&a.annotations)?;
    let truth: BTreeMap<String, f64> = gains.iter().map(|(k, &v)| (k.clone(), v as f64)).collect();
    let judged: Vec<&String> = order.iter().filter(|id| truth.contains_key(*id)).collect();
    if judged.len() < order.len() {
        log::warn!("{} ranked domains have no gain; left out", order.len() - judged.len());
    }
    let mut ks = k_list_of(a.k_list.clone(), file);
    ks.sort_unstable();
    ks.dedup();
    let mut out = String::from("K,ndcg,degenerate\n");
    for k in ks {
        let n = ndcg_at_k(&judged, &truth, k)?;
        out.push_str(&format!("{k},{},{}\n", fmt_f64(n.value), n.degenerate));
    }
    match &a.out {
        Some(p) => {
            write_text(p, &out)?;
            let mut m = RunManifest::new("eval");
            m.inputs.insert("ranking".into(), path_str(&a.ranking));
            m.inputs.insert("annotations".into(), path_str(&a.annotations));
            m.outputs.insert("ndcg".into(), path_str(p));
            write_manifest(&sibling(p, "manifest.json"), &m)
        }
        None => std::io::stdout().write_all(out.as_bytes()).map_err(|e| Error::io(Path::new("<stdout>"), e)),
    }
}

fn graph_from(corpus: &Option<PathBuf>, edges: &Option<PathBuf>, nodes: &[String]) -> Result<Option<DiGraph>> {
    match (edges, corpus) {
        (Some(e), _) => Ok(Some(read_edge_list(e, nodes)?)),
        (None, Some(c)) => Ok(Some(derive_link_graph(&load_corpus(c)?))),
        (None, None) => Ok(None),
    }
}

fn cmd_baseline(a: &BaselineArgs, file: &FileConfig) -> Result<()> {
    let algo = algorithm(&a.algo, &a.params, file)?;
    let graph = graph_from(&a.corpus, &a.edges, &[])?
        .ok_or_else(|| Error::Invalid("baseline needs --corpus or --edges".into()))?;
    let ranking = algo.rank(&graph)?;
    write_text(&a.out, &graph_ranking_csv(&graph, &ranking))?;
    let mut m = RunManifest::new("baseline");
    m.config.insert("algo".into(), format!("{algo:?}"));
    for (k, v) in [("corpus", &a.corpus), ("edges", &a.edges)] {
        if let Some(p) = v {
            m.inputs.insert(k.into(), path_str(p));
        }
    }
    m.outputs.insert("ranking".into(), path_str(&a.out));
    write_manifest(&sibling(&a.out, "manifest.json"), &m)
}

fn cmd_cv(a: &CvArgs, file: &FileConfig) -> Result<()> {
    let mut m = RunManifest::new("cv");
    let (scheme, cfg) = train_config(&a.training, file)?;
    record_train_config(&mut m, scheme, &cfg);
    let groups = groups_of(a.groups, file)?;
    let ks = k_list_of(a.k_list.clone(), file);
    m.config.insert("groups".into(), groups.to_string());
    m.config.insert("k_list".into(), ks.iter().map(usize::to_string).collect::<Vec<_>>().join(","));
    let (table, corpus) = feature_source(&a.features, &a.corpus, file, &mut m)?;
    m.inputs.insert("annotations".into(), path_str(&a.annotations));
    let judged = judged_domains(&table, groups, &load_gains(&a.annotations)?)?;
    eprintln!("cv: {} judged domains, {} features, scheme {}", judged.len(), groups.width(), scheme);

    let outcome = cross_validate(&judged, scheme, &cfg, &ks, cfg.seed)?;
    let mut curves: Vec<MethodCurve> = vec![outcome.method.clone()];
    let mut notes = outcome.notes.clone();

    let graph = match (&corpus, &a.edges) {
        (_, Some(e)) => {
            m.inputs.insert("edges".into(), path_str(e));
            Some(read_edge_list(e, &table.ids)?)
        }
        (Some(c), None) => Some(derive_link_graph(c)),
        (None, None) => graph_from(&a.corpus.corpus, &None, &table.ids)?,
    };
    match graph {
        Some(g) => {
            let (base, base_notes) = compare_baselines(&judged, &g, &outcome.plan, &LinkAlgorithm::defaults(), &ks)?;
            curves.extend(base);
            notes.extend(base_notes);
        }
        None => {
            let msg = "no --edges or --corpus given; link baselines skipped".to_string();
            log::warn!("{msg}");
            notes.push(msg);
        }
    }
    for f in &outcome.folds {
        notes.push(format!(
            "fold {}: {} test domains, best validation NDCG@{} {:.6} at epoch {} of {}",
            f.iteration,
            f.test_ids.len(),
            cfg.eval_k,
            f.history.best_val_ndcg,
            f.history.best_epoch,
            f.history.epochs.len()
        ));
    }
    notes.push("per-fold NDCG aggregated by arithmetic mean".into());

    let report = a.out.join("report.csv");
    let summary = a.out.join("summary.csv");
    let notes_path = a.out.join("notes.txt");
    write_text(&report, &report_csv(&curves))?;
    write_text(&summary, &summary_csv(&curves))?;
    write_text(&notes_path, &(notes.join("\n") + "\n"))?;
    for c in &curves {
        if let Some(p) = c.curve.at(10).or(c.curve.points.last()) {
            eprintln!("{:>8} NDCG@{:<2} {:.4}", c.method, p.k, p.mean);
        }
    }
    m.outputs.insert("report".into(), path_str(&report));
    m.outputs.insert("summary".into(), path_str(&summary));
    m.outputs.insert("notes".into(), path_str(&notes_path));
    write_manifest(&a.out.join("manifest.json"), &m)
}

fn cmd_annotate(c: &AnnotateCommand, file: &FileConfig) -> Result<()> {
    match c {
        AnnotateCommand::Plan(a) => {
            let corpus = load_corpus(&a.corpus)?;
            let ids: Vec<String> = corpus.ids().map(str::to_string).collect();
            let seed = pick(a.seed, file.seed, 0);
            let plan = assignment_plan(&ids, &a.annotators, a.per_domain, a.batch_size, seed)?;
            write_text(&a.out, &plan_csv(&plan))?;
            eprintln!("plan: {} domains, {} assignments", ids.len(), plan.total_assignments());
            let mut m = RunManifest::new("annotate plan");
            m.seed = Some(seed);
            m.config.insert("annotators".into(), a.annotators.join(","));
            m.config.insert("per_domain".into(), a.per_domain.to_string());
            m.config.insert("batch_size".into(), a.batch_size.to_string());
            m.inputs.insert("corpus".into(), path_str(&a.corpus));
            m.outputs.insert("plan".into(), path_str(&a.out));
            write_manifest(&sibling(&a.out, "manifest.json"), &m)
        }
        AnnotateCommand::Run(a) => {
            let corpus = load_corpus(&a.corpus)?;
            let batch = read_batch(&a.plan, &a.annotator, a.batch)?;
            let stdin = std::io::stdin();
            let s = run_session(&corpus, &a.annotator, &batch, &a.out, stdin.lock(), std::io::stdout())?;
            eprintln!(
                "\n{} domains answered, {} already done{}",
                s.completed,
                s.already_done,
                if s.interrupted { "; session interrupted, rerun to resume" } else { "" }
            );
            Ok(())
        }
        AnnotateCommand::Merge(a) => {
            let mut records = Vec::new();
            for p in &a.annotations {
                records.extend(read_annotations(p)?);
            }
            let merged = merge_annotations(&records)?;
            for (d, n) in &merged.incomplete {
                eprintln!("domain {d}: {n} records, needs {JUDGES_PER_DOMAIN}; not merged");
            }
            write_text(&a.out, &gains_csv(&merged.truths))?;
            let mut m = RunManifest::new("annotate merge");
            for (i, p) in a.annotations.iter().enumerate() {
                m.inputs.insert(format!("annotations.{i}"), path_str(p));
            }
            m.outputs.insert("gains".into(), path_str(&a.out));
            write_manifest(&sibling(&a.out, "manifest.json"), &m)
        }
        AnnotateCommand::Questionnaire { out } => write_text(out, &questionnaire_text()),
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let file = FileConfig::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Synth(a) => cmd_synth(a, &file),
        Command::Ingest(a) => cmd_ingest(a),
        Command::Features(a) => cmd_features(a, &file),
        Command::Train(a) => cmd_train(a, &file),
        Command::Rank(a) => cmd_rank(a, &file),
        Command::Eval(a) => cmd_eval(a, &file),
        Command::Baseline(a) => cmd_baseline(a, &file),
        Command::Cv(a) => cmd_cv(a, &file),
        Command::Annotate(c) => cmd_annotate(c, &file),
    }
}

/// Parses `args`, runs the command and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
