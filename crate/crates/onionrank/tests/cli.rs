use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn onionrank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_onionrank")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let o = onionrank(args);
    assert!(o.status.success(), "{args:?} failed:\n{}", String::from_utf8_lossy(&o.stderr));
    o
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(onionrank(&["--help"]).status.code(), Some(0));
    assert_eq!(onionrank(&["--version"]).status.code(), Some(0));
    assert_eq!(onionrank(&["cv", "--bogus"]).status.code(), Some(1));
    assert_eq!(onionrank(&["eval", "--ranking", "r.csv", "--annotations", "a.csv", "--k-list", "0"]).status.code(), Some(1));
    let o = onionrank(&["ingest", "--corpus", "/definitely/not/here"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn end_to_end_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let synth = d.join("synth");
    ok(&["synth", "--out", s(&synth), "--n-domains", "60", "--seed", "4"]);
    assert!(synth.join("manifest.json").is_file());
    let corpus = synth.join("corpus");
    let ann = synth.join("annotations.ndjson");

    let ing = d.join("ingest");
    let o = ok(&["ingest", "--corpus", s(&corpus), "--out", s(&ing)]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("ingest: 60 domains"));
    assert_eq!(fs::read_to_string(ing.join("edges.tsv")).unwrap(), fs::read_to_string(synth.join("planted_edges.tsv")).unwrap());

    let features = d.join("features.csv");
    ok(&[
        "features", "--corpus", s(&corpus),
        "--gazetteer", s(&synth.join("gazetteer.tsv")),
        "--lexicon", s(&synth.join("lexicon.txt")),
        "--visual", s(&synth.join("visual.ndjson")),
        "--out", s(&features),
    ]);
    let header = fs::read_to_string(&features).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header.split(',').count(), 41);
    assert!(d.join("features.manifest.json").is_file());

    let gains = d.join("gains.csv");
    ok(&["annotate", "merge", "--annotations", s(&ann), "--out", s(&gains)]);
    assert_eq!(fs::read_to_string(&gains).unwrap().lines().count(), 61);

    let model = d.join("model.json");
    ok(&[
        "train", "--features", s(&features), "--annotations", s(&ann),
        "--scheme", "listwise", "--max-epochs", "40", "--out", s(&model),
    ]);
    assert!(d.join("model.history.csv").is_file());
    let ranking = d.join("ranking.csv");
    ok(&["rank", "--model", s(&model), "--features", s(&features), "--out", s(&ranking)]);
    let ranked = fs::read_to_string(&ranking).unwrap();
    assert_eq!(ranked.lines().count(), 61);

    let o = ok(&["eval", "--ranking", s(&ranking), "--annotations", s(&gains), "--k-list", "1,5,10"]);
    let table = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = table.lines().collect();
    assert_eq!(rows[0], "K,ndcg,degenerate");
    assert_eq!(rows.len(), 4);
    for row in &rows[1..] {
        let v: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&v));
    }

    for algo in ["pagerank", "hits", "katz", "torank"] {
        let out = d.join(format!("{algo}.csv"));
        ok(&["baseline", "--edges", s(&ing.join("edges.tsv")), "--algo", algo, "--out", s(&out)]);
        assert!(fs::read_to_string(&out).unwrap().starts_with("node,score,rank\n"));
    }
    assert_eq!(onionrank(&["baseline", "--algo", "pagerank", "--out", s(&d.join("x.csv"))]).status.code(), Some(2));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let synth = d.join("synth");
    ok(&["synth", "--out", s(&synth), "--n-domains", "30", "--seed", "8"]);
    let config = d.join("run.toml");
    fs::write(&config, "seed = 3\nmax_epochs = 5\nk_list = [1, 3]\ngroups = \"text,html\"\n").unwrap();
    let out = d.join("cv");
    ok(&[
        "cv", "--config", s(&config),
        "--corpus", s(&synth.join("corpus")),
        "--gazetteer", s(&synth.join("gazetteer.tsv")),
        "--lexicon", s(&synth.join("lexicon.txt")),
        "--annotations", s(&synth.join("annotations.ndjson")),
        "--out", s(&out),
    ]);
    let manifest = fs::read_to_string(out.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"seed\": 3"));
    assert!(manifest.contains("\"groups\": \"text,html\""));
    assert!(manifest.contains("\"max_epochs\": \"5\""));
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    let ks: Vec<&str> = summary.lines().skip(1).filter(|l| l.starts_with("listnet,")).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(ks, ["1", "3"]);
    for method in ["pagerank", "hits", "katz", "torank"] {
        assert!(summary.contains(&format!("{method},1,")));
    }

    fs::write(&config, "sed = 3\n").unwrap();
    let o = onionrank(&["cv", "--config", s(&config), "--annotations", "x", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn annotate_plan_and_questionnaire() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let synth = d.join("synth");
    ok(&["synth", "--out", s(&synth), "--n-domains", "40", "--seed", "2"]);
    let plan = d.join("plan.csv");
    ok(&["annotate", "plan", "--corpus", s(&synth.join("corpus")), "--annotators", "a,b,c,d", "--seed", "1", "--out", s(&plan)]);
    let text = fs::read_to_string(&plan).unwrap();
    assert_eq!(text.lines().count(), 1 + 40 * 3);
    let q = d.join("q.txt");
    ok(&["annotate", "questionnaire", "--out", s(&q)]);
    assert_eq!(fs::read_to_string(&q).unwrap(), fs::read_to_string(synth.join("questionnaire.txt")).unwrap());
    let o = onionrank(&["annotate", "plan", "--corpus", s(&synth.join("corpus")), "--annotators", "a,b", "--out", s(&plan)]);
    assert_eq!(o.status.code(), Some(2));
}
