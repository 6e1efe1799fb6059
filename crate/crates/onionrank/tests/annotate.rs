use std::io::Cursor;

use onionrank::annotate::run_session;
use onionrank::corpus::ingest_corpus;
use onionrank::formats::read_annotations;
use onionrank::synth::{generate, SynthConfig};
use onionrank_core::groundtruth::N_QUESTIONS;

fn answers(line: &str, domains: usize) -> String {
    format!("{line}\n").repeat(N_QUESTIONS * domains)
}

#[test]
fn session_appends_and_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let out = generate(&SynthConfig { n_domains: 12, seed: 1, ..SynthConfig::default() }, dir.path()).unwrap();
    let (corpus, _) = ingest_corpus(&out.corpus).unwrap();
    let batch: Vec<String> = corpus.ids().take(3).map(str::to_string).collect();
    let file = dir.path().join("ann.ndjson");

    // first domain fully answered, second cut off after five questions
    let input = answers("y", 1) + &"n\n".repeat(5);
    let mut transcript = Vec::new();
    let s = run_session(&corpus, "ann1", &batch, &file, Cursor::new(input), &mut transcript).unwrap();
    assert_eq!((s.completed, s.already_done, s.interrupted), (1, 0, true));
    let text = String::from_utf8(transcript).unwrap();
    assert!(text.contains("Q01") && text.contains("Q23"));
    let records = read_annotations(&file).unwrap();
    assert_eq!(records.len(), 1);
    assert!(records[0].answers.iter().all(|&a| a));

    // garbage lines are re-asked, not recorded
    let input = format!("maybe\n{}", answers("NO", 2));
    let s = run_session(&corpus, "ann1", &batch, &file, Cursor::new(input), Vec::new()).unwrap();
    assert_eq!((s.completed, s.already_done, s.interrupted), (2, 1, false));
    let records = read_annotations(&file).unwrap();
    assert_eq!(records.len(), 3);
    assert_eq!(records.iter().map(|r| r.domain_id.as_str()).collect::<Vec<_>>(), batch);
    assert!(records[1..].iter().all(|r| r.answers.iter().all(|&a| !a)));

    // a second annotator starts from scratch on the same file
    let s = run_session(&corpus, "ann2", &batch, &file, Cursor::new(answers("yes", 3)), Vec::new()).unwrap();
    assert_eq!((s.completed, s.already_done), (3, 0));
    assert_eq!(read_annotations(&file).unwrap().len(), 6);
}

#[test]
fn unknown_domain_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = generate(&SynthConfig { n_domains: 10, seed: 2, ..SynthConfig::default() }, dir.path()).unwrap();
    let (corpus, _) = ingest_corpus(&out.corpus).unwrap();
    let file = dir.path().join("ann.ndjson");
    let batch = vec!["nope".to_string()];
    assert!(run_session(&corpus, "a", &batch, &file, Cursor::new(answers("y", 1)), Vec::new()).is_err());
}
