//! Terminal annotation sessions and assignment-plan files.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};
use std::path::Path;

use onionrank_core::groundtruth::{AnnotationRecord, AssignmentPlan, N_QUESTIONS, QUESTIONS};
use serde::Deserialize;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::formats::{append_annotation, read_annotations};

const SUMMARY_CHARS: usize = 600;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SessionSummary {
    pub completed: usize,
    pub already_done: usize,
    pub interrupted: bool,
}

/// `annotator_id,batch,domain_id` rows, annotators and batches in order.
pub fn plan_csv(plan: &AssignmentPlan) -> String {
    let mut s = String::from("annotator_id,batch,domain_id\n");
    for (annotator, batches) in plan.annotators() {
        for (b, batch) in batches.iter().enumerate() {
            for d in batch {
                s.push_str(&format!("{annotator},{b},{d}\n"));
            }
        }
    }
    s
}

/// Domains of one annotator's batch, in plan order.
pub fn read_batch(path: &Path, annotator: &str, batch: usize) -> Result<Vec<String>> {
    #[derive(Deserialize)]
    struct Row {
        annotator_id: String,
        batch: usize,
        domain_id: String,
    }
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for row in csv::Reader::from_reader(file).deserialize::<Row>() {
        let row = row?;
        if row.annotator_id == annotator && row.batch == batch {
            out.push(row.domain_id);
        }
    }
    if out.is_empty() {
        return Err(Error::Invalid(format!("plan has no batch {batch} for annotator `{annotator}`")));
    }
    Ok(out)
}

enum Answer {
    Yes,
    No,
    Eof,
}

fn ask<R: BufRead, W: Write>(input: &mut R, output: &mut W, prompt: &str) -> std::io::Result<Answer> {
    loop {
        write!(output, "{prompt} [y/n] ")?;
        output.flush()?;
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            return Ok(Answer::Eof);
        }
        match line.trim().to_ascii_lowercase().as_str() {
            "y" | "yes" => return Ok(Answer::Yes),
            "n" | "no" => return Ok(Answer::No),
            _ => writeln!(output, "please answer y or n")?,
        }
    }
}

/// Prompts the questionnaire for every domain of `batch` that `annotator`
/// has not yet answered in `out_path`. Each finished domain is appended
/// immediately; end of input stops the session without writing the domain
/// in progress.
pub fn run_session<R: BufRead, W: Write>(
    corpus: &Corpus,
    annotator: &str,
    batch: &[String],
    out_path: &Path,
    mut input: R,
    mut output: W,
) -> Result<SessionSummary> {
    let done: BTreeSet<String> = read_annotations(out_path)?
        .into_iter()
        .filter(|r| r.annotator_id == annotator)
        .map(|r| r.domain_id)
        .collect();
    let mut summary = SessionSummary::default();
    let io = |e| Error::io(Path::new("<terminal>"), e);
    for (pos, domain_id) in batch.iter().enumerate() {
        if done.contains(domain_id) {
            summary.already_done += 1;
            continue;
        }
        let domain = corpus
            .get(domain_id)
            .ok_or_else(|| Error::Invalid(format!("domain `{domain_id}` is not in the corpus")))?;
        let text: String = domain.text(false).chars().take(SUMMARY_CHARS).collect();
        writeln!(output, "\n== [{}/{}] {} ({})\n{text}\n", pos + 1, batch.len(), domain_id, domain.address)
            .map_err(io)?;
        let mut answers = Vec::with_capacity(N_QUESTIONS);
        for (q, question) in QUESTIONS.iter().enumerate() {
            match ask(&mut input, &mut output, &format!("Q{:02} {question}", q + 1)).map_err(io)? {
                Answer::Yes => answers.push(true),
                Answer::No => answers.push(false),
                Answer::Eof => {
                    summary.interrupted = true;
                    return Ok(summary);
                }
            }
        }
        append_annotation(out_path, &AnnotationRecord::new(domain_id.clone(), annotator, &answers)?)?;
        summary.completed += 1;
    }
    Ok(summary)
}
