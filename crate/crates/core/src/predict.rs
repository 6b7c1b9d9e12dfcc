//! Constrained prediction and accuracy aggregation.
//!
//! The classifier always emits `n_model` logits; a task with `n_l` classes
//! only looks at the first `n_l`, so the prediction is a valid class index.

use std::fmt;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogitsRecord {
    pub sample_id: String,
    pub logits: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_label: Option<usize>,
}

/// Argmax over `logits[..n_l]`; ties go to the lowest index.
pub fn constrained_predict(logits: &[f64], n_l: usize) -> Result<usize> {
    if n_l == 0 || n_l > logits.len() {
        return Err(Error::ClassCountOutOfRange { n_l, len: logits.len() });
    }
    let mut best = 0;
    for (i, &x) in logits[..n_l].iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::NonFiniteLogit(i));
        }
        if x > logits[best] {
            best = i;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassAccuracy {
    pub class: usize,
    pub n_examples: usize,
    pub correct: usize,
    /// `None` when the class has no gold examples.
    pub accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub task: String,
    pub n_examples: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub per_class_accuracy: Vec<ClassAccuracy>,
}

/// Running counts; merging two tallies is associative.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tally {
    per_class: Vec<(usize, usize)>,
}

impl Tally {
    pub fn new(n_l: usize) -> Self {
        Self { per_class: vec![(0, 0); n_l] }
    }

    pub fn add(&mut self, gold: usize, predicted: usize) {
        let slot = &mut self.per_class[gold];
        slot.0 += 1;
        slot.1 += usize::from(gold == predicted);
    }

    pub fn merge(mut self, other: &Tally) -> Tally {
        for (a, b) in self.per_class.iter_mut().zip(&other.per_class) {
            a.0 += b.0;
            a.1 += b.1;
        }
        self
    }

    pub fn into_report(self, task: impl Into<String>) -> Result<EvalReport> {
        let n_examples: usize = self.per_class.iter().map(|c| c.0).sum();
        if n_examples == 0 {
            return Err(Error::EmptyEval);
        }
        let correct: usize = self.per_class.iter().map(|c| c.1).sum();
        let per_class_accuracy = self
            .per_class
            .iter()
            .enumerate()
            .map(|(class, &(n, c))| ClassAccuracy {
                class,
                n_examples: n,
                correct: c,
                accuracy: (n > 0).then(|| c as f64 / n as f64),
            })
            .collect();
        Ok(EvalReport {
            task: task.into(),
            n_examples,
            correct,
            accuracy: correct as f64 / n_examples as f64,
            per_class_accuracy,
        })
    }
}

pub fn evaluate<I>(records: I, n_l: usize, task: &str) -> Result<EvalReport>
where
    I: IntoIterator<Item = Result<LogitsRecord>>,
{
    let mut tally = Tally::new(n_l);
    for rec in records {
        let rec = rec?;
        let gold = rec.gold_label.ok_or_else(|| Error::MissingGold(rec.sample_id.clone()))?;
        if gold >= n_l {
            return Err(Error::GoldOutOfRange { sample_id: rec.sample_id, gold, n_l });
        }
        tally.add(gold, constrained_predict(&rec.logits, n_l)?);
    }
    tally.into_report(task)
}

/// Parses a line-delimited logits file. Blank lines are skipped.
pub fn read_logits<R: BufRead>(reader: R) -> impl Iterator<Item = Result<LogitsRecord>> {
    reader.lines().enumerate().filter_map(|(i, line)| match line {
        Err(e) => Some(Err(Error::Io(e))),
        Ok(l) if l.trim().is_empty() => None,
        Ok(l) => Some(serde_json::from_str(&l).map_err(|e| Error::Record { line: i + 1, message: e.to_string() })),
    })
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "task: {}", self.task)?;
        writeln!(f, "examples: {}  correct: {}  accuracy: {:.4}", self.n_examples, self.correct, self.accuracy)?;
        writeln!(f, "{:>6} {:>10} {:>10} {:>10}", "class", "examples", "correct", "accuracy")?;
        for c in &self.per_class_accuracy {
            let acc = c.accuracy.map_or_else(|| "-".to_string(), |a| format!("{a:.4}"));
            writeln!(f, "{:>6} {:>10} {:>10} {:>10}", c.class, c.n_examples, c.correct, acc)?;
        }
        Ok(())
    }
}
