//! Sentence segmentation, paragraph filtering and exact deduplication.
//!
//! The segmenter is rule based. A sentence ends at a run of `.`, `!` or `?`
//! (plus any closing quotes or brackets) that is followed by whitespace,
//! unless one of these holds:
//!
//! * the next word starts with a lowercase letter;
//! * the terminator is a single `.` closing a known abbreviation
//!   ([`ABBREVIATIONS`]) or a one-letter initial such as `J.`.
//!
//! Known limitation: an abbreviation that really does end a sentence
//! (`... and so on, etc. The next`) is not split.

use std::fmt;

use dashmap::DashSet;

use crate::ingest::Article;
use crate::par::{self, Workers};
use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;
use xxhash_rust::xxh3::xxh3_64;

/// Lowercased abbreviations that never end a sentence.
pub const ABBREVIATIONS: &[&str] = &[
    "mr.", "mrs.", "dr.", "prof.", "st.", "vs.", "etc.", "e.g.", "i.e.", "u.s.", "jr.", "sr.",
    "no.", "fig.", "al.",
];

const TERMINATORS: [char; 3] = ['.', '!', '?'];
const CLOSERS: [char; 9] = ['"', '\'', '\u{201d}', '\u{2019}', ')', ']', '}', '\u{bb}', '\u{203a}'];
const OPENERS: [char; 7] = ['"', '\'', '\u{201c}', '\u{2018}', '(', '[', '\u{ab}'];

/// Collapses every whitespace run to one space and trims the ends.
pub fn normalize_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for word in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

pub fn split_sentences(text: &str) -> Vec<String> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let n = chars.len();
    let mut sentences = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;

    while i < n {
        if !TERMINATORS.contains(&chars[i].1) {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < n && TERMINATORS.contains(&chars[j + 1].1) {
            j += 1;
        }
        let single_period = j == i && chars[i].1 == '.';
        while j + 1 < n && CLOSERS.contains(&chars[j + 1].1) {
            j += 1;
        }
        if j + 1 < n && chars[j + 1].1.is_whitespace() {
            let next = chars[j + 1..].iter().find(|(_, c)| !c.is_whitespace());
            let end = chars[j + 1].0;
            if let Some(&(next_at, next_char)) = next {
                let word_before = last_word(&text[start..end]);
                let blocked = next_char.is_lowercase()
                    || (single_period && is_abbreviation(word_before));
                if !blocked {
                    push_trimmed(&mut sentences, &text[start..end]);
                    start = next_at;
                }
            }
        }
        i = j + 1;
    }
    if start < text.len() {
        push_trimmed(&mut sentences, &text[start..]);
    }
    sentences
}

fn push_trimmed(out: &mut Vec<String>, span: &str) {
    let s = span.trim();
    if !s.is_empty() {
        out.push(s.to_string());
    }
}

fn last_word(span: &str) -> &str {
    let span = span.trim_end();
    let word = span.rsplit(char::is_whitespace).next().unwrap_or(span);
    word.trim_start_matches(|c| OPENERS.contains(&c))
}

fn is_abbreviation(word: &str) -> bool {
    let lower = word.to_lowercase();
    if ABBREVIATIONS.contains(&lower.as_str()) {
        return true;
    }
    // Single-letter initial: "J."
    let mut it = word.chars();
    matches!((it.next(), it.next(), it.next()), (Some(c), Some('.'), None) if c.is_uppercase())
}

/// Stable 64-bit key of a paragraph: NFC, lowercase, collapsed whitespace,
/// then XXH3.
pub fn dedup_key(text: &str) -> u64 {
    let nfc: String = text.nfc().collect();
    let folded = normalize_whitespace(&nfc.to_lowercase());
    xxh3_64(folded.as_bytes())
}

/// A segmented paragraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParagraphRecord {
    pub article_id: String,
    pub paragraph_index: usize,
    pub sentences: Vec<String>,
    pub category: Option<String>,
}

impl ParagraphRecord {
    /// Normalizes whitespace in `raw` and segments it.
    pub fn from_raw(
        article_id: impl Into<String>,
        paragraph_index: usize,
        category: Option<String>,
        raw: &str,
    ) -> Self {
        Self {
            article_id: article_id.into(),
            paragraph_index,
            sentences: split_sentences(&normalize_whitespace(raw)),
            category,
        }
    }

    /// The normalized paragraph text.
    pub fn text(&self) -> String {
        self.sentences.join(" ")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterReason {
    Kept,
    SingleSentence,
    ShortFirst,
    NonAlphabeticFirst,
    Duplicate,
}

impl FilterReason {
    pub const ALL: [FilterReason; 5] = [
        FilterReason::Kept,
        FilterReason::SingleSentence,
        FilterReason::ShortFirst,
        FilterReason::NonAlphabeticFirst,
        FilterReason::Duplicate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FilterReason::Kept => "kept",
            FilterReason::SingleSentence => "single_sentence",
            FilterReason::ShortFirst => "short_first",
            FilterReason::NonAlphabeticFirst => "non_alphabetic_first",
            FilterReason::Duplicate => "duplicate",
        }
    }
}

impl fmt::Display for FilterReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterVerdict {
    pub kept: bool,
    pub reason: FilterReason,
}

impl FilterVerdict {
    pub fn from_reason(reason: FilterReason) -> Self {
        Self { kept: reason == FilterReason::Kept, reason }
    }
}

/// Set of paragraph keys already kept in this run.
#[derive(Debug, Default)]
pub struct DedupIndex {
    keys: DashSet<u64>,
}

impl DedupIndex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `true` when this call registered the key. Exactly one of any
    /// set of concurrent callers with the same key gets `true`.
    pub fn insert_if_absent(&self, key: u64) -> bool {
        self.keys.insert(key)
    }

    pub fn contains(&self, key: u64) -> bool {
        self.keys.contains(&key)
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

/// Rejections that depend only on the paragraph itself, in check order.
/// Paragraphs with no sentences count as single-sentence.
pub fn structural_rejection(rec: &ParagraphRecord) -> Option<FilterReason> {
    if rec.sentences.len() < 2 {
        return Some(FilterReason::SingleSentence);
    }
    let first = rec.sentences[0].trim();
    if first.chars().count() <= 3 {
        return Some(FilterReason::ShortFirst);
    }
    if !first.chars().any(char::is_alphabetic) {
        return Some(FilterReason::NonAlphabeticFirst);
    }
    None
}

/// Full filter: structural checks, then the duplicate check. A kept
/// paragraph is registered in `dedup`.
pub fn filter_paragraph(rec: &ParagraphRecord, dedup: &DedupIndex) -> FilterVerdict {
    filter_with_key(rec, dedup_key(&rec.text()), dedup)
}

/// [`filter_paragraph`] with a precomputed [`dedup_key`] of the paragraph text.
pub fn filter_with_key(rec: &ParagraphRecord, key: u64, dedup: &DedupIndex) -> FilterVerdict {
    if let Some(reason) = structural_rejection(rec) {
        return FilterVerdict::from_reason(reason);
    }
    if dedup.insert_if_absent(key) {
        FilterVerdict::from_reason(FilterReason::Kept)
    } else {
        FilterVerdict::from_reason(FilterReason::Duplicate)
    }
}

/// Per-reason counts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterReport {
    pub kept: usize,
    pub single_sentence: usize,
    pub short_first: usize,
    pub non_alphabetic_first: usize,
    pub duplicate: usize,
}

impl FilterReport {
    pub fn record(&mut self, reason: FilterReason) {
        *self.slot(reason) += 1;
    }

    pub fn count(&self, reason: FilterReason) -> usize {
        match reason {
            FilterReason::Kept => self.kept,
            FilterReason::SingleSentence => self.single_sentence,
            FilterReason::ShortFirst => self.short_first,
            FilterReason::NonAlphabeticFirst => self.non_alphabetic_first,
            FilterReason::Duplicate => self.duplicate,
        }
    }

    fn slot(&mut self, reason: FilterReason) -> &mut usize {
        match reason {
            FilterReason::Kept => &mut self.kept,
            FilterReason::SingleSentence => &mut self.single_sentence,
            FilterReason::ShortFirst => &mut self.short_first,
            FilterReason::NonAlphabeticFirst => &mut self.non_alphabetic_first,
            FilterReason::Duplicate => &mut self.duplicate,
        }
    }

    pub fn total(&self) -> usize {
        FilterReason::ALL.iter().map(|&r| self.count(r)).sum()
    }

    /// One `reason<TAB>count` line per reason.
    pub fn to_text(&self) -> String {
        FilterReason::ALL
            .iter()
            .map(|&r| format!("{}\t{}\n", r, self.count(r)))
            .collect()
    }
}

struct Segmented {
    rec: ParagraphRecord,
    rejection: Option<FilterReason>,
    key: u64,
}

/// Segments, filters and deduplicates all paragraphs, in stream order.
pub fn segment_and_filter(articles: &[Article], workers: Workers) -> (Vec<ParagraphRecord>, FilterReport) {
    let refs: Vec<(usize, usize)> = articles
        .iter()
        .enumerate()
        .flat_map(|(a, art)| (0..art.paragraphs.len()).map(move |p| (a, p)))
        .collect();
    let segmented = par::map_ordered(&refs, workers, |&(a, p)| {
        let art = &articles[a];
        let rec = ParagraphRecord::from_raw(art.article_id.clone(), p, art.category.clone(), &art.paragraphs[p]);
        let rejection = structural_rejection(&rec);
        let key = if rejection.is_none() { dedup_key(&rec.text()) } else { 0 };
        Segmented { rec, rejection, key }
    });

    // First occurrence in stream order wins, whatever the worker count.
    let dedup = DedupIndex::new();
    let mut report = FilterReport::default();
    let mut kept = Vec::new();
    for s in segmented {
        let reason = match s.rejection {
            Some(r) => r,
            None if dedup.insert_if_absent(s.key) => FilterReason::Kept,
            None => FilterReason::Duplicate,
        };
        report.record(reason);
        if reason == FilterReason::Kept {
            kept.push(s.rec);
        }
    }
    (kept, report)
}
