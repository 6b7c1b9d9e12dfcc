//! Corpus readers and the cross-corpus balancing step.
//!
//! Two line-delimited JSON layouts are accepted:
//!
//! * article corpora, one article per line:
//!   `{"id": "...", "title": "...", "paragraphs": ["...", "..."]}`
//! * flat corpora, one paragraph-sized record per line:
//!   `{"category": "...", "text": "..."}`
//!
//! Malformed lines surface as [`Error::Record`] items carrying the 1-based
//! line number; the iterator keeps going after them. Only failing to open or
//! read the file is fatal.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::stage_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    ArticleCorpus,
    FlatCorpus,
}

/// An ordered list of paragraphs sharing provenance. Hard negatives are
/// drawn from within one article.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Article {
    pub article_id: String,
    pub source: Source,
    pub category: Option<String>,
    pub paragraphs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestConfig {
    pub max_paragraphs_per_article: usize,
    pub max_samples_per_category: usize,
    /// Articles kept per input corpus by [`interleave`]. `None` keeps all.
    pub per_corpus_quota: Option<usize>,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            max_paragraphs_per_article: 5,
            max_samples_per_category: 500_000,
            per_corpus_quota: None,
        }
    }
}

impl IngestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_paragraphs_per_article == 0 {
            return Err(Error::Config("max_paragraphs_per_article must be >= 1".into()));
        }
        if self.max_samples_per_category == 0 {
            return Err(Error::Config("max_samples_per_category must be >= 1".into()));
        }
        if self.per_corpus_quota == Some(0) {
            return Err(Error::Config("per_corpus_quota must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Deserialize)]
struct ArticleLine {
    id: String,
    #[allow(dead_code)]
    #[serde(default)]
    title: Option<String>,
    paragraphs: Vec<String>,
}

#[derive(Deserialize)]
struct FlatLine {
    category: String,
    text: String,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| Error::Open { path: path.to_path_buf(), source })
}

/// Lines of a reader with 1-based numbers; blank lines are skipped. After an
/// I/O error the iterator yields that error once and stops.
struct NumberedLines<R> {
    lines: std::io::Lines<R>,
    line: usize,
    done: bool,
}

impl<R: BufRead> NumberedLines<R> {
    fn new(reader: R) -> Self {
        Self { lines: reader.lines(), line: 0, done: false }
    }
}

impl<R: BufRead> Iterator for NumberedLines<R> {
    type Item = Result<(usize, String)>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            self.line += 1;
            match self.lines.next()? {
                Ok(l) if l.trim().is_empty() => continue,
                Ok(l) => return Some(Ok((self.line, l))),
                Err(e) => {
                    self.done = true;
                    return Some(Err(Error::Io(e)));
                }
            }
        }
    }
}

/// Streaming reader over an article corpus.
pub struct ArticleReader<R> {
    lines: NumberedLines<R>,
    max_paragraphs: usize,
}

impl<R: BufRead> ArticleReader<R> {
    pub fn new(reader: R, cfg: &IngestConfig) -> Self {
        Self { lines: NumberedLines::new(reader), max_paragraphs: cfg.max_paragraphs_per_article }
    }
}

impl<R: BufRead> Iterator for ArticleReader<R> {
    type Item = Result<Article>;

    fn next(&mut self) -> Option<Self::Item> {
        let (line, raw) = match self.lines.next()? {
            Ok(x) => x,
            Err(e) => return Some(Err(e)),
        };
        let parsed: ArticleLine = match serde_json::from_str(&raw) {
            Ok(p) => p,
            Err(e) => return Some(Err(Error::Record { line, message: e.to_string() })),
        };
        if parsed.paragraphs.is_empty() {
            return Some(Err(Error::Record {
                line,
                message: format!("article `{}` has no paragraphs", parsed.id),
            }));
        }
        let mut paragraphs = parsed.paragraphs;
        // Lead paragraphs first, in document order.
        paragraphs.truncate(self.max_paragraphs);
        Some(Ok(Article {
            article_id: parsed.id,
            source: Source::ArticleCorpus,
            category: None,
            paragraphs,
        }))
    }
}

/// Streaming reader over a flat corpus. Each record becomes a one-paragraph
/// article; records past the per-category cap are dropped in stream order.
pub struct FlatReader<R> {
    lines: NumberedLines<R>,
    id_prefix: String,
    cap: usize,
    seen: HashMap<String, usize>,
    dropped: usize,
}

impl<R: BufRead> FlatReader<R> {
    /// `id_prefix` namespaces the generated article ids (`{prefix}:{line}`).
    pub fn new(reader: R, id_prefix: impl Into<String>, cfg: &IngestConfig) -> Self {
        Self {
            lines: NumberedLines::new(reader),
            id_prefix: id_prefix.into(),
            cap: cfg.max_samples_per_category,
            seen: HashMap::new(),
            dropped: 0,
        }
    }

    /// Records discarded so far by the per-category cap.
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    pub fn category_counts(&self) -> &HashMap<String, usize> {
        &self.seen
    }
}

impl<R: BufRead> Iterator for FlatReader<R> {
    type Item = Result<Article>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let (line, raw) = match self.lines.next()? {
                Ok(x) => x,
                Err(e) => return Some(Err(e)),
            };
            let parsed: FlatLine = match serde_json::from_str(&raw) {
                Ok(p) => p,
                Err(e) => return Some(Err(Error::Record { line, message: e.to_string() })),
            };
            let count = self.seen.entry(parsed.category.clone()).or_insert(0);
            if *count >= self.cap {
                self.dropped += 1;
                continue;
            }
            *count += 1;
            return Some(Ok(Article {
                article_id: format!("{}:{}", self.id_prefix, line),
                source: Source::FlatCorpus,
                category: Some(parsed.category),
                paragraphs: vec![parsed.text],
            }));
        }
    }
}

pub fn read_article_corpus(path: &Path, cfg: &IngestConfig) -> Result<ArticleReader<BufReader<File>>> {
    cfg.validate()?;
    Ok(ArticleReader::new(open(path)?, cfg))
}

pub fn read_flat_corpus(path: &Path, cfg: &IngestConfig) -> Result<FlatReader<BufReader<File>>> {
    cfg.validate()?;
    let prefix = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "flat".to_string());
    Ok(FlatReader::new(open(path)?, prefix, cfg))
}

/// A stream that ran dry before reaching its quota.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shortfall {
    pub stream: usize,
    pub quota: usize,
    pub available: usize,
}

#[derive(Debug, Clone)]
pub struct Interleaved {
    pub articles: Vec<Article>,
    pub shortfalls: Vec<Shortfall>,
}

/// Draws `quotas[i]` articles from stream `i` (uniform reservoir sample when
/// the stream is longer) and emits the union in a seeded shuffled order.
pub fn interleave<I>(streams: Vec<I>, quotas: &[usize], seed: u64) -> Result<Interleaved>
where
    I: IntoIterator<Item = Article>,
{
    if streams.len() != quotas.len() {
        return Err(Error::Config(format!(
            "{} stream(s) but {} quota(s)",
            streams.len(),
            quotas.len()
        )));
    }
    if let Some(i) = quotas.iter().position(|&q| q == 0) {
        return Err(Error::Config(format!("quota for stream {i} must be >= 1")));
    }

    let mut articles = Vec::with_capacity(quotas.iter().sum());
    let mut shortfalls = Vec::new();
    for (i, (stream, &quota)) in streams.into_iter().zip(quotas).enumerate() {
        let mut rng = stage_rng(seed, "reservoir", i as u64);
        let mut reservoir: Vec<Article> = Vec::with_capacity(quota.min(1 << 20));
        let mut seen = 0usize;
        for article in stream {
            if reservoir.len() < quota {
                reservoir.push(article);
            } else {
                let j = rng.gen_range(0..=seen);
                if j < quota {
                    reservoir[j] = article;
                }
            }
            seen += 1;
        }
        if seen < quota {
            log::warn!("stream {i}: quota {quota} but only {seen} article(s) available");
            shortfalls.push(Shortfall { stream: i, quota, available: seen });
        }
        articles.extend(reservoir);
    }

    let mut rng = stage_rng(seed, "interleave", 0);
    articles.shuffle(&mut rng);
    Ok(Interleaved { articles, shortfalls })
}

/// Fails on the first repeated article id.
pub fn check_unique_ids<'a>(articles: impl IntoIterator<Item = &'a Article>) -> Result<()> {
    let mut ids = HashSet::new();
    for a in articles {
        if !ids.insert(a.article_id.as_str()) {
            return Err(Error::DuplicateArticle(a.article_id.clone()));
        }
    }
    Ok(())
}
