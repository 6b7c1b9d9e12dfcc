//! Self-supervised sample construction.
//!
//! For each kept paragraph the objective designates one sentence as the
//! positive option and the remaining sentences as the text body. Negatives
//! are the designated sentences of other paragraphs: up to a fixed budget of
//! hard negatives from the same article, the rest drawn uniformly from all
//! other articles. The option list is padded to `n_model` slots, shuffled,
//! and the label is the positive's final slot.

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};
use xxhash_rust::xxh3::xxh3_64_with_seed;

use crate::error::{Error, Result};
use crate::ingest::{check_unique_ids, Article};
use crate::par::{self, Workers};
use crate::rng::{paragraph_rng, SampleRng};
use crate::segment::{segment_and_filter, FilterReport, ParagraphRecord};

/// Stored pad option. Renderers substitute their own pad marker.
pub const PAD: &str = "[PAD]";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    /// First sentence is the option, the rest is the text.
    #[default]
    Fsp,
    /// Last sentence is the option, the rest is the text.
    Lsp,
    /// A random consecutive pair: the first is the text, the second the option.
    Nss,
    /// A random sentence is the option, the rest is the text.
    Rsp,
}

impl Objective {
    pub const ALL: [Objective; 4] = [Objective::Fsp, Objective::Lsp, Objective::Nss, Objective::Rsp];

    pub fn as_str(self) -> &'static str {
        match self {
            Objective::Fsp => "fsp",
            Objective::Lsp => "lsp",
            Objective::Nss => "nss",
            Objective::Rsp => "rsp",
        }
    }

    /// Number of distinct random draws for a paragraph of `k` sentences.
    pub fn choice_count(self, k: usize) -> usize {
        match self {
            Objective::Fsp | Objective::Lsp => 1,
            Objective::Nss => k.saturating_sub(1),
            Objective::Rsp => k,
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fsp" => Ok(Objective::Fsp),
            "lsp" => Ok(Objective::Lsp),
            "nss" => Ok(Objective::Nss),
            "rsp" => Ok(Objective::Rsp),
            other => Err(Error::Config(format!("unknown objective `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    pub n_model: usize,
    pub n_max_label: usize,
    /// Per-sample hard-negative budget. Flat corpora have no siblings, so it
    /// is effectively 0 there.
    pub hard_negatives: usize,
    pub seed: u64,
    pub objective: Objective,
    /// Share of articles routed to the validation split.
    pub validation_fraction: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            n_model: 20,
            n_max_label: 10,
            hard_negatives: 1,
            seed: 0,
            objective: Objective::Fsp,
            validation_fraction: 0.0,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_model == 0 {
            return Err(Error::Config("n_model must be >= 1".into()));
        }
        if self.n_max_label < 2 {
            return Err(Error::Config("n_max_label must be >= 2 so that at least one negative fits".into()));
        }
        if self.n_max_label > self.n_model {
            return Err(Error::Config(format!(
                "n_max_label ({}) must not exceed n_model ({})",
                self.n_max_label, self.n_model
            )));
        }
        if self.hard_negatives > self.n_max_label - 1 {
            return Err(Error::Config(format!(
                "hard_negatives ({}) must not exceed n_max_label - 1 ({})",
                self.hard_negatives,
                self.n_max_label - 1
            )));
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return Err(Error::Config("validation_fraction must be in [0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SourceRef {
    pub article_id: String,
    pub paragraph_index: usize,
}

impl SourceRef {
    pub fn new(article_id: impl Into<String>, paragraph_index: usize) -> Self {
        Self { article_id: article_id.into(), paragraph_index }
    }
}

/// One multiple-choice tuning example.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FspSample {
    pub options: Vec<String>,
    pub label: usize,
    pub text: String,
    pub positive_source: SourceRef,
    /// Sources of the non-pad, non-positive options, in option order.
    pub negative_sources: Vec<SourceRef>,
    pub is_hard: Vec<bool>,
}

impl FspSample {
    /// Number of negatives.
    pub fn j(&self) -> usize {
        self.negative_sources.len()
    }

    pub fn pad_count(&self) -> usize {
        self.options.iter().filter(|o| o.as_str() == PAD).count()
    }

    pub fn hard_count(&self) -> usize {
        self.is_hard.iter().filter(|&&h| h).count()
    }

    pub fn positive(&self) -> &str {
        &self.options[self.label]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignatedSplit {
    pub option: String,
    pub text: String,
}

/// Deterministic split for a given draw. `choice` is ignored by FSP and LSP,
/// selects the pair `(choice, choice + 1)` for NSS and the option sentence
/// for RSP.
pub fn designated_split_at(sentences: &[String], objective: Objective, choice: usize) -> Result<DesignatedSplit> {
    let k = sentences.len();
    if k < 2 {
        return Err(Error::TooFewSentences(k));
    }
    let choices = objective.choice_count(k);
    if choice >= choices && choices > 1 {
        return Err(Error::Config(format!("choice {choice} out of range for {objective} with {k} sentences")));
    }
    let (option, text) = match objective {
        Objective::Fsp => (sentences[0].clone(), sentences[1..].join(" ")),
        Objective::Lsp => (sentences[k - 1].clone(), sentences[..k - 1].join(" ")),
        Objective::Nss => (sentences[choice + 1].clone(), sentences[choice].clone()),
        Objective::Rsp => {
            let rest: Vec<&str> = sentences
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != choice)
                .map(|(_, s)| s.as_str())
                .collect();
            (sentences[choice].clone(), rest.join(" "))
        }
    };
    Ok(DesignatedSplit { option, text })
}

pub fn designated_split(rec: &ParagraphRecord, objective: Objective, rng: &mut SampleRng) -> Result<DesignatedSplit> {
    let k = rec.sentences.len();
    if k < 2 {
        return Err(Error::TooFewSentences(k));
    }
    let choice = match objective.choice_count(k) {
        1 => 0,
        n => rng.gen_range(0..n),
    };
    designated_split_at(&rec.sentences, objective, choice)
}

#[derive(Debug, Clone)]
struct PoolEntry {
    paragraph_index: usize,
    sentence: String,
}

/// Designated sentences of every kept paragraph, grouped by article so each
/// article occupies one contiguous range.
#[derive(Debug, Clone, Default)]
pub struct OptionPool {
    entries: Vec<PoolEntry>,
    owners: Vec<u32>,
    article_ids: Vec<String>,
    ranges: HashMap<String, Range<usize>>,
}

impl OptionPool {
    /// Builds the pool. Entries of one article need not be adjacent in the
    /// input; articles keep their first-appearance order.
    pub fn from_entries<I>(entries: I) -> Self
    where
        I: IntoIterator<Item = (SourceRef, String)>,
    {
        let mut order: Vec<String> = Vec::new();
        let mut grouped: HashMap<String, Vec<PoolEntry>> = HashMap::new();
        for (src, sentence) in entries {
            let bucket = grouped.entry(src.article_id.clone()).or_insert_with(|| {
                order.push(src.article_id.clone());
                Vec::new()
            });
            bucket.push(PoolEntry { paragraph_index: src.paragraph_index, sentence });
        }
        let mut pool = OptionPool::default();
        for (owner, id) in order.into_iter().enumerate() {
            let bucket = grouped.remove(&id).unwrap_or_default();
            let start = pool.entries.len();
            pool.owners.extend(std::iter::repeat_n(owner as u32, bucket.len()));
            pool.entries.extend(bucket);
            pool.ranges.insert(id.clone(), start..pool.entries.len());
            pool.article_ids.push(id);
        }
        pool
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn range_of(&self, article_id: &str) -> Range<usize> {
        self.ranges.get(article_id).cloned().unwrap_or(0..0)
    }

    fn source(&self, i: usize) -> SourceRef {
        SourceRef {
            article_id: self.article_ids[self.owners[i] as usize].clone(),
            paragraph_index: self.entries[i].paragraph_index,
        }
    }

    /// `(paragraph_index, sentence)` pairs of one article.
    pub fn article_entries(&self, article_id: &str) -> impl Iterator<Item = (usize, &str)> {
        self.entries[self.range_of(article_id)]
            .iter()
            .map(|e| (e.paragraph_index, e.sentence.as_str()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Negative {
    pub sentence: String,
    pub source: SourceRef,
    pub is_hard: bool,
}

/// Draws `J ~ U{1, n_max_label - 1}` negatives for one positive: hard ones
/// first (same article, other paragraphs), then random ones from other
/// articles. Candidates whose text equals the positive are skipped.
pub fn sample_negatives(
    pool: &OptionPool,
    positive: &SourceRef,
    positive_option: &str,
    cfg: &SamplerConfig,
    rng: &mut SampleRng,
) -> Result<Vec<Negative>> {
    let j = rng.gen_range(1..cfg.n_max_label);
    let own = pool.range_of(&positive.article_id);

    let siblings: Vec<usize> = own
        .clone()
        .filter(|&i| {
            let e = &pool.entries[i];
            e.paragraph_index != positive.paragraph_index && e.sentence != positive_option
        })
        .collect();
    let n_hard = cfg.hard_negatives.min(siblings.len()).min(j);
    let mut out = Vec::with_capacity(j);
    for k in index::sample(rng, siblings.len(), n_hard) {
        let i = siblings[k];
        out.push(Negative { sentence: pool.entries[i].sentence.clone(), source: pool.source(i), is_hard: true });
    }

    let need = j - n_hard;
    if need == 0 {
        return Ok(out);
    }
    let outside = pool.len() - own.len();
    if outside < need {
        return Err(Error::InsufficientPool { needed: need, available: outside });
    }
    let to_global = |u: usize| if u < own.start { u } else { u + own.len() };
    let eligible = |i: usize| pool.entries[i].sentence != positive_option;

    let mut chosen: Vec<usize> = Vec::with_capacity(need);
    let max_attempts = 32 * need + 64;
    let mut attempts = 0;
    while chosen.len() < need && attempts < max_attempts {
        attempts += 1;
        let i = to_global(rng.gen_range(0..outside));
        if eligible(i) && !chosen.contains(&i) {
            chosen.push(i);
        }
    }
    if chosen.len() < need {
        // Pathological pools (many copies of the positive): enumerate.
        let mut rest: Vec<usize> = (0..outside)
            .map(to_global)
            .filter(|&i| eligible(i) && !chosen.contains(&i))
            .collect();
        let missing = need - chosen.len();
        if rest.len() < missing {
            return Err(Error::InsufficientPool { needed: need, available: chosen.len() + rest.len() });
        }
        let (picked, _) = rest.partial_shuffle(rng, missing);
        chosen.extend_from_slice(picked);
    }
    out.extend(chosen.into_iter().map(|i| Negative {
        sentence: pool.entries[i].sentence.clone(),
        source: pool.source(i),
        is_hard: false,
    }));
    Ok(out)
}

/// Pads, shuffles (Fisher-Yates) and labels one sample.
pub fn assemble(
    split: DesignatedSplit,
    positive: SourceRef,
    negatives: Vec<Negative>,
    cfg: &SamplerConfig,
    rng: &mut SampleRng,
) -> Result<FspSample> {
    if negatives.len() + 1 > cfg.n_model {
        return Err(Error::Config(format!(
            "{} negatives do not fit in {} option slots",
            negatives.len(),
            cfg.n_model
        )));
    }
    #[derive(Clone, Copy)]
    enum Slot {
        Positive,
        Negative(usize),
        Pad,
    }
    let mut slots: Vec<Slot> = Vec::with_capacity(cfg.n_model);
    slots.push(Slot::Positive);
    slots.extend((0..negatives.len()).map(Slot::Negative));
    slots.resize(cfg.n_model, Slot::Pad);
    slots.shuffle(rng);

    let mut options = Vec::with_capacity(cfg.n_model);
    let mut label = 0;
    let mut negative_sources = Vec::with_capacity(negatives.len());
    let mut is_hard = Vec::with_capacity(negatives.len());
    for (pos, slot) in slots.into_iter().enumerate() {
        match slot {
            Slot::Positive => {
                label = pos;
                options.push(split.option.clone());
            }
            Slot::Negative(k) => {
                let n = &negatives[k];
                options.push(n.sentence.clone());
                negative_sources.push(n.source.clone());
                is_hard.push(n.is_hard);
            }
            Slot::Pad => options.push(PAD.to_string()),
        }
    }
    Ok(FspSample { options, label, text: split.text, positive_source: positive, negative_sources, is_hard })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Tuning,
    Validation,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Tuning => "tuning",
            Split::Validation => "validation",
        }
    }
}

const SPLIT_SALT: u64 = 0x5b1f_7a11_d00d_cafe;

/// Routes a whole article to one split by hashing its id.
pub fn split_of(article_id: &str, seed: u64, validation_fraction: f64) -> Split {
    if validation_fraction <= 0.0 {
        return Split::Tuning;
    }
    let h = xxh3_64_with_seed(article_id.as_bytes(), seed ^ SPLIT_SALT);
    let threshold = (validation_fraction * 2f64.powi(64)) as u128;
    if (h as u128) < threshold {
        Split::Validation
    } else {
        Split::Tuning
    }
}

#[derive(Debug, Clone, Default)]
pub struct Generated {
    pub tuning: Vec<FspSample>,
    pub validation: Vec<FspSample>,
    pub filter: FilterReport,
}

impl Generated {
    pub fn samples(&self) -> impl Iterator<Item = &FspSample> {
        self.tuning.iter().chain(self.validation.iter())
    }
}

/// Two-pass generation: build the option pool from kept paragraphs, then emit
/// one sample per kept paragraph.
pub fn generate(articles: &[Article], cfg: &SamplerConfig, workers: Workers) -> Result<Generated> {
    cfg.validate()?;
    check_unique_ids(articles)?;
    let (kept, filter) = segment_and_filter(articles, workers);

    let splits = par::try_map_ordered(&kept, workers, |rec| {
        let mut rng = paragraph_rng(cfg.seed, &rec.article_id, rec.paragraph_index);
        designated_split(rec, cfg.objective, &mut rng)
    })?;
    let pool = OptionPool::from_entries(
        kept.iter()
            .zip(&splits)
            .map(|(rec, s)| (SourceRef::new(rec.article_id.clone(), rec.paragraph_index), s.option.clone())),
    );

    let samples = par::try_map_ordered(&kept, workers, |rec| {
        let mut rng = paragraph_rng(cfg.seed, &rec.article_id, rec.paragraph_index);
        let split = designated_split(rec, cfg.objective, &mut rng)?;
        let positive = SourceRef::new(rec.article_id.clone(), rec.paragraph_index);
        let negatives = sample_negatives(&pool, &positive, &split.option, cfg, &mut rng)?;
        assemble(split, positive, negatives, cfg, &mut rng)
    })?;

    let mut out = Generated { filter, ..Default::default() };
    for sample in samples {
        match split_of(&sample.positive_source.article_id, cfg.seed, cfg.validation_fraction) {
            Split::Tuning => out.tuning.push(sample),
            Split::Validation => out.validation.push(sample),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Source;
    use rand::SeedableRng;

    fn strings(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn rng(seed: u64) -> SampleRng {
        SampleRng::seed_from_u64(seed)
    }

    fn pool_of(articles: &[(&str, usize)]) -> OptionPool {
        OptionPool::from_entries(articles.iter().flat_map(|&(id, n)| {
            (0..n).map(move |p| (SourceRef::new(id, p), format!("{id} first sentence {p}.")))
        }))
    }

    #[test]
    fn fsp_split_on_worked_example() {
        let sentences = strings(&[
            "Jim Berryman (born February 17, 1947) is a Michigan politician.",
            "He is the former mayor of Adrian, Michigan.",
        ]);
        let s = designated_split_at(&sentences, Objective::Fsp, 0).unwrap();
        assert_eq!(s.option, sentences[0]);
        assert_eq!(s.text, sentences[1]);
    }

    #[test]
    fn lsp_and_rsp_definitions() {
        let abc = strings(&["A", "B", "C"]);
        let s = designated_split_at(&abc, Objective::Lsp, 0).unwrap();
        assert_eq!((s.option.as_str(), s.text.as_str()), ("C", "A B"));
        let ab = strings(&["A", "B"]);
        let s = designated_split_at(&ab, Objective::Rsp, 1).unwrap();
        assert_eq!((s.option.as_str(), s.text.as_str()), ("B", "A"));
        let s = designated_split_at(&abc, Objective::Nss, 1).unwrap();
        assert_eq!((s.option.as_str(), s.text.as_str()), ("C", "B"));
    }

    #[test]
    fn split_needs_two_sentences() {
        let one = strings(&["Alone."]);
        assert!(matches!(designated_split_at(&one, Objective::Fsp, 0), Err(Error::TooFewSentences(1))));
        let rec = ParagraphRecord { article_id: "a".into(), paragraph_index: 0, sentences: one, category: None };
        assert!(designated_split(&rec, Objective::Rsp, &mut rng(0)).is_err());
    }

    #[test]
    fn j_stays_in_range() {
        let pool = pool_of(&[("a", 3), ("b", 20), ("c", 20)]);
        let cfg = SamplerConfig::default();
        let pos = SourceRef::new("a", 0);
        let mut seen = [false; 10];
        for seed in 0..2000 {
            let negs = sample_negatives(&pool, &pos, "a first sentence 0.", &cfg, &mut rng(seed)).unwrap();
            assert!((1..=9).contains(&negs.len()));
            seen[negs.len()] = true;
        }
        assert!(seen[1..].iter().all(|&s| s));
    }

    #[test]
    fn hard_negative_budget_capped_by_availability() {
        // One sibling available, budget 3: whenever J >= 2 we get 1 hard and J-1 random.
        let pool = pool_of(&[("a", 2), ("b", 30)]);
        let cfg = SamplerConfig { hard_negatives: 3, ..Default::default() };
        let pos = SourceRef::new("a", 0);
        for seed in 0..500 {
            let negs = sample_negatives(&pool, &pos, "a first sentence 0.", &cfg, &mut rng(seed)).unwrap();
            let hard: Vec<_> = negs.iter().filter(|n| n.is_hard).collect();
            assert_eq!(hard.len(), 1);
            assert_eq!(hard[0].source, SourceRef::new("a", 1));
            for n in &negs {
                assert_eq!(n.is_hard, n.source.article_id == "a");
            }
            if negs.len() == 5 {
                assert_eq!(negs.iter().filter(|n| !n.is_hard).count(), 4);
            }
        }
    }

    #[test]
    fn flat_articles_get_no_hard_negatives() {
        let pool = pool_of(&[("f:1", 1), ("f:2", 1), ("f:3", 1), ("f:4", 1), ("f:5", 1), ("f:6", 1), ("f:7", 1), ("f:8", 1), ("f:9", 1), ("f:10", 1)]);
        let cfg = SamplerConfig { hard_negatives: 0, ..Default::default() };
        for seed in 0..200 {
            let negs = sample_negatives(&pool, &SourceRef::new("f:1", 0), "f:1 first sentence 0.", &cfg, &mut rng(seed)).unwrap();
            assert!(negs.iter().all(|n| !n.is_hard && n.source.article_id != "f:1"));
        }
    }

    #[test]
    fn insufficient_pool() {
        let pool = pool_of(&[("a", 1), ("b", 1)]);
        let cfg = SamplerConfig::default();
        let res = (0..50)
            .map(|s| sample_negatives(&pool, &SourceRef::new("a", 0), "x", &cfg, &mut rng(s)))
            .find(|r| r.is_err())
            .unwrap();
        assert!(matches!(res, Err(Error::InsufficientPool { available: 1, .. })));
    }

    #[test]
    fn negatives_never_repeat_the_positive_text() {
        // Half of the other articles share the positive's sentence.
        let mut entries = vec![(SourceRef::new("p", 0), "same.".to_string())];
        for i in 0..30 {
            let s = if i % 2 == 0 { "same.".to_string() } else { format!("other {i}.") };
            entries.push((SourceRef::new(format!("o{i}"), 0), s));
        }
        let pool = OptionPool::from_entries(entries);
        let cfg = SamplerConfig::default();
        for seed in 0..300 {
            let negs = sample_negatives(&pool, &SourceRef::new("p", 0), "same.", &cfg, &mut rng(seed)).unwrap();
            assert!(negs.iter().all(|n| n.sentence != "same."));
            let mut ids: Vec<_> = negs.iter().map(|n| &n.source).collect();
            ids.dedup();
            assert_eq!(ids.len(), negs.len());
        }
    }

    #[test]
    fn assemble_counts() {
        let cfg = SamplerConfig { n_model: 5, n_max_label: 5, ..Default::default() };
        let negs = vec![
            Negative { sentence: "n1".into(), source: SourceRef::new("a", 1), is_hard: true },
            Negative { sentence: "n2".into(), source: SourceRef::new("b", 0), is_hard: false },
        ];
        let split = DesignatedSplit { option: "pos".into(), text: "body".into() };
        let s = assemble(split.clone(), SourceRef::new("a", 0), negs.clone(), &cfg, &mut rng(3)).unwrap();
        assert_eq!(s.options.len(), 5);
        assert_eq!(s.pad_count(), 2);
        assert_eq!(s.options.iter().filter(|o| o.as_str() == "pos").count(), 1);
        assert_eq!(s.positive(), "pos");
        let again = assemble(split, SourceRef::new("a", 0), negs, &cfg, &mut rng(3)).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn worked_example_with_hard_negative() {
        let cfg = SamplerConfig { n_model: 5, n_max_label: 5, ..Default::default() };
        let first = "Jim Berryman (born February 17, 1947) is a Michigan politician.";
        let hard = "On January 6, 2012, Berryman announced his candidacy.";
        let split = DesignatedSplit { option: first.into(), text: "He is the former mayor of Adrian.".into() };
        let negs = vec![Negative { sentence: hard.into(), source: SourceRef::new("berryman", 1), is_hard: true }];
        let s = assemble(split, SourceRef::new("berryman", 0), negs, &cfg, &mut rng(11)).unwrap();
        assert_eq!(s.options[s.label], first);
        assert!(s.options.iter().any(|o| o == hard));
        assert_eq!(s.pad_count(), 3);
        assert_eq!(s.is_hard, vec![true]);
    }

    #[test]
    fn config_validation() {
        assert!(SamplerConfig::default().validate().is_ok());
        assert!(SamplerConfig { n_max_label: 21, ..Default::default() }.validate().is_err());
        assert!(SamplerConfig { hard_negatives: 10, ..Default::default() }.validate().is_err());
        assert!(SamplerConfig { n_max_label: 1, ..Default::default() }.validate().is_err());
        assert!(SamplerConfig { validation_fraction: 1.0, ..Default::default() }.validate().is_err());
    }

    fn corpus(n_articles: usize, paragraphs: usize) -> Vec<Article> {
        (0..n_articles)
            .map(|a| Article {
                article_id: format!("art{a}"),
                source: Source::ArticleCorpus,
                category: None,
                paragraphs: (0..paragraphs)
                    .map(|p| format!("Topic {a} opens part {p}. It continues with detail {p}. It ends here {a}."))
                    .collect(),
            })
            .collect()
    }

    #[test]
    fn one_sample_per_kept_paragraph() {
        // Four paragraphs lie outside any one article, so J must stay <= 4.
        let cfg = SamplerConfig { n_max_label: 5, ..Default::default() };
        let out = generate(&corpus(3, 2), &cfg, Workers::SEQUENTIAL).unwrap();
        assert_eq!(out.tuning.len() + out.validation.len(), 6);
        assert_eq!(out.filter.kept, 6);
    }

    #[test]
    fn validation_split_is_disjoint_by_article() {
        let cfg = SamplerConfig { validation_fraction: 0.3, ..Default::default() };
        let out = generate(&corpus(60, 3), &cfg, Workers::SEQUENTIAL).unwrap();
        assert!(!out.validation.is_empty() && !out.tuning.is_empty());
        let val: std::collections::HashSet<_> = out.validation.iter().map(|s| &s.positive_source.article_id).collect();
        assert!(out.tuning.iter().all(|s| !val.contains(&s.positive_source.article_id)));
    }

    #[test]
    fn validation_fraction_at_full_scale() {
        // 5.12M tuning + 64k validation: fraction 64k / 5.184M routes ~64k samples.
        let total = 5_184_000u64;
        let fraction = 64_000.0 / total as f64;
        let n = (0..total).filter(|i| split_of(&format!("w{i}"), 0, fraction) == Split::Validation).count();
        // Binomial sd ~ 251.
        assert!((n as i64 - 64_000).abs() < 1_300, "{n}");
    }

    #[test]
    fn generation_independent_of_workers() {
        let arts = corpus(40, 4);
        let cfg = SamplerConfig { seed: 5, validation_fraction: 0.1, ..Default::default() };
        let a = generate(&arts, &cfg, Workers::SEQUENTIAL).unwrap();
        let b = generate(&arts, &cfg, Workers(4)).unwrap();
        assert_eq!(a.tuning, b.tuning);
        assert_eq!(a.validation, b.validation);
    }

    #[test]
    fn duplicate_article_ids_rejected() {
        let mut arts = corpus(3, 2);
        arts[2].article_id = "art0".into();
        assert!(matches!(
            generate(&arts, &SamplerConfig::default(), Workers::SEQUENTIAL),
            Err(Error::DuplicateArticle(_))
        ));
    }

    #[test]
    fn objectives_parse() {
        for o in Objective::ALL {
            assert_eq!(o.as_str().parse::<Objective>().unwrap(), o);
        }
        assert!("xyz".parse::<Objective>().is_err());
    }
}
