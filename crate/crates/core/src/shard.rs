//! Shard files and generation statistics.
//!
//! Samples are written as JSON lines to `{split}-{index:05}.jsonl`:
//!
//! ```text
//! {"options":[...],"label":7,"text":"...","meta":{"positive_source":{...},"negative_sources":[...],"is_hard":[...]}}
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::{FspSample, Generated, SamplerConfig, SourceRef, Split};
use crate::segment::FilterReport;

pub const DEFAULT_SHARD_SIZE: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShardMeta {
    pub positive_source: SourceRef,
    pub negative_sources: Vec<SourceRef>,
    pub is_hard: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShardRecord {
    pub options: Vec<String>,
    pub label: usize,
    pub text: String,
    pub meta: ShardMeta,
}

impl From<&FspSample> for ShardRecord {
    fn from(s: &FspSample) -> Self {
        ShardRecord {
            options: s.options.clone(),
            label: s.label,
            text: s.text.clone(),
            meta: ShardMeta {
                positive_source: s.positive_source.clone(),
                negative_sources: s.negative_sources.clone(),
                is_hard: s.is_hard.clone(),
            },
        }
    }
}

impl From<ShardRecord> for FspSample {
    fn from(r: ShardRecord) -> Self {
        FspSample {
            options: r.options,
            label: r.label,
            text: r.text,
            positive_source: r.meta.positive_source,
            negative_sources: r.meta.negative_sources,
            is_hard: r.meta.is_hard,
        }
    }
}

pub fn shard_name(split: Split, index: usize) -> String {
    format!("{}-{:05}.jsonl", split.as_str(), index)
}

/// Writes `samples` into consecutive shards of at most `shard_size` records.
/// An empty split writes no files.
pub fn write_shards(dir: &Path, split: Split, samples: &[FspSample], shard_size: usize) -> Result<Vec<PathBuf>> {
    if shard_size == 0 {
        return Err(Error::Config("shard_size must be >= 1".into()));
    }
    let mut paths = Vec::new();
    for (index, chunk) in samples.chunks(shard_size).enumerate() {
        let path = dir.join(shard_name(split, index));
        let mut w = BufWriter::new(File::create(&path)?);
        for s in chunk {
            serde_json::to_writer(&mut w, &ShardRecord::from(s)).map_err(std::io::Error::from)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        paths.push(path);
    }
    Ok(paths)
}

pub fn read_shard(path: &Path) -> Result<Vec<FspSample>> {
    let file = File::open(path).map_err(|source| Error::Open { path: path.to_path_buf(), source })?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ShardRecord =
            serde_json::from_str(&line).map_err(|e| Error::Record { line: i + 1, message: e.to_string() })?;
        out.push(rec.into());
    }
    Ok(out)
}

/// Summary written next to the shards by every generation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateStats {
    pub objective: String,
    pub seed: u64,
    pub n_model: usize,
    pub n_max_label: usize,
    pub hard_negatives: usize,
    pub articles: usize,
    pub record_errors: usize,
    pub paragraphs_seen: usize,
    pub filter: FilterReport,
    pub tuning_samples: usize,
    pub validation_samples: usize,
    /// Index `j` counts samples with `j` negatives.
    pub j_histogram: Vec<usize>,
    /// Index `h` counts samples with `h` hard negatives.
    pub hard_negative_histogram: Vec<usize>,
    pub label_histogram: Vec<usize>,
    pub shards: Vec<String>,
}

impl GenerateStats {
    pub fn from_generated(out: &Generated, cfg: &SamplerConfig, articles: usize, record_errors: usize) -> Self {
        let mut j_histogram = vec![0; cfg.n_max_label];
        let mut hard_negative_histogram = vec![0; cfg.n_max_label];
        let mut label_histogram = vec![0; cfg.n_model];
        for s in out.samples() {
            j_histogram[s.j()] += 1;
            hard_negative_histogram[s.hard_count()] += 1;
            label_histogram[s.label] += 1;
        }
        GenerateStats {
            objective: cfg.objective.to_string(),
            seed: cfg.seed,
            n_model: cfg.n_model,
            n_max_label: cfg.n_max_label,
            hard_negatives: cfg.hard_negatives,
            articles,
            record_errors,
            paragraphs_seen: out.filter.total(),
            filter: out.filter.clone(),
            tuning_samples: out.tuning.len(),
            validation_samples: out.validation.len(),
            j_histogram,
            hard_negative_histogram,
            label_histogram,
            shards: Vec::new(),
        }
    }

    /// Expected accuracy of a uniform guess over the non-pad options:
    /// the mean of `1 / (J + 1)`.
    pub fn chance_accuracy(&self) -> f64 {
        let n: usize = self.j_histogram.iter().sum();
        if n == 0 {
            return 0.0;
        }
        self.j_histogram.iter().enumerate().map(|(j, &c)| c as f64 / (j + 1) as f64).sum::<f64>() / n as f64
    }
}
