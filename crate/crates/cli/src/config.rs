//! Run configuration: an optional TOML file, overridden by command-line flags.
//!
//! ```toml
//! seed = 7
//! workers = 0
//! shard_size = 100000
//! max_error_rate = 0.01
//!
//! [ingest]
//! max_paragraphs_per_article = 5
//! max_samples_per_category = 500000
//!
//! [sampler]
//! n_model = 20
//! n_max_label = 10
//! hard_negatives = 1
//! objective = "fsp"
//! validation_fraction = 0.0125
//!
//! [markers]
//! cls = "[CLS]"
//! ```

use std::path::Path;

use fsp_core::format::{IndicatorScheme, MarkerSet};
use fsp_core::ingest::IngestConfig;
use fsp_core::sampler::SamplerConfig;
use fsp_core::shard::DEFAULT_SHARD_SIZE;
use serde::Deserialize;

use crate::Failure;

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub workers: usize,
    pub shard_size: usize,
    pub max_error_rate: f64,
    pub scheme: IndicatorScheme,
    pub ingest: IngestConfig,
    pub sampler: SamplerConfig,
    pub markers: MarkerSet,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: None,
            workers: 0,
            shard_size: DEFAULT_SHARD_SIZE,
            max_error_rate: 0.01,
            scheme: IndicatorScheme::Alphabet,
            ingest: IngestConfig::default(),
            sampler: SamplerConfig::default(),
            markers: MarkerSet::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let Some(path) = path else { return Ok(Self::default()) };
        let raw = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&raw).map_err(|e| Failure::Usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), Failure> {
        self.ingest.validate()?;
        self.sampler.validate()?;
        self.markers.validate()?;
        if self.shard_size == 0 {
            return Err(Failure::Usage("shard_size must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.max_error_rate) {
            return Err(Failure::Usage("max_error_rate must be in [0, 1]".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fsp_core::sampler::Objective;

    #[test]
    fn parses_nested_sections() {
        let cfg: RunConfig = toml::from_str(
            r#"
            seed = 7
            scheme = "numeric"
            [sampler]
            objective = "lsp"
            n_model = 12
            [ingest]
            per_corpus_quota = 40
            "#,
        )
        .unwrap();
        assert_eq!(cfg.seed, Some(7));
        assert_eq!(cfg.scheme, IndicatorScheme::Numeric);
        assert_eq!(cfg.sampler.objective, Objective::Lsp);
        assert_eq!(cfg.sampler.n_model, 12);
        assert_eq!(cfg.sampler.n_max_label, 10);
        assert_eq!(cfg.ingest.per_corpus_quota, Some(40));
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<RunConfig>("seeds = 1").is_err());
    }
}
