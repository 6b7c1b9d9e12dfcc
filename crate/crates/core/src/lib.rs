//! First-sentence-prediction (FSP) dataset construction for self-supervised
//! tuning of zero-shot text classifiers, plus the inference-side tooling:
//! verbalizers, multiple-choice input rendering and constrained prediction.
//!
//! The pipeline runs in stages:
//!
//! 1. [`ingest`] reads article or flat corpora and balances them.
//! 2. [`segment`] splits paragraphs into sentences, filters unusable
//!    paragraphs and removes exact duplicates.
//! 3. [`sampler`] turns each kept paragraph into a multiple-choice sample
//!    with random and hard negatives, padding and a shuffled label.
//! 4. [`format`] renders samples and zero-shot tasks into model input strings.
//! 5. [`predict`] turns externally produced logits into constrained
//!    predictions and accuracy reports.
//!
//! Data-parallel stages go through [`par`], which uses rayon when the
//! `parallel` feature is enabled and runs sequentially otherwise. Output is
//! identical for any worker count.

pub mod error;
pub mod format;
pub mod ingest;
pub mod par;
pub mod predict;
pub mod rng;
pub mod sampler;
pub mod segment;
pub mod shard;

pub use error::{Error, Result};
