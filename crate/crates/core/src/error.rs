use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to open {path}: {source}")]
    Open {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("line {line}: {message}")]
    Record { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("duplicate article id `{0}`")]
    DuplicateArticle(String),

    #[error("paragraph has {0} sentence(s); at least 2 are required")]
    TooFewSentences(usize),

    #[error("option pool has {available} candidate(s) outside the article, {needed} needed")]
    InsufficientPool { needed: usize, available: usize },

    #[error("indicator scheme provides {available} symbol(s), {needed} needed")]
    SymbolExhausted { needed: usize, available: usize },

    #[error("template must contain exactly one `[]` placeholder, found {0}")]
    Placeholder(usize),

    #[error("task has {n_l} classes but the model has only {n_model} option slots")]
    TooManyClasses { n_l: usize, n_model: usize },

    #[error("n_l = {n_l} is outside 1..={len}")]
    ClassCountOutOfRange { n_l: usize, len: usize },

    #[error("non-finite logit at index {0}")]
    NonFiniteLogit(usize),

    #[error("record `{0}` has no gold label")]
    MissingGold(String),

    #[error("record `{sample_id}`: gold label {gold} is not below n_l = {n_l}")]
    GoldOutOfRange {
        sample_id: String,
        gold: usize,
        n_l: usize,
    },

    #[error("evaluation stream is empty")]
    EmptyEval,

    #[error("rendered input does not match the expected layout: {0}")]
    Parse(String),
}
