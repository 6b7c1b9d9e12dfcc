//! Multiple-choice input rendering.
//!
//! Every input has the layout
//!
//! ```text
//! [CLS] (A) option 0 (B) option 1 ... (T) option 19 [SEP] text [SEP]
//! ```
//!
//! with configurable marker strings and index indicators. Tuning samples use
//! their shuffled option list; zero-shot tasks put the verbalized classes in
//! class order followed by pads, so the label index of class `i` is `i`.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::{FspSample, PAD};

const PLACEHOLDER: &str = "[]";

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndicatorScheme {
    /// A, B, C, ... (26 symbols).
    #[default]
    Alphabet,
    /// 0, 1, 2, ...
    Numeric,
    /// The same "0" for every slot.
    Constant,
    /// Caller-supplied symbols, e.g. a rearranged `B, A, D, C, ...`.
    Custom(Vec<String>),
}

impl IndicatorScheme {
    pub fn symbols(&self, n: usize) -> Result<Vec<String>> {
        match self {
            IndicatorScheme::Alphabet => {
                if n > 26 {
                    return Err(Error::SymbolExhausted { needed: n, available: 26 });
                }
                Ok((b'A'..).take(n).map(|b| (b as char).to_string()).collect())
            }
            IndicatorScheme::Numeric => Ok((0..n).map(|i| i.to_string()).collect()),
            IndicatorScheme::Constant => Ok(vec!["0".to_string(); n]),
            IndicatorScheme::Custom(symbols) => {
                if symbols.len() < n {
                    return Err(Error::SymbolExhausted { needed: n, available: symbols.len() });
                }
                Ok(symbols[..n].to_vec())
            }
        }
    }

    /// Builds a scheme from its CLI name; `custom` takes comma-separated symbols.
    pub fn parse(kind: &str, custom_symbols: Option<&str>) -> Result<Self> {
        match kind {
            "custom" => {
                let symbols = custom_symbols
                    .ok_or_else(|| Error::Config("custom scheme needs a symbol list".into()))?;
                Ok(IndicatorScheme::Custom(symbols.split(',').map(|s| s.trim().to_string()).collect()))
            }
            other => other.parse(),
        }
    }
}

impl FromStr for IndicatorScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alphabet" => Ok(IndicatorScheme::Alphabet),
            "numeric" => Ok(IndicatorScheme::Numeric),
            "constant" => Ok(IndicatorScheme::Constant),
            other => Err(Error::Config(format!("unknown indicator scheme `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MarkerSet {
    pub cls: String,
    pub sep: String,
    pub pad: String,
}

impl Default for MarkerSet {
    fn default() -> Self {
        Self { cls: "[CLS]".into(), sep: "[SEP]".into(), pad: PAD.into() }
    }
}

impl MarkerSet {
    pub fn validate(&self) -> Result<()> {
        let all = [&self.cls, &self.sep, &self.pad];
        if all.iter().any(|m| m.is_empty()) {
            return Err(Error::Config("marker strings must be non-empty".into()));
        }
        if self.cls == self.sep || self.cls == self.pad || self.sep == self.pad {
            return Err(Error::Config("marker strings must be distinct".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verbalizer {
    /// Template with one `[]` placeholder for the class name.
    Template(String),
    /// One option string per class.
    Explicit(Vec<String>),
}

/// A zero-shot classification task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskSpec {
    pub class_names: Vec<String>,
    pub verbalizer: Verbalizer,
    pub n_model: usize,
}

impl TaskSpec {
    pub fn n_l(&self) -> usize {
        self.class_names.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n_l = self.n_l();
        if n_l < 2 {
            return Err(Error::Config(format!("a task needs at least 2 classes, got {n_l}")));
        }
        if n_l > self.n_model {
            return Err(Error::TooManyClasses { n_l, n_model: self.n_model });
        }
        match &self.verbalizer {
            Verbalizer::Explicit(list) if list.len() != n_l => {
                Err(Error::Config(format!("{} verbalizers for {n_l} classes", list.len())))
            }
            Verbalizer::Template(t) if t.matches(PLACEHOLDER).count() != 1 => {
                Err(Error::Placeholder(t.matches(PLACEHOLDER).count()))
            }
            _ => Ok(()),
        }
    }
}

/// On-disk task description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskFile {
    pub class_names: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verbalizers: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<IndicatorScheme>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_model: Option<usize>,
}

impl TaskFile {
    pub fn into_spec(self, default_n_model: usize) -> Result<(TaskSpec, Option<IndicatorScheme>)> {
        let verbalizer = match (self.template, self.verbalizers) {
            (Some(t), None) => Verbalizer::Template(t),
            (None, Some(v)) => Verbalizer::Explicit(v),
            (None, None) => Verbalizer::Template(PLACEHOLDER.to_string()),
            (Some(_), Some(_)) => {
                return Err(Error::Config("task file sets both `template` and `verbalizers`".into()))
            }
        };
        let spec = TaskSpec {
            class_names: self.class_names,
            verbalizer,
            n_model: self.n_model.unwrap_or(default_n_model),
        };
        spec.validate()?;
        Ok((spec, self.scheme))
    }
}

/// One line of a rendered dataset shard.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderedRecord {
    pub input: String,
    pub label: usize,
}

pub fn verbalize(spec: &TaskSpec) -> Result<Vec<String>> {
    match &spec.verbalizer {
        Verbalizer::Template(t) => {
            let holes = t.matches(PLACEHOLDER).count();
            if holes != 1 {
                return Err(Error::Placeholder(holes));
            }
            Ok(spec.class_names.iter().map(|c| t.replacen(PLACEHOLDER, c, 1)).collect())
        }
        Verbalizer::Explicit(list) => {
            if list.len() != spec.n_l() {
                return Err(Error::Config(format!("{} verbalizers for {} classes", list.len(), spec.n_l())));
            }
            Ok(list.clone())
        }
    }
}

/// Renders an option list and text. Options equal to the stored [`PAD`] are
/// written as `markers.pad`.
pub fn render_options(options: &[String], text: &str, scheme: &IndicatorScheme, markers: &MarkerSet) -> Result<String> {
    let symbols = scheme.symbols(options.len())?;
    let mut out = String::with_capacity(text.len() + options.iter().map(|o| o.len() + 6).sum::<usize>() + 32);
    out.push_str(&markers.cls);
    for (symbol, option) in symbols.iter().zip(options) {
        out.push_str(" (");
        out.push_str(symbol);
        out.push_str(") ");
        out.push_str(if option == PAD { &markers.pad } else { option });
    }
    out.push(' ');
    out.push_str(&markers.sep);
    out.push(' ');
    out.push_str(text);
    out.push(' ');
    out.push_str(&markers.sep);
    Ok(out)
}

pub fn render_tuning(sample: &FspSample, scheme: &IndicatorScheme, markers: &MarkerSet) -> Result<String> {
    render_options(&sample.options, &sample.text, scheme, markers)
}

/// Verbalized classes in class order, then pads up to `n_model`.
pub fn inference_options(spec: &TaskSpec) -> Result<Vec<String>> {
    if spec.n_l() > spec.n_model {
        return Err(Error::TooManyClasses { n_l: spec.n_l(), n_model: spec.n_model });
    }
    let mut options = verbalize(spec)?;
    options.resize(spec.n_model, PAD.to_string());
    Ok(options)
}

pub fn render_inference(text: &str, spec: &TaskSpec, scheme: &IndicatorScheme, markers: &MarkerSet) -> Result<String> {
    render_options(&inference_options(spec)?, text, scheme, markers)
}

/// Inverse of [`render_options`] for `n_options` slots. Pad markers come back
/// as [`PAD`]. Option texts must not contain marker or indicator substrings.
pub fn parse_rendered(
    rendered: &str,
    n_options: usize,
    scheme: &IndicatorScheme,
    markers: &MarkerSet,
) -> Result<(Vec<String>, String)> {
    let symbols = scheme.symbols(n_options)?;
    let sep_mid = format!(" {} ", markers.sep);
    let sep_end = format!(" {}", markers.sep);

    let mut rest = rendered
        .strip_prefix(markers.cls.as_str())
        .ok_or_else(|| Error::Parse("missing leading classification marker".into()))?;
    rest = rest
        .strip_suffix(sep_end.as_str())
        .ok_or_else(|| Error::Parse("missing trailing separator".into()))?;

    let mut options = Vec::with_capacity(n_options);
    for (i, symbol) in symbols.iter().enumerate() {
        let head = format!(" ({symbol}) ");
        rest = rest
            .strip_prefix(head.as_str())
            .ok_or_else(|| Error::Parse(format!("expected indicator `({symbol})` for slot {i}")))?;
        let stop = match symbols.get(i + 1) {
            Some(next) => format!(" ({next}) "),
            None => sep_mid.clone(),
        };
        let end = rest
            .find(stop.as_str())
            .ok_or_else(|| Error::Parse(format!("option {i} is not terminated")))?;
        let option = &rest[..end];
        options.push(if option == markers.pad { PAD.to_string() } else { option.to_string() });
        rest = &rest[end..];
    }
    let text = rest
        .strip_prefix(sep_mid.as_str())
        .ok_or_else(|| Error::Parse("missing separator after options".into()))?;
    Ok((options, text.to_string()))
}
