use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use super::Intent;

/// The shipped corpus, compiled into the binary.
pub const DEFAULT_CORPUS: &str = include_str!("../../data/corpus.toml");

pub const DEFAULT_THRESHOLD: f64 = 0.55;
pub const MIN_TEMPLATES_PER_INTENT: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CorpusError {
    #[error("corpus is not valid TOML: {0}")]
    Parse(String),
    #[error("unknown intent `{0}` in corpus")]
    UnknownIntent(String),
    #[error("intent {intent:?} has {found} templates, at least {MIN_TEMPLATES_PER_INTENT} required")]
    TooFewTemplates { intent: Intent, found: usize },
    #[error("template `{template}` uses unknown slot `{slot}`")]
    UnknownSlot { template: String, slot: String },
    #[error("template `{template}` has no words")]
    EmptyTemplate { template: String },
    #[error("templates `{first}` ({first_intent:?}) and `{second}` ({second_intent:?}) are indistinguishable")]
    AmbiguousTemplates {
        first: String,
        first_intent: Intent,
        second: String,
        second_intent: Intent,
    },
    #[error("confidence threshold {0} outside (0, 1]")]
    BadThreshold(f64),
    #[error("company entry `{0}` has no usable alias")]
    EmptyCompany(String),
}

/// On-disk corpus document.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusFile {
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    pub intents: BTreeMap<String, Vec<String>>,
    #[serde(default, rename = "company")]
    pub companies: Vec<CompanyEntry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompanyEntry {
    pub ticker: String,
    /// Display name; falls back to the market-data profile name.
    pub name: Option<String>,
    #[serde(default)]
    pub aliases: Vec<String>,
}

fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}

impl CorpusFile {
    pub fn parse(text: &str) -> Result<Self, CorpusError> {
        let file: CorpusFile = toml::from_str(text).map_err(|e| CorpusError::Parse(e.to_string()))?;
        if !(file.threshold > 0.0 && file.threshold <= 1.0) {
            return Err(CorpusError::BadThreshold(file.threshold));
        }
        for name in file.intents.keys() {
            let intent: Intent = name.parse().map_err(|_| CorpusError::UnknownIntent(name.clone()))?;
            if intent == Intent::Fallback {
                return Err(CorpusError::UnknownIntent(name.clone()));
            }
        }
        for intent in Intent::CLASSIFIABLE {
            let found = file.intents.get(intent.name()).map_or(0, Vec::len);
            if found < MIN_TEMPLATES_PER_INTENT {
                return Err(CorpusError::TooFewTemplates { intent, found });
            }
        }
        Ok(file)
    }

    pub fn templates(&self) -> impl Iterator<Item = (Intent, &str)> {
        Intent::CLASSIFIABLE.into_iter().flat_map(move |intent| {
            self.intents
                .get(intent.name())
                .into_iter()
                .flatten()
                .map(move |t| (intent, t.as_str()))
        })
    }
}
