//! Trading-term glossary.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nlu::normalize_text;

pub const DEFAULT_GLOSSARY: &str = include_str!("../data/glossary.toml");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermEntry {
    pub key: String,
    pub title: String,
    #[serde(default)]
    pub aliases: Vec<String>,
    pub definition: String,
    #[serde(default)]
    pub related: Vec<String>,
    #[serde(default)]
    pub tags: Vec<String>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GlossaryError {
    #[error("glossary is not valid TOML: {0}")]
    Parse(String),
    #[error("unknown term `{0}`")]
    UnknownTerm(String),
    #[error("duplicate term key `{0}`")]
    DuplicateKey(String),
    #[error("alias `{alias}` claimed by both `{first}` and `{second}`")]
    DuplicateAlias {
        alias: String,
        first: String,
        second: String,
    },
    #[error("term `{key}` relates to missing term `{related}`")]
    DanglingRelated { key: String, related: String },
    #[error("term `{0}` lists itself as related")]
    SelfReference(String),
    #[error("term `{0}` has an empty key, title or definition")]
    Incomplete(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GlossaryFile {
    #[serde(default)]
    term: Vec<TermEntry>,
}

#[derive(Debug, Clone)]
pub struct Glossary {
    entries: Vec<TermEntry>,
    by_key: HashMap<String, usize>,
    by_alias: HashMap<String, usize>,
}

impl Glossary {
    pub fn shipped() -> Self {
        Self::parse(DEFAULT_GLOSSARY).expect("shipped glossary is valid")
    }

    pub fn parse(text: &str) -> Result<Self, GlossaryError> {
        let file: GlossaryFile = toml::from_str(text).map_err(|e| GlossaryError::Parse(e.to_string()))?;
        Self::from_entries(file.term)
    }

    pub fn from_entries(entries: Vec<TermEntry>) -> Result<Self, GlossaryError> {
        let mut by_key = HashMap::new();
        for (i, entry) in entries.iter().enumerate() {
            if entry.key.trim().is_empty() || entry.title.trim().is_empty() || entry.definition.trim().is_empty() {
                return Err(GlossaryError::Incomplete(entry.key.clone()));
            }
            if by_key.insert(entry.key.clone(), i).is_some() {
                return Err(GlossaryError::DuplicateKey(entry.key.clone()));
            }
        }
        for entry in &entries {
            for related in &entry.related {
                if related == &entry.key {
                    return Err(GlossaryError::SelfReference(entry.key.clone()));
                }
                if !by_key.contains_key(related) {
                    return Err(GlossaryError::DanglingRelated {
                        key: entry.key.clone(),
                        related: related.clone(),
                    });
                }
            }
        }

        let mut glossary = Glossary {
            entries,
            by_key,
            by_alias: HashMap::new(),
        };
        let mut by_alias: HashMap<String, usize> = HashMap::new();
        for (i, entry) in glossary.entries.iter().enumerate() {
            for alias in glossary.aliases_of(&entry.key) {
                if let Some(&other) = by_alias.get(&alias) {
                    if other != i {
                        return Err(GlossaryError::DuplicateAlias {
                            alias,
                            first: glossary.entries[other].key.clone(),
                            second: entry.key.clone(),
                        });
                    }
                }
                by_alias.insert(alias, i);
            }
        }
        glossary.by_alias = by_alias;
        Ok(glossary)
    }

    pub fn entries(&self) -> &[TermEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Normalised surface forms that resolve to `key`: the key with dashes
    /// read as spaces, the title, and every declared alias.
    pub fn aliases_of(&self, key: &str) -> Vec<String> {
        let Some(entry) = self.by_key.get(key).map(|&i| &self.entries[i]) else {
            return Vec::new();
        };
        let mut out = BTreeSet::new();
        out.insert(normalize_text(&entry.key.replace('-', " ")));
        out.insert(normalize_text(&entry.title));
        // "Relative Strength Index (RSI)" also answers to the bare name.
        if let Some((bare, _)) = entry.title.split_once('(') {
            out.insert(normalize_text(bare));
        }
        for alias in &entry.aliases {
            out.insert(normalize_text(alias));
        }
        out.retain(|a| !a.is_empty());
        out.into_iter().collect()
    }

    /// Resolves a key or alias, ignoring case and punctuation.
    pub fn lookup_term(&self, query: &str) -> Result<&TermEntry, GlossaryError> {
        self.by_key
            .get(query)
            .or_else(|| self.by_alias.get(&normalize_text(query)))
            .map(|&i| &self.entries[i])
            .ok_or_else(|| GlossaryError::UnknownTerm(query.to_string()))
    }

    /// Related entries in declared order, without duplicates.
    pub fn related_terms(&self, query: &str) -> Result<Vec<&TermEntry>, GlossaryError> {
        let entry = self.lookup_term(query)?;
        let mut seen = BTreeSet::new();
        Ok(entry
            .related
            .iter()
            .filter(|k| seen.insert(k.as_str()))
            .filter_map(|k| self.by_key.get(k).map(|&i| &self.entries[i]))
            .collect())
    }

    /// Related links declared on one side only, as `(from, to)` pairs.
    pub fn one_way_links(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for entry in &self.entries {
            for related in &entry.related {
                let back = self.by_key.get(related).map(|&i| &self.entries[i]);
                if back.is_some_and(|b| !b.related.contains(&entry.key)) {
                    out.push((entry.key.clone(), related.clone()));
                }
            }
        }
        out
    }
}
