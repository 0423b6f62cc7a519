use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("utterance is empty")]
pub struct EmptyUtterance;

/// A user message with its normalised form and tokens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utterance {
    pub raw: String,
    pub normalized: String,
    pub tokens: Vec<String>,
}

/// Lowercases, drops apostrophes and slashes (`what's` → `whats`,
/// `p/e` → `pe`), turns every other non-alphanumeric character into a
/// space, and collapses whitespace.
pub fn normalize_text(raw: &str) -> String {
    let mut cleaned = String::with_capacity(raw.len());
    for ch in raw.chars() {
        match ch {
            '\'' | '’' | '‘' | '`' | '/' => {}
            c if c.is_alphanumeric() => cleaned.extend(c.to_lowercase()),
            _ => cleaned.push(' '),
        }
    }
    cleaned.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn normalize(raw: &str) -> Result<Utterance, EmptyUtterance> {
    let normalized = normalize_text(raw);
    if normalized.is_empty() {
        return Err(EmptyUtterance);
    }
    let tokens = normalized.split(' ').map(str::to_string).collect();
    Ok(Utterance {
        raw: raw.to_string(),
        normalized,
        tokens,
    })
}
