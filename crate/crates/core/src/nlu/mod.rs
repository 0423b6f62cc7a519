//! Deterministic intent recognition over a phrase corpus.
//!
//! An utterance is normalised, dictionary entities are pulled out
//! leftmost-longest, each entity span is collapsed to its slot token
//! (`{company}`, `{term}`, `{quantity}`), and the resulting token set is
//! compared against every template by token-set F1. Templates go through the
//! same abstraction when the corpus is compiled, so a template filled with
//! any alias scores exactly 1.0 against itself.

mod corpus;
mod text;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::knowledge::Glossary;
use crate::market_data::CompanyProfile;

pub use corpus::{CompanyEntry, CorpusError, CorpusFile, DEFAULT_CORPUS, DEFAULT_THRESHOLD, MIN_TEMPLATES_PER_INTENT};
pub use text::{normalize, normalize_text, EmptyUtterance, Utterance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Intent {
    StockInformation,
    CompanyProfile,
    News,
    Recommendation,
    TradingTerm,
    PortfolioAdd,
    PortfolioRemove,
    PortfolioShow,
    Greeting,
    Help,
    Fallback,
}

impl Intent {
    /// Every intent except `Fallback`, in tie-break order.
    pub const CLASSIFIABLE: [Intent; 10] = [
        Intent::StockInformation,
        Intent::CompanyProfile,
        Intent::News,
        Intent::Recommendation,
        Intent::TradingTerm,
        Intent::PortfolioAdd,
        Intent::PortfolioRemove,
        Intent::PortfolioShow,
        Intent::Greeting,
        Intent::Help,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Intent::StockInformation => "StockInformation",
            Intent::CompanyProfile => "CompanyProfile",
            Intent::News => "News",
            Intent::Recommendation => "Recommendation",
            Intent::TradingTerm => "TradingTerm",
            Intent::PortfolioAdd => "PortfolioAdd",
            Intent::PortfolioRemove => "PortfolioRemove",
            Intent::PortfolioShow => "PortfolioShow",
            Intent::Greeting => "Greeting",
            Intent::Help => "Help",
            Intent::Fallback => "Fallback",
        }
    }
}

impl fmt::Display for Intent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Intent {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Intent::CLASSIFIABLE
            .into_iter()
            .chain([Intent::Fallback])
            .find(|i| i.name() == s)
            .ok_or_else(|| format!("unknown intent `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum EntityKind {
    Company,
    Term,
    ShareQuantity,
}

impl EntityKind {
    pub fn slot(self) -> &'static str {
        match self {
            EntityKind::Company => "{company}",
            EntityKind::Term => "{term}",
            EntityKind::ShareQuantity => "{quantity}",
        }
    }

    fn from_slot(slot: &str) -> Option<Self> {
        match slot {
            "company" => Some(EntityKind::Company),
            "term" => Some(EntityKind::Term),
            "quantity" => Some(EntityKind::ShareQuantity),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityMatch {
    pub kind: EntityKind,
    pub surface: String,
    /// Ticker, glossary key, or the share count in decimal.
    pub resolved: String,
    /// Token range `[start, end)`.
    pub span: (usize, usize),
}

impl EntityMatch {
    pub fn quantity(&self) -> Option<u64> {
        match self.kind {
            EntityKind::ShareQuantity => self.resolved.parse().ok(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntentMatch {
    pub intent: Intent,
    pub entities: Vec<EntityMatch>,
    pub confidence: f64,
}

impl IntentMatch {
    pub fn first(&self, kind: EntityKind) -> Option<&EntityMatch> {
        self.entities.iter().find(|e| e.kind == kind)
    }

    pub fn company(&self) -> Option<&str> {
        self.first(EntityKind::Company).map(|e| e.resolved.as_str())
    }

    pub fn term(&self) -> Option<&str> {
        self.first(EntityKind::Term).map(|e| e.resolved.as_str())
    }

    pub fn quantity(&self) -> Option<u64> {
        self.first(EntityKind::ShareQuantity).and_then(EntityMatch::quantity)
    }
}

#[derive(Debug, Clone)]
struct Template {
    intent: Intent,
    text: String,
    tokens: BTreeSet<String>,
}

/// A compiled corpus: templates abstracted to slot form plus the entity
/// dictionaries. Immutable once built.
#[derive(Debug, Clone)]
pub struct Nlu {
    threshold: f64,
    templates: Vec<Template>,
    /// Alias (space-joined normalised tokens) → (kind, resolved value).
    dictionary: HashMap<String, (EntityKind, String)>,
    max_alias_len: usize,
    company_names: HashMap<String, String>,
}

const SHARE_WORDS: [&str; 2] = ["share", "shares"];

impl Nlu {
    /// Builds the recogniser from the shipped corpus.
    pub fn with_default_corpus(
        glossary: &Glossary,
        profiles: &[CompanyProfile],
        known_tickers: Option<&[String]>,
    ) -> Result<Self, CorpusError> {
        Self::new(&CorpusFile::parse(DEFAULT_CORPUS)?, glossary, profiles, known_tickers)
    }

    /// Compiles `file`. Term aliases come from the glossary; company aliases
    /// from the corpus plus each profile's name and ticker. When
    /// `known_tickers` is given, companies outside it are dropped.
    pub fn new(
        file: &CorpusFile,
        glossary: &Glossary,
        profiles: &[CompanyProfile],
        known_tickers: Option<&[String]>,
    ) -> Result<Self, CorpusError> {
        let known = |ticker: &str| known_tickers.is_none_or(|k| k.iter().any(|t| t == ticker));

        let mut dictionary = HashMap::new();
        for entry in glossary.entries() {
            for alias in glossary.aliases_of(&entry.key) {
                dictionary.insert(alias, (EntityKind::Term, entry.key.clone()));
            }
        }

        let mut company_names = HashMap::new();
        for profile in profiles.iter().filter(|p| known(&p.ticker)) {
            company_names.insert(profile.ticker.clone(), profile.name.clone());
            for alias in [normalize_text(&profile.name), profile.ticker.to_ascii_lowercase()] {
                if !alias.is_empty() {
                    dictionary.insert(alias, (EntityKind::Company, profile.ticker.clone()));
                }
            }
        }
        for entry in &file.companies {
            let ticker = entry.ticker.trim().to_ascii_uppercase();
            if !known(&ticker) {
                tracing::warn!(%ticker, "corpus company not offered by the market data provider, skipping");
                continue;
            }
            if let Some(name) = &entry.name {
                company_names.insert(ticker.clone(), name.clone());
            }
            let display = company_names
                .entry(ticker.clone())
                .or_insert_with(|| ticker.clone())
                .clone();
            let mut aliases: Vec<String> = entry.aliases.iter().map(|a| normalize_text(a)).collect();
            aliases.push(normalize_text(&display));
            aliases.push(ticker.to_ascii_lowercase());
            aliases.retain(|a| !a.is_empty());
            if aliases.is_empty() {
                return Err(CorpusError::EmptyCompany(ticker));
            }
            for alias in aliases {
                dictionary.insert(alias, (EntityKind::Company, ticker.clone()));
            }
        }
        let max_alias_len = dictionary.keys().map(|k| k.split(' ').count()).max().unwrap_or(0);

        let mut nlu = Nlu {
            threshold: file.threshold,
            templates: Vec::new(),
            dictionary,
            max_alias_len,
            company_names,
        };

        let mut templates: Vec<Template> = Vec::new();
        for (intent, text) in file.templates() {
            let tokens = nlu.compile_template(text)?;
            if let Some(clash) = templates.iter().find(|t| t.tokens == tokens && t.intent != intent) {
                return Err(CorpusError::AmbiguousTemplates {
                    first: clash.text.clone(),
                    first_intent: clash.intent,
                    second: text.to_string(),
                    second_intent: intent,
                });
            }
            templates.push(Template {
                intent,
                text: text.to_string(),
                tokens,
            });
        }
        nlu.templates = templates;
        Ok(nlu)
    }

    fn compile_template(&self, text: &str) -> Result<BTreeSet<String>, CorpusError> {
        let mut tokens = Vec::new();
        for piece in text.split_whitespace() {
            if let Some(slot) = piece.strip_prefix('{').and_then(|p| p.strip_suffix('}')) {
                let kind = EntityKind::from_slot(slot).ok_or_else(|| CorpusError::UnknownSlot {
                    template: text.to_string(),
                    slot: slot.to_string(),
                })?;
                tokens.push(kind.slot().to_string());
            } else {
                tokens.extend(normalize_text(piece).split_whitespace().map(str::to_string));
            }
        }
        if tokens.is_empty() {
            return Err(CorpusError::EmptyTemplate {
                template: text.to_string(),
            });
        }
        let entities = self.extract_from_tokens(&tokens);
        Ok(abstracted(&tokens, &entities))
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Templates as `(intent, text)` in corpus order.
    pub fn templates(&self) -> impl Iterator<Item = (Intent, &str)> {
        self.templates.iter().map(|t| (t.intent, t.text.as_str()))
    }

    /// Display name for a ticker, falling back to the ticker itself.
    pub fn company_name<'a>(&'a self, ticker: &'a str) -> &'a str {
        self.company_names.get(ticker).map_or(ticker, String::as_str)
    }

    /// Aliases registered for `kind`, sorted.
    pub fn aliases(&self, kind: EntityKind) -> Vec<(&str, &str)> {
        let mut out: Vec<(&str, &str)> = self
            .dictionary
            .iter()
            .filter(|(_, (k, _))| *k == kind)
            .map(|(alias, (_, resolved))| (alias.as_str(), resolved.as_str()))
            .collect();
        out.sort();
        out
    }

    pub fn extract_entities(&self, utterance: &Utterance) -> Vec<EntityMatch> {
        self.extract_from_tokens(&utterance.tokens)
    }

    /// Leftmost-longest dictionary matching, then share quantities: a
    /// positive integer directly before `share(s)`, directly after
    /// `share(s)`, or before a company name that is followed by `share(s)`.
    fn extract_from_tokens(&self, tokens: &[String]) -> Vec<EntityMatch> {
        let mut found = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            let longest = (1..=self.max_alias_len.min(tokens.len() - i)).rev().find_map(|len| {
                let key = tokens[i..i + len].join(" ");
                self.dictionary.get(&key).map(|hit| (len, key, hit))
            });
            match longest {
                Some((len, surface, (kind, resolved))) => {
                    found.push(EntityMatch {
                        kind: *kind,
                        surface,
                        resolved: resolved.clone(),
                        span: (i, i + len),
                    });
                    i += len;
                }
                None => i += 1,
            }
        }

        let is_share = |idx: usize| tokens.get(idx).is_some_and(|t| SHARE_WORDS.contains(&t.as_str()));
        let company_at = |idx: usize| {
            found
                .iter()
                .find(|e| e.kind == EntityKind::Company && e.span.0 == idx)
                .map(|e| e.span.1)
        };
        let mut quantities = Vec::new();
        for (idx, token) in tokens.iter().enumerate() {
            if found.iter().any(|e| idx >= e.span.0 && idx < e.span.1) {
                continue;
            }
            let Some(n) = parse_quantity(token) else { continue };
            let adjacent =
                is_share(idx + 1) || (idx > 0 && is_share(idx - 1)) || company_at(idx + 1).is_some_and(&is_share);
            if adjacent {
                quantities.push(EntityMatch {
                    kind: EntityKind::ShareQuantity,
                    surface: token.clone(),
                    resolved: n.to_string(),
                    span: (idx, idx + 1),
                });
            }
        }
        found.extend(quantities);
        found.sort_by_key(|e| e.span);
        found
    }

    /// Scores every template and returns the best intent, or `Fallback` when
    /// the best score is under the threshold. Equal scores resolve to the
    /// intent declared first.
    pub fn classify(&self, utterance: &Utterance) -> IntentMatch {
        let entities = self.extract_entities(utterance);
        let tokens = abstracted(&utterance.tokens, &entities);
        let mut best: Option<(Intent, f64)> = None;
        for template in &self.templates {
            let score = token_set_f1(&tokens, &template.tokens);
            let better = match best {
                None => true,
                Some((intent, top)) => score > top || (score == top && template.intent < intent),
            };
            if better {
                best = Some((template.intent, score));
            }
        }
        let (intent, confidence) = best.unwrap_or((Intent::Fallback, 0.0));
        IntentMatch {
            intent: if confidence >= self.threshold {
                intent
            } else {
                Intent::Fallback
            },
            entities,
            confidence,
        }
    }

    /// Normalises and classifies raw text.
    pub fn understand(&self, raw: &str) -> Result<IntentMatch, EmptyUtterance> {
        Ok(self.classify(&normalize(raw)?))
    }

    /// Two or three follow-up prompts for the intent just answered. Company
    /// names are substituted from the first company entity; without one the
    /// generic starters are offered.
    pub fn suggestions(&self, intent: Intent, entities: &[EntityMatch]) -> Vec<String> {
        let company = entities
            .iter()
            .find(|e| e.kind == EntityKind::Company)
            .map(|e| self.company_name(&e.resolved).to_string());
        let term = entities
            .iter()
            .find(|e| e.kind == EntityKind::Term)
            .map(|e| e.resolved.as_str());

        let with_company = |templates: &[&str]| -> Vec<String> {
            match &company {
                Some(name) => templates.iter().map(|t| t.replace("{X}", name)).collect(),
                None => owned(&STARTERS),
            }
        };
        match intent {
            Intent::StockInformation => {
                with_company(&["Show the company profile for {X}", "Give me a recommendation for {X}"])
            }
            Intent::CompanyProfile => with_company(&[
                "Show me the latest news for {X}",
                "What is the stock price of {X}",
                "Give me a recommendation for {X}",
            ]),
            Intent::News => with_company(&["What is the stock price of {X}", "Give me a recommendation for {X}"]),
            Intent::Recommendation => with_company(&[
                "Add 10 shares of {X} to my portfolio",
                "What is the stock price of {X}",
                "What is RSI",
            ]),
            Intent::TradingTerm => {
                let mut out: Vec<String> = TERM_SUGGESTIONS
                    .iter()
                    .filter(|(key, _)| Some(*key) != term)
                    .take(2)
                    .map(|(_, prompt)| prompt.to_string())
                    .collect();
                out.push("What is the stock price of Apple".into());
                out
            }
            Intent::PortfolioAdd | Intent::PortfolioRemove => match &company {
                Some(name) => vec![
                    "Show my portfolio".into(),
                    format!("Give me a recommendation for {name}"),
                ],
                None => vec!["Show my portfolio".into(), "What is diversification".into()],
            },
            Intent::PortfolioShow => match &company {
                Some(name) => vec![
                    format!("Give me a recommendation for {name}"),
                    "What is diversification".into(),
                ],
                None => vec![
                    "What is diversification".into(),
                    "Show me the latest news for Apple".into(),
                ],
            },
            Intent::Greeting | Intent::Help => owned(&STARTERS),
            Intent::Fallback => owned(&HELP_PROMPTS),
        }
    }
}

const STARTERS: [&str; 3] = [
    "What is a stock",
    "What is the stock price of Facebook",
    "Show me the latest news for Apple",
];

const HELP_PROMPTS: [&str; 2] = ["Help", "What can you do"];

const TERM_SUGGESTIONS: [(&str, &str); 3] = [
    ("dividend", "What is a dividend"),
    ("etf", "What is an ETF"),
    ("short-selling", "What is short selling"),
];

fn owned(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn parse_quantity(token: &str) -> Option<u64> {
    if token.is_empty() || !token.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    token.parse::<u64>().ok().filter(|n| *n > 0)
}

/// Token set with each entity span replaced by its slot token.
fn abstracted(tokens: &[String], entities: &[EntityMatch]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut i = 0;
    let mut spans = entities.iter().peekable();
    while i < tokens.len() {
        match spans.peek() {
            Some(e) if e.span.0 == i => {
                out.insert(e.kind.slot().to_string());
                i = e.span.1;
                spans.next();
            }
            _ => {
                out.insert(tokens[i].clone());
                i += 1;
            }
        }
    }
    out
}

/// `2|A ∩ B| / (|A| + |B|)`.
pub fn token_set_f1(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let overlap = a.intersection(b).count();
    2.0 * overlap as f64 / (a.len() + b.len()) as f64
}
