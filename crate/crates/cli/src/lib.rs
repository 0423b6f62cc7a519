//! Library half of the `stockbabble` binary, so the command behaviour can
//! be exercised in-process by tests.

pub mod analyze;
pub mod render;
pub mod repl;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use stockbabble_core::dialogue::{Engine, Session, Transcript};
use stockbabble_core::knowledge::Glossary;
use stockbabble_core::market_data::MarketData;
use stockbabble_core::portfolio::PortfolioBook;
use stockbabble_core::store::Store;
use stockbabble_core::{Clock, SystemClock};
use thiserror::Error;

pub use stockbabble_service::{resolve_provider, ConfigError};

/// The demo script replayed by `stockbabble demo` without `--script`.
pub const ISABELLE_SCRIPT: &str = include_str!("../data/isabelle.txt");

/// Fixture directory of the source tree, used by `demo` when nothing else
/// is configured.
pub fn bundled_fixtures() -> Option<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/fixtures");
    dir.is_dir().then_some(dir)
}

pub mod exit {
    pub const OK: i32 = 0;
    pub const FALLBACK: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const INSUFFICIENT_DATA: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot open store: {0}")]
    Store(#[from] stockbabble_core::store::StoreError),
    #[error("cannot compile the phrase corpus: {0}")]
    Corpus(#[from] stockbabble_core::nlu::CorpusError),
    #[error("{0}")]
    Usage(String),
}

/// An engine plus a session for one local user.
pub struct LocalChat {
    pub engine: Engine,
    pub session: Session,
}

impl LocalChat {
    /// Uses (or creates, without a password) the local user `username`.
    pub fn open(
        market: Arc<dyn MarketData>,
        store: Arc<Store>,
        clock: Arc<dyn Clock>,
        username: &str,
    ) -> Result<Self, CliError> {
        let user = match store.user_by_name(username) {
            Some(user) => user,
            None => store.create_user(username, None, clock.now())?,
        };
        let book = PortfolioBook::new(store, market.clone(), clock);
        let engine = Engine::new(market, Arc::new(Glossary::shipped()), Some(book))?;
        Ok(Self {
            engine,
            session: Session::new(Some(user.user_id)),
        })
    }

    pub fn in_memory(market: Arc<dyn MarketData>, username: &str) -> Result<Self, CliError> {
        Self::open(market, Arc::new(Store::in_memory()), Arc::new(SystemClock), username)
    }
}

/// Script lines: blank lines and `#` comments are skipped.
pub fn parse_script(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

/// Replays `script` for a fresh in-memory user.
pub fn run_demo(market: Arc<dyn MarketData>, script: &[String]) -> Result<Transcript, CliError> {
    let mut chat = LocalChat::in_memory(market, "isabelle")?;
    chat.engine
        .run_script(&mut chat.session, script)
        .map_err(|e| CliError::Usage(e.to_string()))
}

/// Human-readable transcript.
pub fn render_transcript(transcript: &Transcript) -> String {
    let mut out = String::new();
    for (i, entry) in transcript.entries.iter().enumerate() {
        out.push_str(&format!("{}. you> {}\n", i + 1, entry.utterance));
        out.push_str(&format!("   intent: {}\n", entry.intent));
        for m in &entry.messages {
            out.push_str(&format!("   bot> {m}\n"));
        }
        if !entry.component_kinds.is_empty() {
            out.push_str(&format!("   components: {}\n", entry.component_kinds.join(", ")));
        }
        out.push_str(&format!("   suggestions: {}\n", entry.suggestions.join(" | ")));
    }
    out.push_str(&format!(
        "{} utterances, {} fallbacks\n",
        transcript.entries.len(),
        transcript.fallbacks()
    ));
    out
}
