//! Routes classified utterances to intent handlers and assembles the
//! agent's reply: text, typed UI components and follow-up prompts.

pub mod catalog;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::indicators::{IndicatorError, IndicatorId, IndicatorOutput, IndicatorPoint};
use crate::knowledge::{Glossary, TermEntry};
use crate::market_data::{Candle, CompanyProfile, MarketData, MarketDataError, NewsItem};
use crate::nlu::{normalize, CorpusError, EmptyUtterance, EntityKind, EntityMatch, Intent, IntentMatch, Nlu};
use crate::portfolio::{to_f64, PortfolioBook, PortfolioError, Valuation};
use crate::recommender::{self, RecommendError, Recommendation};

/// Daily bars drawn on a price chart.
pub const CHART_DAYS: usize = 90;
/// Daily bars fetched for indicator computation.
pub const HISTORY_DAYS: usize = 250;
/// Headlines shown in a news timeline.
pub const NEWS_LIMIT: usize = 10;
/// Overlays switched on when a chart is first shown.
pub const DEFAULT_OVERLAYS: [IndicatorId; 1] = [IndicatorId::Sma20];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChartOverlay {
    pub id: IndicatorId,
    pub points: Vec<IndicatorPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelatedTerm {
    pub key: String,
    pub title: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase", rename_all_fields = "camelCase")]
pub enum ComponentPayload {
    Chart {
        ticker: String,
        name: String,
        candles: Vec<Candle>,
        overlays: Vec<ChartOverlay>,
        available_overlays: Vec<IndicatorId>,
        default_visible_overlays: Vec<IndicatorId>,
    },
    NewsTimeline {
        ticker: String,
        items: Vec<NewsItem>,
    },
    ProfileCard {
        profile: CompanyProfile,
    },
    RecommendationGauge {
        recommendation: Recommendation,
        explanation_lines: Vec<String>,
    },
    PortfolioTable {
        valuation: Valuation,
    },
    TermCard {
        entry: TermEntry,
        related: Vec<RelatedTerm>,
    },
    Text {
        title: String,
        lines: Vec<String>,
    },
}

impl ComponentPayload {
    pub fn kind(&self) -> &'static str {
        match self {
            ComponentPayload::Chart { .. } => "chart",
            ComponentPayload::NewsTimeline { .. } => "newsTimeline",
            ComponentPayload::ProfileCard { .. } => "profileCard",
            ComponentPayload::RecommendationGauge { .. } => "recommendationGauge",
            ComponentPayload::PortfolioTable { .. } => "portfolioTable",
            ComponentPayload::TermCard { .. } => "termCard",
            ComponentPayload::Text { .. } => "text",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct UiComponent {
    /// Unique within the session that produced it.
    pub component_id: String,
    #[serde(flatten)]
    pub payload: ComponentPayload,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChatResponse {
    pub messages: Vec<String>,
    pub components: Vec<UiComponent>,
    pub suggestions: Vec<String>,
    /// Tells the client to collapse components from earlier responses.
    pub minimize_previous: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResponseSummary {
    pub component_ids: Vec<String>,
    pub component_kinds: Vec<String>,
    pub suggestions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Turn {
    pub utterance: String,
    pub understood: IntentMatch,
    pub response: ResponseSummary,
}

/// Conversation state for one user.
#[derive(Debug, Clone)]
pub struct Session {
    session_id: String,
    user_id: Option<String>,
    history: Vec<Turn>,
    last_company: Option<String>,
    next_component: u64,
}

impl Session {
    pub fn new(user_id: Option<String>) -> Self {
        Self {
            session_id: uuid::Uuid::new_v4().to_string(),
            user_id,
            history: Vec::new(),
            last_company: None,
            next_component: 1,
        }
    }

    pub fn session_id(&self) -> &str {
        &self.session_id
    }

    pub fn user_id(&self) -> Option<&str> {
        self.user_id.as_deref()
    }

    pub fn history(&self) -> &[Turn] {
        &self.history
    }

    /// Ticker of the most recently mentioned company.
    pub fn last_company(&self) -> Option<&str> {
        self.last_company.as_deref()
    }

    fn component(&mut self, payload: ComponentPayload) -> UiComponent {
        let component_id = format!("c{}", self.next_component);
        self.next_component += 1;
        UiComponent { component_id, payload }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TranscriptEntry {
    pub utterance: String,
    pub intent: Intent,
    pub messages: Vec<String>,
    pub component_kinds: Vec<String>,
    pub suggestions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Transcript {
    pub entries: Vec<TranscriptEntry>,
}

impl Transcript {
    pub fn intents(&self) -> Vec<Intent> {
        self.entries.iter().map(|e| e.intent).collect()
    }

    pub fn fallbacks(&self) -> usize {
        self.entries.iter().filter(|e| e.intent == Intent::Fallback).count()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScriptError {
    #[error("script has no utterances")]
    Empty,
}

/// What a handler produced before ids and suggestions are attached.
#[derive(Default)]
struct Reply {
    messages: Vec<String>,
    components: Vec<ComponentPayload>,
}

impl Reply {
    fn text(message: String) -> Self {
        Self {
            messages: vec![message],
            components: Vec::new(),
        }
    }
}

#[derive(Debug, Error)]
enum HandlerError {
    #[error(transparent)]
    Market(#[from] MarketDataError),
    #[error(transparent)]
    Indicator(#[from] IndicatorError),
    #[error(transparent)]
    Recommend(#[from] RecommendError),
    #[error(transparent)]
    Portfolio(#[from] PortfolioError),
}

/// The dialogue engine. Immutable and shareable across sessions.
pub struct Engine {
    nlu: Nlu,
    glossary: Arc<Glossary>,
    market: Arc<dyn MarketData>,
    portfolio: Option<PortfolioBook>,
}

impl Engine {
    /// Compiles the shipped corpus against the provider's companies.
    pub fn new(
        market: Arc<dyn MarketData>,
        glossary: Arc<Glossary>,
        portfolio: Option<PortfolioBook>,
    ) -> Result<Self, CorpusError> {
        let profiles = market.known_profiles();
        let tickers = market.tickers();
        let nlu = Nlu::with_default_corpus(&glossary, &profiles, tickers.as_deref())?;
        Ok(Self::with_nlu(nlu, market, glossary, portfolio))
    }

    pub fn with_nlu(
        nlu: Nlu,
        market: Arc<dyn MarketData>,
        glossary: Arc<Glossary>,
        portfolio: Option<PortfolioBook>,
    ) -> Self {
        Self {
            nlu,
            glossary,
            market,
            portfolio,
        }
    }

    pub fn nlu(&self) -> &Nlu {
        &self.nlu
    }

    pub fn market(&self) -> &Arc<dyn MarketData> {
        &self.market
    }

    pub fn portfolio(&self) -> Option<&PortfolioBook> {
        self.portfolio.as_ref()
    }

    /// Understands `raw`, runs the matching handler and records the turn.
    pub fn handle(&self, session: &mut Session, raw: &str) -> Result<ChatResponse, EmptyUtterance> {
        let utterance = normalize(raw)?;
        let understood = self.nlu.classify(&utterance);
        let reply = match self.dispatch(session, &understood, &utterance.tokens) {
            Ok(reply) => reply,
            Err(e) => {
                tracing::debug!(intent = %understood.intent, error = %e, "handler failed");
                Reply::text(apology(&e))
            }
        };

        if let Some(ticker) = understood.company() {
            session.last_company = Some(ticker.to_string());
        }
        let mut entities = understood.entities.clone();
        if !entities.iter().any(|e| e.kind == EntityKind::Company) {
            if let Some(ticker) = &session.last_company {
                entities.push(EntityMatch {
                    kind: EntityKind::Company,
                    surface: String::new(),
                    resolved: ticker.clone(),
                    span: (0, 0),
                });
            }
        }
        let suggestions = self.nlu.suggestions(understood.intent, &entities);
        let components: Vec<UiComponent> = reply.components.into_iter().map(|p| session.component(p)).collect();
        let response = ChatResponse {
            messages: reply.messages,
            minimize_previous: !components.is_empty(),
            components,
            suggestions,
        };
        session.history.push(Turn {
            utterance: raw.to_string(),
            understood,
            response: ResponseSummary {
                component_ids: response.components.iter().map(|c| c.component_id.clone()).collect(),
                component_kinds: response
                    .components
                    .iter()
                    .map(|c| c.payload.kind().to_string())
                    .collect(),
                suggestions: response.suggestions.clone(),
            },
        });
        Ok(response)
    }

    /// Replays `script` through [`Engine::handle`]. Blank utterances are
    /// recorded as fallbacks.
    pub fn run_script<S: AsRef<str>>(&self, session: &mut Session, script: &[S]) -> Result<Transcript, ScriptError> {
        if script.is_empty() {
            return Err(ScriptError::Empty);
        }
        let entries = script
            .iter()
            .map(|line| {
                let line = line.as_ref();
                match self.handle(session, line) {
                    Ok(response) => TranscriptEntry {
                        utterance: line.to_string(),
                        intent: session.history.last().expect("turn recorded").understood.intent,
                        messages: response.messages,
                        component_kinds: response
                            .components
                            .iter()
                            .map(|c| c.payload.kind().to_string())
                            .collect(),
                        suggestions: response.suggestions,
                    },
                    Err(EmptyUtterance) => TranscriptEntry {
                        utterance: line.to_string(),
                        intent: Intent::Fallback,
                        messages: vec![catalog::empty_utterance()],
                        component_kinds: Vec::new(),
                        suggestions: self.nlu.suggestions(Intent::Fallback, &[]),
                    },
                }
            })
            .collect();
        Ok(Transcript { entries })
    }

    fn dispatch(&self, session: &Session, understood: &IntentMatch, tokens: &[String]) -> Result<Reply, HandlerError> {
        let company = understood.company();
        match understood.intent {
            Intent::Greeting => Ok(Reply::text(catalog::greeting())),
            Intent::Help => Ok(Reply {
                messages: vec![catalog::help_intro()],
                components: vec![ComponentPayload::Text {
                    title: "What I can do".into(),
                    lines: catalog::help_lines(),
                }],
            }),
            Intent::Fallback => Ok(Reply::text(catalog::fallback())),
            Intent::TradingTerm => Ok(self.trading_term(understood.term())),
            Intent::StockInformation => self.with_company(company, |t| self.stock_information(t)),
            Intent::CompanyProfile => self.with_company(company, |t| self.company_profile(t, tokens)),
            Intent::News => self.with_company(company, |t| self.news(t)),
            Intent::Recommendation => self.with_company(company, |t| self.recommendation(t)),
            Intent::PortfolioShow => self.with_user(session, |book, user| self.portfolio_show(book, user)),
            Intent::PortfolioAdd => self.with_user(session, |book, user| {
                self.with_company(company, |t| match understood.quantity() {
                    Some(shares) => self.portfolio_add(book, user, t, shares),
                    None => Ok(Reply::text(catalog::which_quantity(self.nlu.company_name(t)))),
                })
            }),
            Intent::PortfolioRemove => self.with_user(session, |book, user| {
                self.with_company(company, |t| self.portfolio_remove(book, user, t, understood.quantity()))
            }),
        }
    }

    fn with_company(
        &self,
        company: Option<&str>,
        f: impl FnOnce(&str) -> Result<Reply, HandlerError>,
    ) -> Result<Reply, HandlerError> {
        match company {
            Some(ticker) => f(ticker),
            None => Ok(Reply::text(catalog::which_company())),
        }
    }

    fn with_user(
        &self,
        session: &Session,
        f: impl FnOnce(&PortfolioBook, &str) -> Result<Reply, HandlerError>,
    ) -> Result<Reply, HandlerError> {
        match (&self.portfolio, session.user_id()) {
            (Some(book), Some(user)) => f(book, user),
            _ => Ok(Reply::text(catalog::needs_user())),
        }
    }

    fn stock_information(&self, ticker: &str) -> Result<Reply, HandlerError> {
        let name = self.nlu.company_name(ticker).to_string();
        let quote = self.market.quote(ticker)?;
        let history = self.market.candles(ticker, HISTORY_DAYS)?;
        let shown = history.tail(CHART_DAYS);
        let from = shown.candles()[0].timestamp;
        let overlays = IndicatorId::ALL
            .into_iter()
            .filter_map(|id| IndicatorOutput::compute(id, &history).ok())
            .map(|out| {
                let out = out.since(from);
                ChartOverlay {
                    id: out.id,
                    points: out.series,
                }
            })
            .collect();
        Ok(Reply {
            messages: vec![catalog::quote(&name, &quote)],
            components: vec![ComponentPayload::Chart {
                ticker: quote.ticker.clone(),
                name,
                candles: shown.candles().to_vec(),
                overlays,
                available_overlays: IndicatorId::ALL.to_vec(),
                default_visible_overlays: DEFAULT_OVERLAYS.to_vec(),
            }],
        })
    }

    fn company_profile(&self, ticker: &str, tokens: &[String]) -> Result<Reply, HandlerError> {
        let profile = self.market.profile(ticker)?;
        let asks = |words: &[&str]| tokens.iter().any(|t| words.contains(&t.as_str()));
        let mut messages = Vec::new();
        if asks(&["ceo", "boss", "chief", "runs"]) {
            messages.push(catalog::ceo(&profile));
        }
        if asks(&[
            "headquarters",
            "headquartered",
            "hq",
            "office",
            "located",
            "based",
            "where",
        ]) {
            messages.push(catalog::headquarters(&profile));
        }
        if asks(&["dividend", "dividends"]) {
            messages.push(catalog::dividend(&profile));
        }
        if messages.is_empty() {
            messages.push(catalog::profile(&profile));
        }
        Ok(Reply {
            messages,
            components: vec![ComponentPayload::ProfileCard { profile }],
        })
    }

    fn news(&self, ticker: &str) -> Result<Reply, HandlerError> {
        let name = self.nlu.company_name(ticker);
        let items = self.market.news(ticker, NEWS_LIMIT)?;
        if items.is_empty() {
            return Ok(Reply::text(catalog::no_news(name)));
        }
        Ok(Reply {
            messages: vec![catalog::news(name, items.len())],
            components: vec![ComponentPayload::NewsTimeline {
                ticker: ticker.to_string(),
                items,
            }],
        })
    }

    fn recommendation(&self, ticker: &str) -> Result<Reply, HandlerError> {
        let name = self.nlu.company_name(ticker);
        let series = self.market.candles(ticker, HISTORY_DAYS)?;
        let rec = match recommender::recommend(ticker, &series) {
            Ok(rec) => rec,
            Err(RecommendError::Indicator(IndicatorError::InsufficientData {
                indicator,
                required,
                available,
            })) => {
                return Ok(Reply::text(catalog::insufficient_history(
                    name,
                    indicator.name(),
                    required,
                    available,
                )))
            }
            Err(e) => return Err(e.into()),
        };
        Ok(Reply {
            messages: vec![catalog::recommendation(name, &rec)],
            components: vec![ComponentPayload::RecommendationGauge {
                explanation_lines: recommender::explain(&rec),
                recommendation: rec,
            }],
        })
    }

    fn trading_term(&self, term: Option<&str>) -> Reply {
        let Some(entry) = term.and_then(|t| self.glossary.lookup_term(t).ok()) else {
            return Reply::text(catalog::unknown_term());
        };
        let related = self
            .glossary
            .related_terms(&entry.key)
            .unwrap_or_default()
            .into_iter()
            .map(|r| RelatedTerm {
                key: r.key.clone(),
                title: r.title.clone(),
            })
            .collect();
        Reply {
            messages: vec![catalog::term(&entry.title, &entry.definition)],
            components: vec![ComponentPayload::TermCard {
                entry: entry.clone(),
                related,
            }],
        }
    }

    fn portfolio_show(&self, book: &PortfolioBook, user: &str) -> Result<Reply, HandlerError> {
        let valuation = book.value_portfolio(user)?;
        Ok(Reply {
            messages: vec![catalog::portfolio_summary(
                valuation.per_position.len(),
                to_f64(valuation.total_value),
                to_f64(valuation.total_pnl_abs),
            )],
            components: vec![ComponentPayload::PortfolioTable { valuation }],
        })
    }

    fn portfolio_add(
        &self,
        book: &PortfolioBook,
        user: &str,
        ticker: &str,
        shares: u64,
    ) -> Result<Reply, HandlerError> {
        let name = self.nlu.company_name(ticker).to_string();
        let price = self.market.quote(ticker)?.price;
        let portfolio = book.add_position(user, ticker, shares)?;
        let held = portfolio.positions.get(ticker).map_or(0, |p| p.shares);
        let mut reply = self.portfolio_show(book, user)?;
        reply.messages = vec![catalog::added(&name, shares, price, held)];
        Ok(reply)
    }

    fn portfolio_remove(
        &self,
        book: &PortfolioBook,
        user: &str,
        ticker: &str,
        shares: Option<u64>,
    ) -> Result<Reply, HandlerError> {
        let name = self.nlu.company_name(ticker).to_string();
        let held = book.portfolio(user)?.positions.get(ticker).map_or(0, |p| p.shares);
        if held == 0 {
            return Ok(Reply::text(catalog::not_held(&name)));
        }
        let shares = shares.unwrap_or(held);
        let portfolio = book.remove_position(user, ticker, shares)?;
        let remaining = portfolio.positions.get(ticker).map_or(0, |p| p.shares);
        let mut reply = self.portfolio_show(book, user)?;
        reply.messages = vec![catalog::removed(&name, shares, remaining)];
        Ok(reply)
    }
}

fn apology(error: &HandlerError) -> String {
    match error {
        HandlerError::Market(e) | HandlerError::Portfolio(PortfolioError::MarketData(e)) => market_apology(e),
        HandlerError::Portfolio(PortfolioError::UnknownTicker(_)) => catalog::unknown_company(),
        HandlerError::Portfolio(PortfolioError::InvalidQuantity(reason)) => catalog::invalid_quantity(reason),
        HandlerError::Portfolio(PortfolioError::UnknownPosition(ticker)) => catalog::not_held(ticker),
        HandlerError::Portfolio(PortfolioError::UnknownUser(_)) => catalog::needs_user(),
        HandlerError::Indicator(IndicatorError::InsufficientData {
            indicator,
            required,
            available,
        })
        | HandlerError::Recommend(RecommendError::Indicator(IndicatorError::InsufficientData {
            indicator,
            required,
            available,
        })) => catalog::insufficient_history("this company", indicator.name(), *required, *available),
        _ => catalog::internal_error(),
    }
}

fn market_apology(error: &MarketDataError) -> String {
    match error {
        MarketDataError::UnknownTicker(_) => catalog::unknown_company(),
        MarketDataError::EmptySeries(ticker) => catalog::no_price_data(ticker),
        MarketDataError::ProviderUnavailable { .. } => catalog::provider_unavailable(),
        _ => catalog::internal_error(),
    }
}
