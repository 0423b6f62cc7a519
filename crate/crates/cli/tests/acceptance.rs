//! Acceptance run: one PASS/FAIL line per primary criterion.
//!
//! Every check runs in-process against the shipped fixtures except the demo,
//! which launches the built `stockbabble` binary. No web client is involved.

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use chrono::{DateTime, TimeZone, Utc};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rust_decimal::Decimal;
use serde_json::{json, Value};
use stockbabble_cli::LocalChat;
use stockbabble_core::dialogue::Engine;
use stockbabble_core::indicators::{self, IndicatorId, MACD_FAST, MACD_SIGNAL, MACD_SLOW, RSI_PERIOD, STO_D, STO_K};
use stockbabble_core::knowledge::Glossary;
use stockbabble_core::market_data::{
    load_fixtures, CandleSeries, CompanyProfile, MarketData, MarketDataError, NewsItem, Quote,
};
use stockbabble_core::nlu::{Intent, Nlu};
use stockbabble_core::portfolio::{to_f64, PortfolioBook, PortfolioError};
use stockbabble_core::recommender::{IndicatorSignal, Label, Recommendation, Signal};
use stockbabble_core::store::Store;
use stockbabble_core::ManualClock;
use stockbabble_service::{router, AppState};
use stockbabble_testkit::{oracle, series};
use tower::ServiceExt;

type Outcome = Result<String, String>;
type Check<'a> = (&'static str, Box<dyn FnOnce() -> Outcome + 'a>);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)+));
        }
    };
}

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixtures() -> PathBuf {
    root().join("data/fixtures")
}

fn market() -> Arc<dyn MarketData> {
    Arc::new(load_fixtures(fixtures()).expect("shipped fixtures load"))
}

fn t0() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2021, 7, 1, 9, 0, 0).unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> Result<f64, String> {
    ensure!(a.len() == b.len(), "length {} vs {}", a.len(), b.len());
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

fn indicator_oracles() -> Outcome {
    let start = Instant::now();
    let mut rng = series::rng(7);
    let mut worst = 0.0f64;
    for case in 0..1000 {
        let len = 35 + (case * 104_729) % 266;
        let bars = series::random_bars(&mut rng, len);
        let h: Vec<f64> = bars.iter().map(|b| b.1).collect();
        let l: Vec<f64> = bars.iter().map(|b| b.2).collect();
        let c: Vec<f64> = bars.iter().map(|b| b.3).collect();
        let err = |e: indicators::ComputeError| format!("case {case}: {e}");
        for period in [20, 50] {
            if len >= period {
                worst = worst.max(max_diff(
                    &indicators::sma(&c, period).map_err(err)?,
                    &oracle::sma(&c, period),
                )?);
                worst = worst.max(max_diff(
                    &indicators::ema(&c, period).map_err(err)?,
                    &oracle::ema(&c, period),
                )?);
            }
        }
        worst = worst.max(max_diff(
            &indicators::rsi(&c, RSI_PERIOD).map_err(err)?,
            &oracle::rsi(&c, RSI_PERIOD),
        )?);
        let macd = indicators::macd(&c, MACD_FAST, MACD_SLOW, MACD_SIGNAL).map_err(err)?;
        let want = oracle::macd(&c, MACD_FAST, MACD_SLOW, MACD_SIGNAL);
        ensure!(macd.len() == want.len(), "case {case}: macd length");
        for (p, w) in macd.iter().zip(&want) {
            worst = worst.max(max_diff(&[p.macd_line, p.signal_line, p.histogram], &[w.0, w.1, w.2])?);
        }
        let sto = indicators::stochastic(&h, &l, &c, STO_K, STO_D).map_err(err)?;
        let hlc: Vec<(f64, f64, f64)> = bars.iter().map(|b| (b.1, b.2, b.3)).collect();
        let want = oracle::stochastic(&hlc, STO_K, STO_D);
        ensure!(sto.len() == want.len(), "case {case}: sto length");
        for (p, w) in sto.iter().zip(&want) {
            worst = worst.max(max_diff(&[p.k, p.d], &[w.0, w.1])?);
        }
        ensure!(worst <= 1e-9, "case {case}: max |diff| {worst:e}");
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    Ok(format!(
        "1000 series, max |diff| {worst:.1e}, {:.2}s",
        elapsed.as_secs_f64()
    ))
}

fn bars_strategy() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    (35usize..300, any::<u64>()).prop_map(|(len, seed)| {
        let mut rng = series::rng(seed);
        series::random_bars(&mut rng, len)
            .into_iter()
            .map(|b| (b.1, b.2, b.3))
            .collect()
    })
}

fn hlc(bars: &[(f64, f64, f64)]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    (
        bars.iter().map(|b| b.0).collect(),
        bars.iter().map(|b| b.1).collect(),
        bars.iter().map(|b| b.2).collect(),
    )
}

fn runner() -> TestRunner {
    TestRunner::new(Config {
        cases: 500,
        failure_persistence: None,
        ..Config::default()
    })
}

fn indicator_invariants() -> Outcome {
    let close = |a: f64, b: f64, scale: f64| (a - b).abs() <= 1e-9 * scale.abs().max(1.0);
    let mut properties = Vec::new();

    runner()
        .run(&bars_strategy(), |bars| {
            let (h, l, c) = hlc(&bars);
            for v in indicators::rsi(&c, RSI_PERIOD).unwrap() {
                prop_assert!((0.0..=100.0).contains(&v), "rsi {}", v);
            }
            for p in indicators::stochastic(&h, &l, &c, STO_K, STO_D).unwrap() {
                prop_assert!((0.0..=100.0).contains(&p.k) && (0.0..=100.0).contains(&p.d));
            }
            Ok(())
        })
        .map_err(|e| format!("range: {e}"))?;
    properties.push("range");

    runner()
        .run(&(0.01f64..10_000.0, 35usize..300), |(value, len)| {
            let c = vec![value; len];
            for v in indicators::sma(&c, 20)
                .unwrap()
                .into_iter()
                .chain(indicators::ema(&c, 20).unwrap())
            {
                prop_assert_eq!(v, value);
            }
            for v in indicators::rsi(&c, RSI_PERIOD).unwrap() {
                prop_assert_eq!(v, 50.0);
            }
            for p in indicators::macd(&c, MACD_FAST, MACD_SLOW, MACD_SIGNAL).unwrap() {
                prop_assert_eq!((p.macd_line, p.signal_line, p.histogram), (0.0, 0.0, 0.0));
            }
            for p in indicators::stochastic(&c, &c, &c, STO_K, STO_D).unwrap() {
                prop_assert_eq!((p.k, p.d), (50.0, 50.0));
            }
            Ok(())
        })
        .map_err(|e| format!("constant series: {e}"))?;
    properties.push("constant");

    runner()
        .run(
            &(bars_strategy(), -100.0f64..100.0, 0.1f64..10.0),
            |(bars, shift, scale)| {
                let (_, _, c) = hlc(&bars);
                let moved: Vec<f64> = c.iter().map(|x| x * scale + shift).collect();
                for (a, b) in indicators::sma(&c, 20)
                    .unwrap()
                    .iter()
                    .zip(indicators::sma(&moved, 20).unwrap())
                {
                    prop_assert!(close(a * scale + shift, b, b), "sma {} vs {}", a, b);
                }
                for (a, b) in indicators::ema(&c, 20)
                    .unwrap()
                    .iter()
                    .zip(indicators::ema(&moved, 20).unwrap())
                {
                    prop_assert!(close(a * scale + shift, b, b), "ema {} vs {}", a, b);
                }
                Ok(())
            },
        )
        .map_err(|e| format!("average equivariance: {e}"))?;
    properties.push("average equivariance");

    runner()
        .run(
            &(bars_strategy(), 0.0f64..100.0, 0.1f64..10.0),
            |(bars, shift, scale)| {
                let (h, l, c) = hlc(&bars);
                let tf = |xs: &[f64]| -> Vec<f64> { xs.iter().map(|x| x * scale + shift).collect() };
                let (h2, l2, c2) = (tf(&h), tf(&l), tf(&c));
                for (a, b) in indicators::rsi(&c, RSI_PERIOD)
                    .unwrap()
                    .iter()
                    .zip(indicators::rsi(&c2, RSI_PERIOD).unwrap())
                {
                    prop_assert!((a - b).abs() <= 1e-6, "rsi {} vs {}", a, b);
                }
                let sto_a = indicators::stochastic(&h, &l, &c, STO_K, STO_D).unwrap();
                let sto_b = indicators::stochastic(&h2, &l2, &c2, STO_K, STO_D).unwrap();
                for (a, b) in sto_a.iter().zip(&sto_b) {
                    prop_assert!((a.k - b.k).abs() <= 1e-6 && (a.d - b.d).abs() <= 1e-6);
                }
                let peak = c2.iter().cloned().fold(0.0, f64::max);
                let m_a = indicators::macd(&c, MACD_FAST, MACD_SLOW, MACD_SIGNAL).unwrap();
                let m_b = indicators::macd(&c2, MACD_FAST, MACD_SLOW, MACD_SIGNAL).unwrap();
                for (a, b) in m_a.iter().zip(&m_b) {
                    prop_assert!(close(a.macd_line * scale, b.macd_line, peak * 1e3));
                    prop_assert!(close(a.signal_line * scale, b.signal_line, peak * 1e3));
                }
                Ok(())
            },
        )
        .map_err(|e| format!("oscillator invariance: {e}"))?;
    properties.push("oscillator invariance");

    Ok(format!(
        "{} properties x 500 cases ({})",
        properties.len(),
        properties.join(", ")
    ))
}

fn signal(v: i8) -> Signal {
    match v {
        1 => Signal::Buy,
        -1 => Signal::Sell,
        _ => Signal::Neutral,
    }
}

fn recommend(combo: &[i8; 6]) -> Recommendation {
    let signals = IndicatorId::ALL
        .iter()
        .zip(combo)
        .map(|(id, v)| IndicatorSignal {
            id: *id,
            signal: signal(*v),
            evidence: "synthetic".into(),
        })
        .collect();
    Recommendation::from_signals("TEST", t0(), signals)
}

fn recommendation_map() -> Outcome {
    let combos = oracle::all_signal_combinations();
    ensure!(combos.len() == 729, "{} combinations", combos.len());
    let rank = |l: Label| Label::ALL.iter().position(|x| *x == l).unwrap();
    let mut by_score = Vec::new();
    for combo in &combos {
        let rec = recommend(combo);
        let score: i32 = combo.iter().map(|v| i32::from(*v)).sum();
        ensure!(rec.score == score, "{combo:?}: score {} vs {score}", rec.score);
        let name = serde_json::to_value(rec.label)
            .unwrap()
            .as_str()
            .unwrap_or_default()
            .to_lowercase();
        let want = oracle::label_for_score(score).to_lowercase();
        ensure!(name == want, "{combo:?}: {name} vs {want}");
        let mirror = recommend(&combo.map(|v| -v));
        ensure!(
            mirror.label == rec.label.mirrored(),
            "{combo:?}: flipping does not mirror"
        );
        by_score.push((score, rank(rec.label)));
    }
    by_score.sort();
    let ascending = by_score.windows(2).all(|w| w[0].1 <= w[1].1);
    let descending = by_score.windows(2).all(|w| w[0].1 >= w[1].1);
    ensure!(ascending || descending, "labels not monotone in score");
    Ok("729/729 match, monotone, antisymmetric".into())
}

fn engine(market: Arc<dyn MarketData>) -> Result<Engine, String> {
    Engine::new(market, Arc::new(Glossary::shipped()), None).map_err(|e| e.to_string())
}

fn nlu_self_consistency(nlu: &Nlu) -> Outcome {
    let mut templates = 0;
    for (intent, template) in nlu.templates() {
        let filled = template
            .replace("{company}", "apple")
            .replace("{term}", "dividend")
            .replace("{quantity}", "10");
        let m = nlu.understand(&filled).map_err(|e| e.to_string())?;
        ensure!(
            m.intent == intent && m.confidence == 1.0,
            "{filled:?}: {} at {}",
            m.intent,
            m.confidence
        );
        templates += 1;
    }

    let paraphrases = include_str!("../../core/tests/fixtures/paraphrases.tsv");
    let (mut total, mut correct) = (0, 0);
    for line in paraphrases
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
    {
        let (label, text) = line
            .split_once('\t')
            .ok_or_else(|| format!("bad fixture line {line:?}"))?;
        let expected: Intent = label.parse().map_err(|_| format!("unknown intent {label}"))?;
        total += 1;
        if nlu.understand(text).map(|m| m.intent) == Ok(expected) {
            correct += 1;
        }
    }
    ensure!(total >= 50, "only {total} paraphrases");
    let accuracy = f64::from(correct) / f64::from(total);
    ensure!(accuracy >= 0.8, "paraphrase accuracy {accuracy:.3}");

    for (text, intent) in [
        ("What's the price of Amazon today?", Intent::StockInformation),
        ("Who is the CEO of Facebook", Intent::CompanyProfile),
        ("what stocks are", Intent::TradingTerm),
    ] {
        let got = nlu.understand(text).map_err(|e| e.to_string())?.intent;
        ensure!(got == intent, "{text:?} -> {got}, expected {intent}");
    }
    Ok(format!(
        "{templates} templates at 1.0, paraphrases {correct}/{total}, 3/3 quoted"
    ))
}

fn suggestion_contract(market: Arc<dyn MarketData>) -> Outcome {
    let engine = engine(market)?;
    let mut checked = 0;
    for name in ["Apple", "Facebook", "Amazon", "Tesla", "Microsoft"] {
        for text in [
            format!("What is the stock price of {name}"),
            format!("What's the price of {name} today?"),
        ] {
            let m = engine.nlu().understand(&text).map_err(|e| e.to_string())?;
            ensure!(m.intent == Intent::StockInformation, "{text:?} -> {}", m.intent);
            let want = [
                format!("Show the company profile for {name}"),
                format!("Give me a recommendation for {name}"),
            ];
            let got = engine.nlu().suggestions(m.intent, &m.entities);
            ensure!(got == want, "{text:?}: {got:?}");
            let mut session = stockbabble_core::dialogue::Session::new(None);
            let response = engine.handle(&mut session, &text).map_err(|e| e.to_string())?;
            ensure!(
                response.suggestions == want,
                "{text:?} response: {:?}",
                response.suggestions
            );
            checked += 1;
        }
    }
    Ok(format!("{checked} price questions, exact two follow-ups"))
}

fn end_to_end_demo() -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_stockbabble"))
        .args(["demo", "--json", "--fixtures"])
        .arg(fixtures())
        .env_remove("STOCKBABBLE_FIXTURES")
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure!(
        out.status.code() == Some(0),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    ensure!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    let got: Value = serde_json::from_slice(&out.stdout).map_err(|e| format!("transcript is not JSON: {e}"))?;
    let golden =
        std::fs::read_to_string(root().join("crates/cli/tests/golden/isabelle.json")).map_err(|e| e.to_string())?;
    let want: Value = serde_json::from_str(&golden).map_err(|e| e.to_string())?;
    let entries = got["entries"].as_array().cloned().unwrap_or_default();
    let fallbacks = entries.iter().filter(|e| e["intent"] == "Fallback").count();
    ensure!(fallbacks == 0, "{fallbacks} fallbacks");
    ensure!(got == want, "transcript differs from golden file");
    Ok(format!(
        "{} turns, 0 fallbacks, golden match, {:.2}s",
        entries.len(),
        elapsed.as_secs_f64()
    ))
}

#[derive(Default)]
struct Board(Mutex<HashMap<String, f64>>);

impl Board {
    fn set(&self, ticker: &str, price: f64) {
        self.0.lock().unwrap().insert(ticker.into(), price);
    }
}

impl MarketData for Board {
    fn candles(&self, ticker: &str, _: usize) -> stockbabble_core::market_data::Result<CandleSeries> {
        Err(MarketDataError::EmptySeries(ticker.into()))
    }
    fn quote(&self, ticker: &str) -> stockbabble_core::market_data::Result<Quote> {
        let t = ticker.to_uppercase();
        let price = *self
            .0
            .lock()
            .unwrap()
            .get(&t)
            .ok_or(MarketDataError::UnknownTicker(t.clone()))?;
        Ok(Quote {
            ticker: t,
            price,
            as_of: t0(),
        })
    }
    fn profile(&self, ticker: &str) -> stockbabble_core::market_data::Result<CompanyProfile> {
        Err(MarketDataError::UnknownTicker(ticker.into()))
    }
    fn news(&self, _: &str, _: usize) -> stockbabble_core::market_data::Result<Vec<NewsItem>> {
        Ok(Vec::new())
    }
    fn describe(&self) -> String {
        "board".into()
    }
}

fn near(label: &str, got: Decimal, want: f64) -> Result<(), String> {
    let got = to_f64(got);
    ensure!((got - want).abs() <= 1e-9, "{label}: {got} vs {want}");
    Ok(())
}

fn portfolio_arithmetic(dir: &Path) -> Outcome {
    let path = dir.join("portfolio-store.json");
    let store = Arc::new(Store::open(&path).map_err(|e| e.to_string())?);
    let board = Arc::new(Board::default());
    let user = store
        .create_user("isabelle", None, t0())
        .map_err(|e| e.to_string())?
        .user_id;
    let book = PortfolioBook::new(store, board.clone(), Arc::new(ManualClock::new(t0())));
    let e = |e: PortfolioError| e.to_string();

    board.set("ACME", 50.0);
    let p = book.add_position(&user, "ACME", 10).map_err(e)?;
    near("buy 10 @ 50", p.positions["ACME"].cost_basis, 500.0)?;
    board.set("ACME", 60.0);
    let p = book.add_position(&user, "ACME", 5).map_err(e)?;
    ensure!(p.positions["ACME"].shares == 15, "merge shares");
    near("merge 5 @ 60", p.positions["ACME"].cost_basis, 800.0)?;
    ensure!(
        book.remove_position(&user, "ACME", 20).is_err(),
        "over-removal accepted"
    );
    let p = book.remove_position(&user, "ACME", 5).map_err(e)?;
    near("sell 5 of 15", p.positions["ACME"].cost_basis, 1600.0 / 3.0)?;
    board.set("ACME", 55.0);
    let v = book.value_portfolio(&user).map_err(e)?;
    near("market value", v.total_value, 550.0)?;
    near("pnl", v.total_pnl_abs, 550.0 - 1600.0 / 3.0)?;
    near("pnl pct", v.total_pnl_pct, (550.0 - 1600.0 / 3.0) / (1600.0 / 3.0))?;
    let p = book.remove_position(&user, "ACME", 10).map_err(e)?;
    ensure!(p.positions.is_empty(), "full sale leaves a position");

    board.set("AAPL", 133.11);
    book.add_position(&user, "AAPL", 7).map_err(e)?;
    let before = book.portfolio(&user).map_err(e)?;
    for shares in [1, 3, 11, 1000] {
        book.add_position(&user, "AAPL", shares).map_err(e)?;
        let after = book.remove_position(&user, "AAPL", shares).map_err(e)?;
        ensure!(after.positions == before.positions, "add/remove {shares} changed state");
    }

    let bytes = std::fs::read(&path).map_err(|e| e.to_string())?;
    drop(book);
    let reopened = Store::open(&path).map_err(|e| e.to_string())?;
    ensure!(
        reopened.snapshot().encode() == bytes,
        "store not byte-identical after reopen"
    );
    let p = reopened.portfolio(&user).map_err(|e| e.to_string())?;
    ensure!(p.positions == before.positions, "reopened portfolio differs");
    Ok("merge/remove/valuation exact, round trips restore, store stable".into())
}

fn schema(name: &str) -> Result<jsonschema::JSONSchema, String> {
    let path = root().join(format!("docs/schemas/{name}.schema.json"));
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| format!("{name}: {e}"))?;
    jsonschema::JSONSchema::options()
        .should_validate_formats(true)
        .compile(&value)
        .map_err(|e| format!("{name}: {e}"))
}

fn validate(name: &str, instance: &Value) -> Result<(), String> {
    let compiled = schema(name)?;
    let messages: Vec<String> = match compiled.validate(instance) {
        Ok(()) => return Ok(()),
        Err(errors) => errors.map(|e| format!("{e} at {}", e.instance_path)).collect(),
    };
    Err(format!("{name}: {}", messages.join("; ")))
}

async fn call(app: &Router, method: Method, path: &str, auth: Option<&str>, body: &str) -> (StatusCode, Value) {
    let mut request = Request::builder()
        .method(method)
        .uri(path)
        .header("content-type", "application/json");
    if let Some(auth) = auth {
        request = request.header("authorization", auth);
    }
    let response = app
        .clone()
        .oneshot(request.body(Body::from(body.to_string())).unwrap())
        .await
        .unwrap();
    let status = response.status();
    let bytes = axum::body::to_bytes(response.into_body(), usize::MAX).await.unwrap();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

const CONVERSATION: [&str; 12] = [
    "hello",
    "What is the stock price of Apple",
    "Who is the CEO of Facebook",
    "Show me the latest news for Tesla",
    "Give me a recommendation for Amazon",
    "What is a dividend",
    "Add 10 shares of Apple to my portfolio",
    "Sell 4 shares of Apple",
    "Show my portfolio",
    "help",
    "qwzx plorf",
    "What is the price of Unobtainium",
];

async fn api_conformance(dir: &Path) -> Outcome {
    let market = market();
    let clock = Arc::new(ManualClock::new(t0()));
    let store = Arc::new(Store::open(dir.join("api-store.json")).map_err(|e| e.to_string())?);
    let state = Arc::new(AppState::new(market.clone(), store, clock.clone()).map_err(|e| e.to_string())?);
    let app = router(state);
    let mut validated = 0;

    let (status, body) = call(&app, Method::GET, "/api/health", None, "").await;
    ensure!(status == StatusCode::OK, "health {status}");
    validate("health-response", &body)?;
    let creds = json!({"username": "isabelle", "password": "correct horse"}).to_string();
    let (status, body) = call(&app, Method::POST, "/api/register", None, &creds).await;
    ensure!(status == StatusCode::CREATED, "register {status}");
    validate("register-response", &body)?;
    let (status, body) = call(&app, Method::POST, "/api/login", None, &creds).await;
    ensure!(status == StatusCode::OK, "login {status}");
    validate("login-response", &body)?;
    validated += 3;
    let bearer = format!("Bearer {}", body["token"].as_str().unwrap_or_default());

    let mut local = LocalChat::open(
        market,
        Arc::new(Store::open(dir.join("repl-store.json")).map_err(|e| e.to_string())?),
        clock,
        "isabelle",
    )
    .map_err(|e| e.to_string())?;
    let mut kinds = HashSet::new();
    for text in CONVERSATION {
        let (status, http) = call(
            &app,
            Method::POST,
            "/api/message",
            Some(&bearer),
            &json!({ "text": text }).to_string(),
        )
        .await;
        ensure!(status == StatusCode::OK, "{text:?}: {status} {http}");
        validate("chat-response", &http)?;
        validated += 1;
        let repl = local
            .engine
            .handle(&mut local.session, text)
            .map_err(|e| e.to_string())?;
        let repl: Value = serde_json::to_string(&repl)
            .and_then(|text| serde_json::from_str(&text))
            .map_err(|e| e.to_string())?;
        ensure!(repl == http, "{text:?}: REPL and HTTP responses differ");
        for c in http["components"].as_array().into_iter().flatten() {
            kinds.insert(c["kind"].as_str().unwrap_or_default().to_string());
        }
    }
    ensure!(kinds.len() == 7, "component kinds seen: {kinds:?}");

    let (status, body) = call(&app, Method::GET, "/api/portfolio", Some(&bearer), "").await;
    ensure!(status == StatusCode::OK, "portfolio {status}");
    validate("valuation", &body)?;
    validated += 1;

    let mut unauthorized = HashSet::new();
    for auth in [
        None,
        Some("Bearer"),
        Some("Bearer 0123"),
        Some("Basic abc"),
        Some("Bearer ffffffffffffffffffffffffffffffff"),
    ] {
        for (method, path, payload) in [
            (Method::POST, "/api/message", r#"{"text":"hi"}"#),
            (Method::GET, "/api/portfolio", ""),
        ] {
            let (status, body) = call(&app, method, path, auth, payload).await;
            ensure!(status == StatusCode::UNAUTHORIZED, "{path} with {auth:?}: {status}");
            validate("error", &body)?;
            validated += 1;
            unauthorized.insert(body.to_string());
        }
    }
    ensure!(unauthorized.len() == 1, "401 bodies differ: {unauthorized:?}");
    let wrong = call(
        &app,
        Method::POST,
        "/api/login",
        None,
        r#"{"username":"isabelle","password":"incorrect horse"}"#,
    )
    .await;
    let unknown = call(
        &app,
        Method::POST,
        "/api/login",
        None,
        r#"{"username":"nobody","password":"incorrect horse"}"#,
    )
    .await;
    ensure!(
        wrong == unknown && wrong.0 == StatusCode::UNAUTHORIZED,
        "login rejections differ"
    );

    for (method, path, auth, payload) in [
        (Method::POST, "/api/register", None, "{"),
        (Method::POST, "/api/register", None, creds.as_str()),
        (
            Method::POST,
            "/api/register",
            None,
            r#"{"username":"x","password":"short"}"#,
        ),
        (Method::POST, "/api/message", Some(bearer.as_str()), r#"{"text":"  "}"#),
        (Method::POST, "/api/message", Some(bearer.as_str()), r#"{"txt":"hi"}"#),
        (Method::GET, "/api/nothing", None, ""),
    ] {
        let (status, body) = call(&app, method, path, auth, payload).await;
        ensure!(status.is_client_error(), "{path} {payload:?}: {status}");
        validate("error", &body)?;
        validated += 1;
    }

    Ok(format!(
        "{validated} responses valid, 7 component kinds, {} turns REPL == HTTP, uniform 401s",
        CONVERSATION.len()
    ))
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temp dir");
    let runtime = tokio::runtime::Runtime::new().expect("tokio runtime");
    let market = market();
    let nlu_engine = engine(market.clone());

    let checks: Vec<Check> = vec![
        ("indicator oracle equivalence", Box::new(indicator_oracles)),
        ("indicator invariants", Box::new(indicator_invariants)),
        ("recommendation map", Box::new(recommendation_map)),
        (
            "NLU self-consistency",
            Box::new(move || nlu_engine.and_then(|engine| nlu_self_consistency(engine.nlu()))),
        ),
        ("suggestion contract", Box::new(move || suggestion_contract(market))),
        ("end-to-end demo", Box::new(end_to_end_demo)),
        ("portfolio arithmetic", Box::new(|| portfolio_arithmetic(dir.path()))),
        (
            "API conformance",
            Box::new(|| runtime.block_on(api_conformance(dir.path()))),
        ),
    ];

    let mut failures = 0;
    for (name, check) in checks {
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            Err(format!(
                "panicked: {:?}",
                panic
                    .downcast_ref::<String>()
                    .map(String::as_str)
                    .or(panic.downcast_ref::<&str>().copied())
            ))
        });
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(reason) => {
                failures += 1;
                println!("FAIL  {name}: {reason}");
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
