use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use stockbabble_cli::analyze::{self, AnalyzeError};
use stockbabble_cli::repl::Repl;
use stockbabble_cli::{bundled_fixtures, exit, parse_script, render_transcript, run_demo, LocalChat, ISABELLE_SCRIPT};
use stockbabble_core::market_data::MarketData;
use stockbabble_core::store::Store;
use stockbabble_core::SystemClock;
use stockbabble_service::config::{FIXTURES_ENV, STORE_ENV};
use stockbabble_service::{resolve_provider, AppState, ConfigError, ServiceConfig};

#[derive(Parser)]
#[command(name = "stockbabble", version, about = "Conversational stock-market assistant")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP API.
    Serve {
        #[arg(long)]
        port: Option<u16>,
        /// Fixture directory (candles/, profiles.json, news.json).
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// Store file.
        #[arg(long)]
        store: Option<PathBuf>,
    },
    /// Chat in the terminal.
    Repl {
        /// Local user whose portfolio is used; created if missing.
        #[arg(long, default_value = "local")]
        user: String,
        #[arg(long)]
        fixtures: Option<PathBuf>,
        #[arg(long)]
        store: Option<PathBuf>,
    },
    /// Replay a scripted conversation; exits 1 if any line fell back.
    Demo {
        /// One utterance per line; `#` starts a comment.
        #[arg(long)]
        script: Option<PathBuf>,
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// Print the transcript as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Compute the six indicators and a recommendation from a candles CSV.
    Analyze {
        #[arg(long)]
        csv: PathBuf,
        /// Ticker to report; defaults to the file name.
        #[arg(long)]
        ticker: Option<String>,
        /// Print the recommendation as JSON.
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Serve { port, fixtures, store } => serve(port, fixtures, store),
        Command::Repl { user, fixtures, store } => repl(&user, fixtures, store),
        Command::Demo { script, fixtures, json } => demo(script.as_deref(), fixtures, json),
        Command::Analyze { csv, ticker, json } => analyze_cmd(&csv, ticker, json),
    };
    ExitCode::from(code as u8)
}

fn fail(message: impl std::fmt::Display) -> i32 {
    eprintln!("stockbabble: {message}");
    exit::USAGE
}

fn env(key: &str) -> Option<String> {
    std::env::var(key).ok()
}

fn fixtures_or_env(flag: Option<PathBuf>) -> Option<PathBuf> {
    flag.or_else(|| env(FIXTURES_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
}

fn init_logging() {
    let filter = tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into());
    let _ = tracing_subscriber::fmt()
        .with_env_filter(filter)
        .with_writer(std::io::stderr)
        .try_init();
}

fn serve(port: Option<u16>, fixtures: Option<PathBuf>, store: Option<PathBuf>) -> i32 {
    init_logging();
    let config = match ServiceConfig::resolve(port, store, fixtures, env) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let market = match resolve_provider(config.fixtures.as_deref()) {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    let store = match Store::open(&config.store) {
        Ok(s) => Arc::new(s),
        Err(e) => return fail(format!("cannot open store {}: {e}", config.store.display())),
    };
    let state = match AppState::new(market.clone(), store, Arc::new(SystemClock)) {
        Ok(s) => Arc::new(s),
        Err(e) => return fail(e),
    };
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    runtime.block_on(async move {
        let listener = match tokio::net::TcpListener::bind(("0.0.0.0", config.port)).await {
            Ok(l) => l,
            Err(e) => return fail(format!("cannot listen on port {}: {e}", config.port)),
        };
        let port = listener.local_addr().map(|a| a.port()).unwrap_or(config.port);
        println!(
            "stockbabble listening on http://0.0.0.0:{port} (provider: {}; store: {})",
            market.describe(),
            config.store.display()
        );
        let _ = std::io::stdout().flush();
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        match stockbabble_service::serve(listener, state, shutdown).await {
            Ok(()) => exit::OK,
            Err(e) => fail(e),
        }
    })
}

fn repl(user: &str, fixtures: Option<PathBuf>, store: Option<PathBuf>) -> i32 {
    let market = match resolve_provider(fixtures_or_env(fixtures).as_deref()) {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    let path = store
        .or_else(|| env(STORE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(stockbabble_service::config::DEFAULT_STORE));
    let store = match Store::open(&path) {
        Ok(s) => Arc::new(s),
        Err(e) => return fail(format!("cannot open store {}: {e}", path.display())),
    };
    let chat = match LocalChat::open(market, store, Arc::new(SystemClock), user) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let stdin = std::io::stdin();
    match Repl::new(chat).run(stdin.lock(), std::io::stdout().lock()) {
        Ok(()) => exit::OK,
        Err(e) => fail(e),
    }
}

fn demo_provider(fixtures: Option<PathBuf>) -> Result<Arc<dyn MarketData>, ConfigError> {
    match resolve_provider(fixtures_or_env(fixtures).as_deref()) {
        Err(ConfigError::NoProvider) => match bundled_fixtures() {
            Some(dir) => resolve_provider(Some(&dir)),
            None => Err(ConfigError::NoProvider),
        },
        other => other,
    }
}

fn demo(script: Option<&Path>, fixtures: Option<PathBuf>, json: bool) -> i32 {
    let text = match script {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return fail(format!("cannot read script {}: {e}", path.display())),
        },
        None => ISABELLE_SCRIPT.to_string(),
    };
    let lines = parse_script(&text);
    let market = match demo_provider(fixtures) {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    let transcript = match run_demo(market, &lines) {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&transcript).expect("transcript serialises")
        );
    } else {
        print!("{}", render_transcript(&transcript));
    }
    if transcript.fallbacks() > 0 {
        eprintln!("stockbabble: {} utterance(s) fell back", transcript.fallbacks());
        exit::FALLBACK
    } else {
        exit::OK
    }
}

fn analyze_cmd(csv: &Path, ticker: Option<String>, json: bool) -> i32 {
    let text = match std::fs::read_to_string(csv) {
        Ok(t) => t,
        Err(e) => return fail(format!("cannot read {}: {e}", csv.display())),
    };
    let ticker = ticker.unwrap_or_else(|| {
        csv.file_stem()
            .map(|s| s.to_string_lossy().to_uppercase())
            .unwrap_or_else(|| "CSV".into())
    });
    match analyze::analyze_csv(&ticker, &text) {
        Ok(analysis) => {
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&analysis.recommendation).expect("recommendation serialises")
                );
            } else {
                print!("{}", analyze::render(&analysis));
            }
            exit::OK
        }
        Err(e @ AnalyzeError::Insufficient { .. }) => {
            eprintln!("stockbabble: {e}");
            exit::INSUFFICIENT_DATA
        }
        Err(e) => fail(e),
    }
}
