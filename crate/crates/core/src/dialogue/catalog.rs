//! Every piece of agent prose in one place.

use crate::market_data::{CompanyProfile, Quote};
use crate::recommender::{fmt_num, Recommendation};

pub fn greeting() -> String {
    "Hi, I'm StockBabble. Ask me about stock prices, company profiles, news, recommendations or trading terms.".into()
}

pub fn help_intro() -> String {
    "Here is what I can help with:".into()
}

pub fn help_lines() -> Vec<String> {
    [
        "Stock prices with an interactive chart: \"What is the stock price of Apple\"",
        "Company profiles: \"Show the company profile for Amazon\"",
        "Latest news: \"Show me the latest news for Tesla\"",
        "Buy/sell recommendations from six indicators: \"Give me a recommendation for Facebook\"",
        "Trading terms explained: \"What is a dividend\"",
        "A simulated portfolio: \"Add 10 shares of Apple to my portfolio\", \"Show my portfolio\"",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

pub fn fallback() -> String {
    "Sorry, I didn't understand that. Try asking about a company's stock price or a trading term.".into()
}

pub fn empty_utterance() -> String {
    "Sorry, I didn't catch anything there.".into()
}

pub fn which_company() -> String {
    "Which company do you mean? Try naming one, for example Apple or Amazon.".into()
}

pub fn unknown_company() -> String {
    "Sorry, I don't recognise that company.".into()
}

pub fn unknown_term() -> String {
    "Sorry, I don't know that term yet.".into()
}

pub fn provider_unavailable() -> String {
    "Sorry, I can't reach the market data service right now. Please try again shortly.".into()
}

pub fn no_price_data(name: &str) -> String {
    format!("Sorry, I have no recent price data for {name}.")
}

pub fn insufficient_history(name: &str, indicator: &str, required: usize, available: usize) -> String {
    format!(
        "Sorry, there isn't enough price history for {name} to compute {indicator} ({required} bars needed, {available} available)."
    )
}

pub fn quote(name: &str, quote: &Quote) -> String {
    format!(
        "{name} ({}) last traded at {} on {}.",
        quote.ticker,
        fmt_num(quote.price),
        quote.as_of.format("%Y-%m-%d")
    )
}

pub fn profile(profile: &CompanyProfile) -> String {
    format!("Here is the company profile for {}.", profile.name)
}

pub fn ceo(profile: &CompanyProfile) -> String {
    if profile.ceo.is_empty() {
        format!("I don't have a CEO on record for {}.", profile.name)
    } else {
        format!("The CEO of {} is {}.", profile.name, profile.ceo)
    }
}

pub fn headquarters(profile: &CompanyProfile) -> String {
    if profile.headquarters.is_empty() {
        format!("I don't know where {} is headquartered.", profile.name)
    } else {
        format!("{} is headquartered in {}.", profile.name, profile.headquarters)
    }
}

pub fn dividend(profile: &CompanyProfile) -> String {
    if !profile.dividend_reported {
        format!("{} has not reported an annual dividend.", profile.name)
    } else if profile.annual_dividend == 0.0 {
        format!("{} does not pay a dividend.", profile.name)
    } else {
        format!(
            "{} pays an annual dividend of {} per share.",
            profile.name,
            fmt_num(profile.annual_dividend)
        )
    }
}

pub fn news(name: &str, count: usize) -> String {
    format!("Here are the {count} latest headlines for {name}, newest first.")
}

pub fn no_news(name: &str) -> String {
    format!("I couldn't find any recent news for {name}.")
}

pub fn recommendation(name: &str, rec: &Recommendation) -> String {
    format!(
        "My overall recommendation for {name} is {} (score {:+}). Open the explanation to see each indicator.",
        rec.label, rec.score
    )
}

pub fn term(title: &str, definition: &str) -> String {
    format!("{title}: {definition}")
}

pub fn needs_user() -> String {
    "Portfolio features need a signed-in user.".into()
}

pub fn which_quantity(name: &str) -> String {
    format!("How many shares of {name} should I add? Try \"Add 10 shares of {name} to my portfolio\".")
}

pub fn added(name: &str, shares: u64, price: f64, held: u64) -> String {
    format!(
        "Added {shares} {} of {name} at {} each. You now hold {held} {}.",
        plural(shares),
        fmt_num(price),
        plural(held)
    )
}

pub fn removed(name: &str, shares: u64, held: u64) -> String {
    if held == 0 {
        format!("Removed {shares} {} of {name}; the position is closed.", plural(shares))
    } else {
        format!(
            "Removed {shares} {} of {name}. You now hold {held} {}.",
            plural(shares),
            plural(held)
        )
    }
}

pub fn not_held(name: &str) -> String {
    format!("You don't hold any {name} shares.")
}

pub fn invalid_quantity(reason: &str) -> String {
    format!("Sorry, I can't do that: {reason}.")
}

pub fn portfolio_summary(positions: usize, total_value: f64, pnl: f64) -> String {
    if positions == 0 {
        "Your portfolio is empty. Try \"Add 10 shares of Apple to my portfolio\".".into()
    } else {
        format!(
            "Your portfolio holds {positions} {} worth {} in total ({}{} overall).",
            if positions == 1 { "position" } else { "positions" },
            fmt_num(total_value),
            if pnl >= 0.0 { "+" } else { "" },
            fmt_num(pnl)
        )
    }
}

pub fn internal_error() -> String {
    "Sorry, something went wrong while answering that.".into()
}

fn plural(n: u64) -> &'static str {
    if n == 1 {
        "share"
    } else {
        "shares"
    }
}
