//! Engine for a conversational stock-market assistant.
//!
//! The crate is organised the way a question flows through the system:
//! [`nlu`] turns text into an [`nlu::IntentMatch`], [`dialogue`] routes it to
//! a handler that pulls from [`market_data`], [`indicators`],
//! [`recommender`], [`knowledge`] and [`portfolio`], and the result comes
//! back as a [`dialogue::ChatResponse`].

pub mod clock;
pub mod dialogue;
pub mod indicators;
pub mod knowledge;
pub mod market_data;
pub mod nlu;
pub mod portfolio;
pub mod recommender;
pub mod store;

pub use clock::{Clock, ManualClock, SystemClock};
