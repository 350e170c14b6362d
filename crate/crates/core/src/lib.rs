//! Quality analysis for state-partitioned FAQ corpora.
//!
//! The pipeline loads and deduplicates a Q&A corpus, then scores each state
//! on readability, extractive-summary relevance, topic quality, sentiment,
//! and question specificity, and composes the normalized components into
//! voter and developer quality indices with leader/laggard classification.

pub mod corpus;
pub mod error;
pub mod fiqs;
pub mod readability;
pub mod report;
pub mod sentiment;
pub mod specificity;
pub mod state;
pub mod summarize;
pub mod text;
pub mod topics;

pub use corpus::{FaqCorpus, FaqEntry, Scope};
pub use error::{Error, Result};
pub use state::UsState;
