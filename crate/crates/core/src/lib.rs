//! Mining customer-service chat logs.
//!
//! The crate covers the whole pipeline from raw dyadic chat sessions to
//! dissatisfaction prediction:
//!
//! - [`corpus`]: session data model, JSONL/XML ingest, validation, summary
//!   statistics and a seeded synthetic corpus generator.
//! - [`sentiment`]: tokenizer, lexicon-based valence scorer, four-stage
//!   segmentation and per-stage sentiment dynamics.
//! - [`features`]: the 14-feature session vector and the binary
//!   dissatisfaction label.
//! - [`models`]: majority baseline, logistic regression and an entropy
//!   random forest with k-fold cross-validation and feature importance.
//! - [`textstats`]: n-gram association ranking (chi-squared, Cramér's V),
//!   PMI lexicon expansion and lexicon coverage.
//! - [`cli`]: the batch commands behind the `chatmine` binary, each writing
//!   a reproducibility manifest.

pub mod cli;
pub mod corpus;
mod error;
pub mod features;
pub mod models;
pub mod rng;
pub mod sentiment;
pub mod textstats;

pub use error::{Error, Result};
