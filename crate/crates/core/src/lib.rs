//! Text characteristics for dataset fragments, and analysis tools that relate
//! them to per-example model outcomes.
//!
//! The crate is organised along the workflow it supports:
//!
//! 1. [`corpus`] reads a dataset and extracts named text fragments per record.
//! 2. [`pipeline`] turns each fragment into a [`pipeline::DocumentAnalysis`]
//!    (paragraphs, sentences, tagged and lemmatized tokens).
//! 3. [`metrics`] computes the registered characteristics over every fragment,
//!    backed by the word tables in [`lexicons`].
//! 4. [`analysis`] joins characteristics with outcomes and fits summaries,
//!    correlations, bucket curves, logistic regressions and random forests.
//! 5. [`report`] renders the results as SVG charts and a JSON/HTML bundle.

#![forbid(unsafe_code)]

pub mod analysis;
pub mod corpus;
pub mod error;
pub mod lexicons;
pub mod metrics;
pub mod pipeline;
pub mod report;
mod stats;
pub mod synth;

pub use error::{Error, Result};
