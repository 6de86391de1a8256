//! Text-classification and coordination-graph toolkit for Reddit-style corpora.
//!
//! The crate is organized around the stages of the analysis pipeline:
//!
//! - [`corpus`] — post/comment data model, JSONL parsing, keyword lexicon,
//!   and candidate-selection filters
//! - [`features`] — tokenization, TF-IDF and hashed sparse features, shingles
//! - [`classifiers`] — linear models (Naive Bayes, logistic regression,
//!   linear SVM), external-score import, and versioned model persistence
//! - [`pipeline`] — staged sarcasm/bullying scoring and quadrant verdicts
//! - [`netgraph`] — bipartite author–subreddit graphs, coordination signals,
//!   cluster detection, and graph export
//! - [`eval`] — dataset splitting, classification metrics, model comparison
//! - [`synth`] — deterministic synthetic corpora and datasets for fixtures
//!   and benchmarks
//!
//! Batch operations run data-parallel on rayon by default; building with
//! `--no-default-features` (disabling the `parallel` feature) compiles a
//! sequential fallback with identical outputs.

pub mod classifiers;
pub mod corpus;
pub mod eval;
pub mod features;
pub mod netgraph;
pub mod par;
pub mod pipeline;
pub mod synth;
