//! Collection of Reddit-style corpora over the public JSON endpoints.
//!
//! The client is generic over an [`HttpTransport`] and a [`Clock`] so every
//! network behavior (pagination, retries, rate limiting, resume) is testable
//! against recorded fixture responses and a fake clock. [`harvest`] drives
//! the client keyword by keyword and emits files the corpus module parses
//! strictly.

mod client;
mod harvest;
mod transport;

pub use client::{CommentTree, RedditClient, SearchPage};
pub use harvest::{
    harvest, Checkpoint, CorpusSink, HarvestConfig, HarvestManifest, JsonlSink, KeywordProgress,
    KeywordStats, MemorySink,
};
pub use transport::{
    Clock, FakeClock, FixtureTransport, HttpResponse, HttpTransport, SystemClock, UreqTransport,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CollectorError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("GET {url} failed with status {status}")]
    Http { url: String, status: u16 },
    #[error("GET {url} failed: {reason}")]
    Transport { url: String, reason: String },
    #[error("unusable response from {url}: {reason}")]
    Malformed { url: String, reason: String },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Corpus(#[from] barbnet_core::corpus::CorpusError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
