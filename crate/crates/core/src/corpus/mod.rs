//! Corpus ingestion, score conventions and the cache-backed runner.

pub mod adapters;
pub mod cache;
pub mod manifest;
pub mod runner;

pub use cache::{content_hash, fingerprint, MeasureCache, MeasureCacheEntry, CACHE_DIR_ENV};
pub use manifest::{load_manifest, parse_manifest, write_manifest, CorpusRecord, Dataset};
pub use runner::{run_corpus, CorpusRun, Outcome, RunRow, RunStats};
