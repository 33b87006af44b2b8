//! Detection toolkit for malicious short URLs.
//!
//! The pipeline mirrors how a URL shortener's abuse data is actually
//! analyzed: ingest link/encoder/click records ([`model`]), enrich them with
//! WHOIS data and blacklist verdicts ([`enrich`]), derive a seven-feature
//! representation ([`features`]), train and evaluate classifiers
//! ([`learn`], [`eval`]), and run account-level abuse forensics
//! ([`forensics`]). A seeded synthetic generator ([`synth`]) produces
//! ground-truth-labeled datasets so the whole pipeline is exercisable
//! offline.
//!
//! Everything is deterministic: all randomness flows from explicit seeds and
//! results are independent of worker-thread count.

pub mod enrich;
mod error;
pub mod eval;
pub mod features;
pub mod forensics;
pub mod learn;
pub mod model;
pub mod parallel;
pub mod synth;

pub use error::{Error, Result};

/// Default RNG seed used anywhere a seed is not given explicitly.
/// Never derived from the clock; reruns must reproduce outputs byte for byte.
pub const DEFAULT_SEED: u64 = 42;
