//! Sampling-based gender-bias evaluation for machine translation.
//!
//! The crate consumes Monte-Carlo translation samples (texts, sequence
//! log-probabilities, sentence embeddings, pairwise entailment scores and
//! focus-noun gender labels) and turns them into uncertainty and bias
//! measurements:
//!
//! - [`metrics`]: Shannon, semantic, similarity-sensitive and gender entropies
//!   with their per-sample surprisals.
//! - [`bias`]: relative surprisal, contrast-normalised entropy and relative
//!   entropy, plus the instance model (cue annotations, contrast sets, name
//!   augmentation).
//! - [`stats`]: Welch t-tests, single-effect cue analysis, rank correlations,
//!   quality binning and model rankings.
//! - [`dataset`]: the on-disk corpus format, loaders and the corpus validator.
//! - [`pipeline`]: the staged `compute` / `analyze` / `report` driver used by
//!   the `mtbias` command-line tool.
//!
//! Batch work runs on rayon when the `parallel` feature is enabled (the
//! default); results never depend on the worker count.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bias;
pub mod dataset;
mod error;
pub mod exec;
pub mod metrics;
pub mod pipeline;
pub mod stats;

pub use error::{Error, Result};
pub use exec::Executor;
