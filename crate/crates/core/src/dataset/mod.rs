//! File formats: manifest, line-delimited record streams, the embedding
//! sidecar, and the CSV analysis tables.
//!
//! Paths inside a manifest are resolved relative to the manifest's directory.

mod corpus;
mod jsonl;
mod manifest;
mod samples;
mod scores;
mod sidecar;
mod tables;
mod validate;

pub use corpus::{load_corpus, Corpus};
pub use jsonl::{read_jsonl, write_jsonl};
pub use manifest::{CorpusManifest, SamplesEntry, FORMAT_VERSION};
pub use samples::{
    load_entailment, load_instances, load_sample_set, load_sample_sets, write_entailment,
    write_instances, write_sample_sets, EntailmentLine, SampleLine,
};
pub use scores::{load_scores, ReferenceScore, ScoreRecord};
pub use sidecar::{read_embeddings, write_embeddings, EmbeddingTable};
pub use tables::{
    fmt_f64, fmt_opt, read_effect_tables, read_metric_records, write_effect_tables, write_metric_records,
    EffectRow,
};
pub use validate::{validate_corpus, Issue, Severity, ValidationReport};
