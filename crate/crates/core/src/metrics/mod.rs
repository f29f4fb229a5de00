//! Entropy and surprisal estimators over Monte-Carlo translation samples.
//!
//! Every estimator returns an [`EntropyEstimate`]: the per-sample surprisals
//! and their mean. All logarithms are natural (nats).

mod alpha;
mod clustering;
mod entropy;
mod similarity;
mod types;

pub use alpha::{best_alpha, tune_alpha, AlphaChoice, DEFAULT_ALPHA_GRID};
pub use clustering::{cluster_by_entailment, DEFAULT_ENTAILMENT_THRESHOLD};
pub use entropy::{
    gender_entropy, semantic_entropy, sequence_entropy, shannon_entropy, EntropyEstimate,
};
pub use similarity::{cosine_similarity_matrix, s3e_entropy, SimilarityConfig, SimilarityMatrix};
pub use types::{ClusterAssignment, EntailmentMatrix, GenderLabel, Sample, SampleSet, SamplingMeta};

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Uncertainty estimators supported by the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Semantic entropy over entailment clusters.
    Se,
    /// Similarity-sensitive Shannon entropy over embedding similarities.
    S3e,
    /// Entropy of the focus-noun gender labels.
    Ge,
    /// Sequence-level Shannon entropy, `-log p(y)` per sample.
    Shannon,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Se, Method::S3e, Method::Ge, Method::Shannon];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Se => "se",
            Method::S3e => "s3e",
            Method::Ge => "ge",
            Method::Shannon => "shannon",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "se" => Ok(Method::Se),
            "s3e" => Ok(Method::S3e),
            "ge" => Ok(Method::Ge),
            "shannon" => Ok(Method::Shannon),
            other => Err(crate::Error::validation(format!("unknown method `{other}`"))),
        }
    }
}
