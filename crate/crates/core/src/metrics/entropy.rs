use super::types::{ClusterAssignment, SampleSet};
use crate::{Error, Result};

/// Per-sample surprisals and their Monte-Carlo mean.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyEstimate {
    pub entropy: f64,
    pub surprisals: Vec<f64>,
}

impl EntropyEstimate {
    pub(crate) fn from_surprisals(surprisals: Vec<f64>) -> Self {
        let entropy = surprisals.iter().sum::<f64>() / surprisals.len() as f64;
        // Rounding can leave `-0.0` or a few ulps below zero.
        EntropyEstimate {
            entropy: entropy.max(0.0),
            surprisals,
        }
    }
}

/// `-Σ p ln p` of an explicit distribution, with `0 ln 0 = 0`.
pub fn shannon_entropy(probabilities: &[f64]) -> Result<f64> {
    if probabilities.is_empty() {
        return Err(Error::validation("empty distribution"));
    }
    if let Some(p) = probabilities.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
        return Err(Error::validation(format!("invalid probability {p}")));
    }
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::validation(format!(
            "probabilities sum to {total}, not 1"
        )));
    }
    let h: f64 = probabilities
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum();
    Ok(h.max(0.0))
}

/// Semantic entropy of a clustering: each sample's surprisal is
/// `-ln(n_c / N)` for its cluster `c`, and the entropy is their mean.
pub fn semantic_entropy(assignment: &ClusterAssignment) -> Result<EntropyEstimate> {
    if assignment.is_empty() {
        return Err(Error::validation("empty cluster assignment"));
    }
    let n = assignment.len() as f64;
    let per_cluster: Vec<f64> = assignment
        .cluster_sizes()
        .into_iter()
        .map(|size| -(size as f64 / n).ln())
        .collect();
    let surprisals = assignment
        .cluster_of()
        .iter()
        .map(|&c| per_cluster[c])
        .collect();
    Ok(EntropyEstimate::from_surprisals(surprisals))
}

/// Semantic entropy with clusters given by the samples' gender labels.
/// `Unknown` is a class of its own.
pub fn gender_entropy(samples: &SampleSet) -> Result<EntropyEstimate> {
    if samples.is_empty() {
        return Err(Error::validation("empty sample set"));
    }
    let labels: Vec<_> = samples.samples.iter().map(|s| s.gender_label).collect();
    semantic_entropy(&ClusterAssignment::from_keys(&labels)?)
}

/// Classic sequence-level entropy estimate: surprisal is `-log p(y)`.
pub fn sequence_entropy(samples: &SampleSet) -> Result<EntropyEstimate> {
    if samples.is_empty() {
        return Err(Error::validation("empty sample set"));
    }
    Ok(EntropyEstimate::from_surprisals(
        samples.samples.iter().map(|s| -s.log_prob).collect(),
    ))
}
