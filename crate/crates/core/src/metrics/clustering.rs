use super::types::{ClusterAssignment, EntailmentMatrix, SampleSet};
use crate::{Error, Result};

pub const DEFAULT_ENTAILMENT_THRESHOLD: f64 = 0.5;

/// Greedy single-pass bidirectional-entailment clustering.
///
/// Samples are visited in order. Sample `i` joins the first existing cluster
/// whose representative `r` (the cluster's first member) satisfies both
/// `scores[i][r] >= threshold` and `scores[r][i] >= threshold`; otherwise it
/// founds a new cluster. The result depends on sample order.
pub fn cluster_by_entailment(
    samples: &SampleSet,
    matrix: &EntailmentMatrix,
    threshold: f64,
) -> Result<ClusterAssignment> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::validation(format!(
            "entailment threshold {threshold} outside (0, 1)"
        )));
    }
    if matrix.len() != samples.len() {
        return Err(Error::DimensionMismatch {
            expected: samples.len(),
            got: matrix.len(),
        });
    }
    let mut representatives: Vec<usize> = Vec::new();
    let mut cluster_of = Vec::with_capacity(samples.len());
    for i in 0..samples.len() {
        let found = representatives
            .iter()
            .position(|&r| matrix.get(i, r) >= threshold && matrix.get(r, i) >= threshold);
        match found {
            Some(c) => cluster_of.push(c),
            None => {
                cluster_of.push(representatives.len());
                representatives.push(i);
            }
        }
    }
    ClusterAssignment::new(cluster_of)
}
