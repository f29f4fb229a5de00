use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Morphological gender of the translated focus noun.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GenderLabel {
    #[serde(rename = "M", alias = "Masculine", alias = "masculine")]
    Masculine,
    #[serde(rename = "F", alias = "Feminine", alias = "feminine")]
    Feminine,
    #[serde(rename = "N", alias = "Neutral", alias = "neutral")]
    Neutral,
    #[serde(rename = "Unknown", alias = "unknown", alias = "U")]
    Unknown,
}

impl GenderLabel {
    pub fn code(self) -> &'static str {
        match self {
            GenderLabel::Masculine => "M",
            GenderLabel::Feminine => "F",
            GenderLabel::Neutral => "N",
            GenderLabel::Unknown => "Unknown",
        }
    }

    pub fn parse_code(s: &str) -> Option<Self> {
        match s {
            "M" | "Masculine" | "masculine" => Some(GenderLabel::Masculine),
            "F" | "Feminine" | "feminine" => Some(GenderLabel::Feminine),
            "N" | "Neutral" | "neutral" => Some(GenderLabel::Neutral),
            "Unknown" | "unknown" | "U" => Some(GenderLabel::Unknown),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub text: String,
    /// Sequence log-probability in nats.
    pub log_prob: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<Vec<f64>>,
    pub gender_label: GenderLabel,
}

/// Provenance of the sampling run; not used by any computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingMeta {
    pub num_samples: usize,
    pub epsilon: f64,
    pub seed: i64,
}

/// Row-major `n × n` entailment probabilities; `scores[i][j]` is the
/// probability that sample `i` entails sample `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntailmentMatrix {
    n: usize,
    scores: Vec<f64>,
}

impl EntailmentMatrix {
    pub fn new(n: usize, scores: Vec<f64>) -> Result<Self> {
        if scores.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: scores.len(),
            });
        }
        for i in 0..n {
            for j in 0..n {
                let v = scores[i * n + j];
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::validation(format!(
                        "entailment score [{i}][{j}] = {v} outside [0, 1]"
                    )));
                }
                if i == j && v != 1.0 {
                    return Err(Error::validation(format!(
                        "entailment diagonal [{i}][{i}] = {v}, expected 1.0"
                    )));
                }
            }
        }
        Ok(EntailmentMatrix { n, scores })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut flat = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            flat.extend_from_slice(row);
        }
        Self::new(n, flat)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.scores[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.scores
    }
}

/// The Monte-Carlo draws for one (instance, model, language).
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub instance_id: String,
    pub model_id: String,
    pub language: String,
    pub samples: Vec<Sample>,
    pub sampling_meta: Option<SamplingMeta>,
    pub entailment: Option<EntailmentMatrix>,
}

impl SampleSet {
    /// Builds a sample set, checking every structural invariant.
    pub fn new(
        instance_id: impl Into<String>,
        model_id: impl Into<String>,
        language: impl Into<String>,
        samples: Vec<Sample>,
    ) -> Result<Self> {
        let set = SampleSet {
            instance_id: instance_id.into(),
            model_id: model_id.into(),
            language: language.into(),
            samples,
            sampling_meta: None,
            entailment: None,
        };
        set.validate()?;
        Ok(set)
    }

    pub fn with_entailment(mut self, matrix: EntailmentMatrix) -> Result<Self> {
        if matrix.len() != self.samples.len() {
            return Err(Error::DimensionMismatch {
                expected: self.samples.len(),
                got: matrix.len(),
            });
        }
        self.entailment = Some(matrix);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn has_embeddings(&self) -> bool {
        !self.samples.is_empty() && self.samples.iter().all(|s| s.embedding.is_some())
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples.is_empty() {
            return Err(Error::validation(format!(
                "sample set for `{}` is empty",
                self.instance_id
            )));
        }
        let mut dim = None;
        let mut with_embedding = 0;
        for (k, s) in self.samples.iter().enumerate() {
            if !s.log_prob.is_finite() || s.log_prob > 0.0 {
                return Err(Error::validation(format!(
                    "sample {k} of `{}`: log_prob {} must be finite and <= 0",
                    self.instance_id, s.log_prob
                )));
            }
            if let Some(e) = &s.embedding {
                with_embedding += 1;
                match dim {
                    None => dim = Some(e.len()),
                    Some(d) if d != e.len() => {
                        return Err(Error::DimensionMismatch {
                            expected: d,
                            got: e.len(),
                        })
                    }
                    _ => {}
                }
                let norm2: f64 = e.iter().map(|x| x * x).sum();
                if !(norm2 > 0.0) || !norm2.is_finite() {
                    return Err(Error::validation(format!(
                        "sample {k} of `{}`: embedding has zero or non-finite norm",
                        self.instance_id
                    )));
                }
            }
        }
        if with_embedding != 0 && with_embedding != self.samples.len() {
            return Err(Error::validation(format!(
                "`{}`: {with_embedding} of {} samples carry embeddings",
                self.instance_id,
                self.samples.len()
            )));
        }
        if let Some(m) = &self.entailment {
            if m.len() != self.samples.len() {
                return Err(Error::DimensionMismatch {
                    expected: self.samples.len(),
                    got: m.len(),
                });
            }
        }
        Ok(())
    }
}

/// Sample-to-cluster mapping with contiguous cluster indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    cluster_of: Vec<usize>,
    num_clusters: usize,
}

impl ClusterAssignment {
    /// Accepts indices that already cover `0..num_clusters` with no gaps.
    pub fn new(cluster_of: Vec<usize>) -> Result<Self> {
        if cluster_of.is_empty() {
            return Err(Error::validation("cluster assignment is empty"));
        }
        let num_clusters = cluster_of.iter().max().map_or(0, |m| m + 1);
        let mut seen = vec![false; num_clusters];
        for &c in &cluster_of {
            seen[c] = true;
        }
        if let Some(gap) = seen.iter().position(|s| !s) {
            return Err(Error::validation(format!(
                "cluster indices are not contiguous: {gap} is unused"
            )));
        }
        Ok(ClusterAssignment {
            cluster_of,
            num_clusters,
        })
    }

    /// Relabels arbitrary keys to clusters numbered by first appearance.
    pub fn from_keys<K: Ord + Clone>(keys: &[K]) -> Result<Self> {
        let mut index = std::collections::BTreeMap::new();
        let cluster_of = keys
            .iter()
            .map(|k| {
                let next = index.len();
                *index.entry(k.clone()).or_insert(next)
            })
            .collect();
        Self::new(cluster_of)
    }

    pub fn cluster_of(&self) -> &[usize] {
        &self.cluster_of
    }

    pub fn num_clusters(&self) -> usize {
        self.num_clusters
    }

    pub fn len(&self) -> usize {
        self.cluster_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cluster_of.is_empty()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_clusters];
        for &c in &self.cluster_of {
            sizes[c] += 1;
        }
        sizes
    }
}
