use super::entropy::EntropyEstimate;
use super::types::SampleSet;
use crate::{Error, Result};

/// Exponent and lower clamp applied to pairwise similarities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityConfig {
    pub alpha: f64,
    pub floor: f64,
}

impl Default for SimilarityConfig {
    fn default() -> Self {
        SimilarityConfig {
            alpha: 1.0,
            floor: 1e-6,
        }
    }
}

impl SimilarityConfig {
    pub fn new(alpha: f64, floor: f64) -> Result<Self> {
        let cfg = SimilarityConfig { alpha, floor };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::validation(format!("alpha {} must be > 0", self.alpha)));
        }
        if !(self.floor > 0.0 && self.floor < 1.0) {
            return Err(Error::validation(format!(
                "similarity floor {} outside (0, 1)",
                self.floor
            )));
        }
        Ok(())
    }
}

/// Square row-major similarity matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: values.len(),
            });
        }
        Ok(SimilarityMatrix { n, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut values = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::new(n, values)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }
}

/// Pairwise cosine similarities of the sample embeddings, clamped to
/// `[floor, 1]`, with an exact unit diagonal.
pub fn cosine_similarity_matrix(samples: &SampleSet, floor: f64) -> Result<SimilarityMatrix> {
    if !(floor > 0.0 && floor < 1.0) {
        return Err(Error::validation(format!("similarity floor {floor} outside (0, 1)")));
    }
    let mut vectors: Vec<(&[f64], f64)> = Vec::with_capacity(samples.len());
    let mut dim = None;
    for (k, s) in samples.samples.iter().enumerate() {
        let e = s.embedding.as_ref().ok_or_else(|| {
            Error::validation(format!(
                "sample {k} of `{}` has no embedding",
                samples.instance_id
            ))
        })?;
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
        let norm2 = e.iter().map(|x| x * x).sum::<f64>();
        if !(norm2 > 0.0) || !norm2.is_finite() {
            return Err(Error::validation(format!(
                "sample {k} of `{}` has a zero-norm embedding",
                samples.instance_id
            )));
        }
        vectors.push((e.as_slice(), norm2));
    }
    let n = vectors.len();
    let mut values = vec![1.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let ((a, na), (b, nb)) = (vectors[i], vectors[j]);
            let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            // sqrt(na * nb) keeps identical vectors at exactly 1.
            let v = (dot / (na * nb).sqrt()).clamp(floor, 1.0);
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }
    SimilarityMatrix::new(n, values)
}

/// Similarity-sensitive Shannon entropy.
///
/// Surprisal of sample `i` is `-ln((1/N) Σ_j S(i,j)^α)`, the expectation
/// running over all `N` samples including `i` itself. Entries are clamped
/// below at `config.floor` first.
pub fn s3e_entropy(similarity: &SimilarityMatrix, config: &SimilarityConfig) -> Result<EntropyEstimate> {
    config.validate()?;
    let n = similarity.len();
    if n == 0 {
        return Err(Error::validation("empty similarity matrix"));
    }
    let unit_alpha = config.alpha == 1.0;
    let mut surprisals = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = 0.0;
        for (j, &raw) in similarity.row(i).iter().enumerate() {
            let s = raw.max(config.floor);
            if raw.is_nan() || s > 1.0 {
                return Err(Error::validation(format!(
                    "similarity [{i}][{j}] = {raw} outside (0, 1]"
                )));
            }
            acc += if unit_alpha { s } else { s.powf(config.alpha) };
        }
        surprisals.push(-(acc / n as f64).ln().min(0.0));
    }
    Ok(EntropyEstimate::from_surprisals(surprisals))
}
