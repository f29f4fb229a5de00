use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::bias::{Cue, DEFAULT_NORM_TOLERANCE};
use crate::metrics::{Method, DEFAULT_ALPHA_GRID, DEFAULT_ENTAILMENT_THRESHOLD};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaSetting {
    Fixed(f64),
    /// Pick the grid value whose S3E best rank-correlates with GE.
    Tune(Vec<f64>),
}

/// Dependent variable of the effect analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dependent {
    /// Contrast-normalised entropy.
    Norm,
    /// Raw entropy.
    Raw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub manifest: PathBuf,
    pub out: PathBuf,
    pub methods: Vec<Method>,
    pub alpha: AlphaSetting,
    pub entailment_threshold: f64,
    pub similarity_floor: f64,
    pub norm_tolerance: f64,
    pub bins: usize,
    /// Reference level per cue, overriding the defaults.
    pub references: BTreeMap<Cue, String>,
    pub dependent: Dependent,
    /// Worker count; 0 means one per core, 1 runs sequentially.
    pub jobs: usize,
    /// Recorded for provenance; no stage draws random numbers.
    pub seed: u64,
}

impl RunConfig {
    pub fn new(manifest: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        RunConfig {
            manifest: manifest.into(),
            out: out.into(),
            methods: Method::ALL.to_vec(),
            alpha: AlphaSetting::Fixed(1.0),
            entailment_threshold: DEFAULT_ENTAILMENT_THRESHOLD,
            similarity_floor: 1e-6,
            norm_tolerance: DEFAULT_NORM_TOLERANCE,
            bins: 5,
            references: BTreeMap::new(),
            dependent: Dependent::Norm,
            jobs: 0,
            seed: 0,
        }
    }

    pub fn tuned(mut self) -> Self {
        self.alpha = AlphaSetting::Tune(DEFAULT_ALPHA_GRID.to_vec());
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::validation("at least one method is required"));
        }
        if self.bins < 2 {
            return Err(Error::validation(format!("bins must be >= 2, got {}", self.bins)));
        }
        match &self.alpha {
            AlphaSetting::Fixed(a) if !(a.is_finite() && *a > 0.0) => {
                return Err(Error::validation(format!("alpha must be positive, got {a}")))
            }
            AlphaSetting::Tune(grid) if grid.is_empty() => {
                return Err(Error::validation("empty alpha grid"))
            }
            _ => {}
        }
        if !(self.similarity_floor > 0.0 && self.similarity_floor < 1.0) {
            return Err(Error::validation("similarity floor must lie in (0, 1)"));
        }
        if !(self.norm_tolerance >= 0.0) {
            return Err(Error::validation("norm tolerance must be non-negative"));
        }
        Ok(())
    }

    pub fn reference(&self, cue: Cue) -> &str {
        self.references.get(&cue).map_or(cue.default_reference(), String::as_str)
    }

    /// Methods in canonical order without duplicates.
    pub fn method_list(&self) -> Vec<Method> {
        Method::ALL.into_iter().filter(|m| self.methods.contains(m)).collect()
    }
}
