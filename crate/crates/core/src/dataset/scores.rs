use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::path::Path;

use super::jsonl::read_jsonl;
use crate::metrics::GenderLabel;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceScore {
    pub reference_id: String,
    /// COMET on the 0-100 scale.
    pub score: f64,
}

/// One line of `scores.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub instance_id: String,
    pub model_id: String,
    pub language: String,
    pub comet_scores: Vec<ReferenceScore>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prediction_gender: Option<GenderLabel>,
}

impl ScoreRecord {
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut ids = BTreeSet::new();
        for r in &self.comet_scores {
            if !(0.0..=100.0).contains(&r.score) {
                out.push(format!("score {} for reference `{}` outside [0, 100]", r.score, r.reference_id));
            }
            if !ids.insert(&r.reference_id) {
                out.push(format!("reference `{}` listed twice", r.reference_id));
            }
        }
        out
    }

    pub fn key(&self) -> (&str, &str, &str) {
        (&self.instance_id, &self.model_id, &self.language)
    }
}

pub fn load_scores(path: &Path) -> Result<Vec<ScoreRecord>> {
    let records: Vec<ScoreRecord> = read_jsonl(path)?;
    for (k, r) in records.iter().enumerate() {
        if let Some(v) = r.violations().into_iter().next() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: k + 1,
                message: v,
            });
        }
    }
    Ok(records)
}
