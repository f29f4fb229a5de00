use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::{Error, Result};

/// Version written by this crate. Loaders accept any `1.x.y`.
pub const FORMAT_VERSION: &str = "1.0.0";
const SUPPORTED_MAJOR: u64 = 1;

/// Files for one (model, language) pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplesEntry {
    pub model: String,
    pub language: String,
    pub path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embeddings: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entailment: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub dataset_name: String,
    pub format_version: String,
    pub languages: Vec<String>,
    pub models: Vec<String>,
    pub instances: PathBuf,
    pub samples: Vec<SamplesEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scores: Option<PathBuf>,
}

impl CorpusManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let manifest: CorpusManifest = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })?;
        manifest.check_version()?;
        Ok(manifest)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self).map_err(|e| Error::validation(e.to_string()))?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn check_version(&self) -> Result<()> {
        let major = self
            .format_version
            .split('.')
            .next()
            .and_then(|m| m.parse::<u64>().ok());
        match major {
            Some(SUPPORTED_MAJOR) => Ok(()),
            _ => Err(Error::FormatVersion {
                found: self.format_version.clone(),
                supported: SUPPORTED_MAJOR,
            }),
        }
    }

    pub fn entry(&self, model: &str, language: &str) -> Option<&SamplesEntry> {
        self.samples.iter().find(|e| e.model == model && e.language == language)
    }

    /// Structural problems that need no file access.
    pub fn structural_issues(&self) -> Vec<String> {
        let mut out = Vec::new();
        for model in &self.models {
            for language in &self.languages {
                let n = self
                    .samples
                    .iter()
                    .filter(|e| &e.model == model && &e.language == language)
                    .count();
                if n != 1 {
                    out.push(format!("{n} samples files for ({model}, {language}); expected 1"));
                }
            }
        }
        for e in &self.samples {
            if !self.models.contains(&e.model) || !self.languages.contains(&e.language) {
                out.push(format!(
                    "samples entry ({}, {}) not declared in models/languages",
                    e.model, e.language
                ));
            }
        }
        out
    }
}

/// `path` relative to `root` unless already absolute.
pub(crate) fn resolve(root: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        root.join(path)
    }
}
