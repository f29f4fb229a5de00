use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::manifest::{resolve, CorpusManifest};
use super::samples::{load_entailment, load_instances, load_sample_sets};
use super::scores::{load_scores, ScoreRecord};
use crate::bias::Instance;
use crate::metrics::SampleSet;
use crate::Result;

/// Everything a manifest points to, loaded into memory.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub root: PathBuf,
    pub manifest: CorpusManifest,
    pub instances: Vec<Instance>,
    /// Keyed by (model, language); sets are in file order.
    pub sample_sets: BTreeMap<(String, String), Vec<SampleSet>>,
    pub scores: Vec<ScoreRecord>,
}

impl Corpus {
    pub fn instance_map(&self) -> BTreeMap<String, Instance> {
        self.instances.iter().map(|i| (i.instance_id.clone(), i.clone())).collect()
    }
}

/// Loads a corpus. Entailment matrices are attached to the sample sets they
/// belong to; sets without a matrix keep `entailment = None`.
pub fn load_corpus(manifest_path: &Path) -> Result<Corpus> {
    let manifest = CorpusManifest::load(manifest_path)?;
    let root = manifest_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let instances = load_instances(&resolve(&root, &manifest.instances))?;
    let mut sample_sets = BTreeMap::new();
    for entry in &manifest.samples {
        let sidecar = entry.embeddings.as_ref().map(|p| resolve(&root, p));
        let mut sets = load_sample_sets(&resolve(&root, &entry.path), sidecar.as_deref())?;
        if let Some(p) = &entry.entailment {
            let mut matrices = load_entailment(&resolve(&root, p))?;
            sets = sets
                .into_iter()
                .map(|s| match matrices.remove(&s.instance_id) {
                    Some(m) => s.with_entailment(m),
                    None => Ok(s),
                })
                .collect::<Result<_>>()?;
        }
        sample_sets.insert((entry.model.clone(), entry.language.clone()), sets);
    }
    let scores = match &manifest.scores {
        Some(p) => load_scores(&resolve(&root, p))?,
        None => Vec::new(),
    };
    Ok(Corpus {
        root,
        manifest,
        instances,
        sample_sets,
        scores,
    })
}
