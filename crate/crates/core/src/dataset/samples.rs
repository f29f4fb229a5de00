use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

use super::jsonl::{read_jsonl, write_jsonl};
use super::sidecar::read_embeddings;
use crate::bias::{template_key, Instance};
use crate::metrics::{EntailmentMatrix, Sample, SampleSet, SamplingMeta};
use crate::{Error, Result};

/// One line of `samples.<model>.<lang>.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleLine {
    pub instance_id: String,
    pub model_id: String,
    pub language: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling: Option<SamplingMeta>,
    pub samples: Vec<Sample>,
}

/// One line of `entailment.<model>.<lang>.jsonl`: a row-major `n × n` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntailmentLine {
    pub instance_id: String,
    pub n: usize,
    pub scores: Vec<f64>,
}

fn at(path: &Path, line: usize, err: impl std::fmt::Display) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: err.to_string(),
    }
}

/// Loads `instances.jsonl`. Missing contrast keys are derived from the
/// sentence template. All invariant violations are reported together.
pub fn load_instances(path: &Path) -> Result<Vec<Instance>> {
    let mut instances: Vec<Instance> = read_jsonl(path)?;
    let mut problems = Vec::new();
    for (k, inst) in instances.iter_mut().enumerate() {
        if inst.contrast_key.is_empty() {
            inst.contrast_key = template_key(inst);
        }
        for v in inst.violations() {
            problems.push(format!("{}: record {} (`{}`): {v}", path.display(), k + 1, inst.instance_id));
        }
    }
    if !problems.is_empty() {
        return Err(Error::Validation(problems.join("\n")));
    }
    Ok(instances)
}

pub fn write_instances(path: &Path, instances: &[Instance]) -> Result<()> {
    write_jsonl(path, instances)
}

/// Loads every sample set in a samples file. With a sidecar, sample rows are
/// taken from it in file order and inline embeddings are not allowed.
pub fn load_sample_sets(path: &Path, embeddings: Option<&Path>) -> Result<Vec<SampleSet>> {
    let lines: Vec<SampleLine> = read_jsonl(path)?;
    let table = embeddings.map(read_embeddings).transpose()?;
    if let Some(t) = &table {
        let total: usize = lines.iter().map(|l| l.samples.len()).sum();
        if t.rows != total {
            return Err(Error::validation(format!(
                "{}: sidecar has {} rows, samples file has {total} samples",
                embeddings.unwrap_or(path).display(),
                t.rows
            )));
        }
    }
    let mut row = 0;
    let mut out = Vec::with_capacity(lines.len());
    for (k, line) in lines.into_iter().enumerate() {
        let line_no = k + 1;
        let mut samples = line.samples;
        if let Some(meta) = &line.sampling {
            if meta.num_samples != samples.len() {
                return Err(at(
                    path,
                    line_no,
                    format!("num_samples = {} but {} samples present", meta.num_samples, samples.len()),
                ));
            }
        }
        if let Some(t) = &table {
            for s in &mut samples {
                if s.embedding.is_some() {
                    return Err(at(path, line_no, "inline embedding alongside a sidecar"));
                }
                s.embedding = Some(t.row(row).iter().map(|&v| f64::from(v)).collect());
                row += 1;
            }
        }
        let mut set = SampleSet::new(line.instance_id, line.model_id, line.language, samples)
            .map_err(|e| at(path, line_no, e))?;
        set.sampling_meta = line.sampling;
        out.push(set);
    }
    Ok(out)
}

pub fn load_sample_set(path: &Path, instance_id: &str, embeddings: Option<&Path>) -> Result<SampleSet> {
    load_sample_sets(path, embeddings)?
        .into_iter()
        .find(|s| s.instance_id == instance_id)
        .ok_or_else(|| Error::validation(format!("{}: no samples for `{instance_id}`", path.display())))
}

/// Writes sample sets with inline embeddings.
pub fn write_sample_sets(path: &Path, sets: &[SampleSet]) -> Result<()> {
    let lines: Vec<SampleLine> = sets
        .iter()
        .map(|s| SampleLine {
            instance_id: s.instance_id.clone(),
            model_id: s.model_id.clone(),
            language: s.language.clone(),
            sampling: s.sampling_meta.clone(),
            samples: s.samples.clone(),
        })
        .collect();
    write_jsonl(path, &lines)
}

pub fn load_entailment(path: &Path) -> Result<BTreeMap<String, EntailmentMatrix>> {
    let lines: Vec<EntailmentLine> = read_jsonl(path)?;
    let mut out = BTreeMap::new();
    for (k, line) in lines.into_iter().enumerate() {
        let matrix = EntailmentMatrix::new(line.n, line.scores).map_err(|e| at(path, k + 1, e))?;
        if out.insert(line.instance_id.clone(), matrix).is_some() {
            return Err(at(path, k + 1, format!("second matrix for `{}`", line.instance_id)));
        }
    }
    Ok(out)
}

pub fn write_entailment(path: &Path, matrices: &BTreeMap<String, EntailmentMatrix>) -> Result<()> {
    let lines: Vec<EntailmentLine> = matrices
        .iter()
        .map(|(id, m)| EntailmentLine {
            instance_id: id.clone(),
            n: m.len(),
            scores: m.as_slice().to_vec(),
        })
        .collect();
    write_jsonl(path, &lines)
}
