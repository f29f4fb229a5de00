use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use super::jsonl::read_jsonl;
use super::manifest::{resolve, CorpusManifest};
use super::samples::{load_entailment, load_sample_sets};
use super::scores::ScoreRecord;
use crate::bias::{template_key, Instance};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Issue {
    pub severity: Severity,
    /// `file` or `file:line`.
    pub location: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn errors(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Warning)
    }

    /// No errors, and with `strict` no warnings either.
    pub fn passes(&self, strict: bool) -> bool {
        if strict {
            self.issues.is_empty()
        } else {
            self.errors().next().is_none()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields always serialize")
    }

    fn push(&mut self, severity: Severity, location: impl Into<String>, message: impl Into<String>) {
        self.issues.push(Issue {
            severity,
            location: location.into(),
            message: message.into(),
        });
    }

    fn error(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.push(Severity::Error, location, message);
    }

    fn record_err(&mut self, file: &Path, err: Error) {
        match err {
            Error::Parse { path, line, message } if line > 0 => {
                self.error(format!("{}:{line}", path.display()), message)
            }
            Error::Parse { path, message, .. } => self.error(path.display().to_string(), message),
            other => self.error(file.display().to_string(), other.to_string()),
        }
    }
}

/// Cross-file checks over a whole corpus. Never fails: unreadable or
/// malformed files become located report entries.
pub fn validate_corpus(manifest_path: &Path) -> ValidationReport {
    let mut report = ValidationReport::default();
    let manifest = match CorpusManifest::load(manifest_path) {
        Ok(m) => m,
        Err(e) => {
            report.record_err(manifest_path, e);
            return report;
        }
    };
    let root = manifest_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let mloc = manifest_path.display().to_string();
    for msg in manifest.structural_issues() {
        report.error(&mloc, msg);
    }

    let instances_path = resolve(&root, &manifest.instances);
    let instances = check_instances(&mut report, &instances_path, &manifest);

    for entry in &manifest.samples {
        let path = resolve(&root, &entry.path);
        let loc = path.display().to_string();
        let sidecar = entry.embeddings.as_ref().map(|p| resolve(&root, p));
        let sets = match load_sample_sets(&path, sidecar.as_deref()) {
            Ok(s) => s,
            Err(e) => {
                report.record_err(&path, e);
                continue;
            }
        };
        let mut seen = BTreeSet::new();
        let mut sizes = BTreeMap::new();
        for (k, s) in sets.iter().enumerate() {
            let at = format!("{loc}:{}", k + 1);
            if s.model_id != entry.model || s.language != entry.language {
                report.error(
                    &at,
                    format!(
                        "record is ({}, {}) but the file is registered for ({}, {})",
                        s.model_id, s.language, entry.model, entry.language
                    ),
                );
            }
            if !seen.insert(s.instance_id.as_str()) {
                report.error(&at, format!("second sample set for `{}`", s.instance_id));
            }
            if let Some(known) = &instances {
                if !known.contains_key(&s.instance_id) {
                    report.error(&at, format!("unknown instance `{}`", s.instance_id));
                }
            }
            sizes.insert(s.instance_id.clone(), s.len());
        }
        if let Some(known) = &instances {
            for (id, inst) in known {
                if inst.applies_to(&entry.language) && !seen.contains(id.as_str()) {
                    report.error(&loc, format!("missing coverage: no samples for `{id}`"));
                }
            }
        }
        if let Some(p) = &entry.entailment {
            let epath = resolve(&root, p);
            match load_entailment(&epath) {
                Ok(matrices) => {
                    let eloc = epath.display().to_string();
                    for (id, n) in &sizes {
                        match matrices.get(id) {
                            None => report.push(
                                Severity::Warning,
                                &eloc,
                                format!("no entailment matrix for `{id}`"),
                            ),
                            Some(m) if m.len() != *n => report.error(
                                &eloc,
                                format!("matrix for `{id}` is {0}x{0} but there are {n} samples", m.len()),
                            ),
                            _ => {}
                        }
                    }
                    for id in matrices.keys().filter(|id| !sizes.contains_key(*id)) {
                        report.error(&eloc, format!("matrix for `{id}` has no sample set"));
                    }
                }
                Err(e) => report.record_err(&epath, e),
            }
        }
    }

    if let Some(p) = &manifest.scores {
        let path = resolve(&root, p);
        check_scores(&mut report, &path, instances.as_ref());
    }
    report
}

fn check_instances(
    report: &mut ValidationReport,
    path: &Path,
    manifest: &CorpusManifest,
) -> Option<BTreeMap<String, Instance>> {
    let mut rows: Vec<Instance> = match read_jsonl(path) {
        Ok(r) => r,
        Err(e) => {
            report.record_err(path, e);
            return None;
        }
    };
    let loc = path.display().to_string();
    let has_ru = manifest.languages.iter().any(|l| l.eq_ignore_ascii_case("ru"));
    let mut by_id = BTreeMap::new();
    let mut groups: BTreeMap<String, Vec<(String, crate::bias::Gender)>> = BTreeMap::new();
    for (k, inst) in rows.iter_mut().enumerate() {
        let at = format!("{loc}:{}", k + 1);
        if inst.contrast_key.is_empty() {
            inst.contrast_key = template_key(inst);
        }
        for v in inst.violations() {
            report.error(&at, format!("`{}`: {v}", inst.instance_id));
        }
        if inst.default_masculine {
            let non_ru_target = inst
                .target_language
                .as_deref()
                .is_some_and(|l| !l.eq_ignore_ascii_case("ru"));
            if non_ru_target || !has_ru {
                report.error(&at, format!("`{}`: Default M flag outside Russian", inst.instance_id));
            }
        }
        groups
            .entry(inst.contrast_key.clone())
            .or_default()
            .push((inst.instance_id.clone(), inst.pronoun_gender));
        if by_id.insert(inst.instance_id.clone(), inst.clone()).is_some() {
            report.error(&at, format!("duplicate instance id `{}`", inst.instance_id));
        }
    }
    for (key, members) in &groups {
        let mut seen = BTreeMap::new();
        for (id, g) in members {
            if let Some(prev) = seen.insert(*g, id) {
                report.error(
                    &loc,
                    format!("contrast group {key}: `{prev}` and `{id}` both have pronoun {g:?}"),
                );
            }
        }
    }
    Some(by_id)
}

fn check_scores(report: &mut ValidationReport, path: &Path, instances: Option<&BTreeMap<String, Instance>>) {
    let records: Vec<ScoreRecord> = match read_jsonl(path) {
        Ok(r) => r,
        Err(e) => {
            report.record_err(path, e);
            return;
        }
    };
    let loc = path.display().to_string();
    let mut keys = BTreeSet::new();
    for (k, r) in records.iter().enumerate() {
        let at = format!("{loc}:{}", k + 1);
        for v in r.violations() {
            report.error(&at, v);
        }
        if !keys.insert(r.key()) {
            report.error(&at, format!("second score record for `{}`", r.instance_id));
        }
        let Some(known) = instances else { continue };
        match known.get(&r.instance_id) {
            None => report.error(&at, format!("unknown instance `{}`", r.instance_id)),
            Some(inst) if inst.ambiguous && r.comet_scores.len() < 2 => report.push(
                Severity::Warning,
                &at,
                format!(
                    "multi-reference required: ambiguous `{}` has {} reference score(s)",
                    r.instance_id,
                    r.comet_scores.len()
                ),
            ),
            _ => {}
        }
    }
}
