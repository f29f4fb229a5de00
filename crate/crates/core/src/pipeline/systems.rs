use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

use crate::bias::{aggregate_ambiguity_entropies, gender_accuracy, relative_surprisal, Instance, MetricRecord};
use crate::dataset::fmt_opt;
use crate::metrics::Method;
use crate::stats::mean;
use crate::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SystemMethod {
    pub h_mean: Option<f64>,
    /// Mean of the per-instance relative surprisals.
    pub delta_i: Option<f64>,
    /// Relative surprisal of the pooled class means.
    pub delta_i_pooled: Option<f64>,
    pub delta_h: Option<f64>,
}

/// Corpus-level values of one (model, language).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSummary {
    pub model_id: String,
    pub language: String,
    pub n_instances: usize,
    pub gender_accuracy: Option<f64>,
    pub mean_comet: Option<f64>,
    pub delta_logprob: Option<f64>,
    pub methods: BTreeMap<Method, SystemMethod>,
}

impl SystemSummary {
    pub fn id(&self) -> String {
        format!("{}/{}", self.model_id, self.language)
    }
}

fn mean_of(values: impl Iterator<Item = f64>) -> Option<f64> {
    let v: Vec<f64> = values.collect();
    (!v.is_empty()).then(|| mean(&v))
}

pub fn system_summaries(
    records: &[MetricRecord],
    instances: &BTreeMap<String, Instance>,
    methods: &[Method],
) -> Result<Vec<SystemSummary>> {
    let mut by_system: BTreeMap<(&str, &str), Vec<&MetricRecord>> = BTreeMap::new();
    for r in records {
        by_system.entry((&r.model_id, &r.language)).or_default().push(r);
    }
    let mut delta_h: BTreeMap<(String, String, Method), Option<f64>> = BTreeMap::new();
    for &m in methods {
        for a in aggregate_ambiguity_entropies(records, instances, m)? {
            delta_h.insert((a.model_id, a.language, m), a.delta_h);
        }
    }
    by_system
        .into_iter()
        .map(|((model, language), rs)| {
            let owned: Vec<MetricRecord> = rs.iter().map(|r| (*r).clone()).collect();
            let mut per_method = BTreeMap::new();
            for &m in methods {
                let with_m: Vec<_> = rs.iter().filter_map(|r| r.method(m)).collect();
                if with_m.is_empty() {
                    continue;
                }
                let pooled_pairs: Vec<(f64, f64)> = with_m
                    .iter()
                    .filter_map(|mm| Some((mm.i_correct?, mm.i_incorrect?)))
                    .collect();
                let delta_i_pooled = match pooled_pairs.is_empty() {
                    true => None,
                    false => Some(relative_surprisal(
                        mean_of(pooled_pairs.iter().map(|p| p.0)).unwrap_or(0.0),
                        mean_of(pooled_pairs.iter().map(|p| p.1)).unwrap_or(0.0),
                    )?),
                };
                per_method.insert(
                    m,
                    SystemMethod {
                        h_mean: mean_of(with_m.iter().map(|mm| mm.h)),
                        delta_i: mean_of(with_m.iter().filter_map(|mm| mm.delta_i)),
                        delta_i_pooled,
                        delta_h: delta_h
                            .get(&(model.to_string(), language.to_string(), m))
                            .copied()
                            .flatten(),
                    },
                );
            }
            Ok(SystemSummary {
                model_id: model.to_string(),
                language: language.to_string(),
                n_instances: rs.len(),
                gender_accuracy: gender_accuracy(&owned, instances),
                mean_comet: mean_of(rs.iter().filter_map(|r| r.comet_score)),
                delta_logprob: mean_of(rs.iter().filter_map(|r| r.delta_logprob)),
                methods: per_method,
            })
        })
        .collect()
}

pub(crate) fn write_systems(path: &Path, systems: &[SystemSummary], methods: &[Method]) -> Result<()> {
    let err = |e: csv::Error| Error::validation(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    let mut header: Vec<String> = ["model_id", "language", "n_instances", "gender_accuracy", "mean_comet", "delta_logprob"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for m in methods {
        for f in ["h_mean", "delta_i", "delta_i_pooled", "delta_h"] {
            header.push(format!("{f}_{m}"));
        }
    }
    w.write_record(&header).map_err(err)?;
    for s in systems {
        let mut row = vec![
            s.model_id.clone(),
            s.language.clone(),
            s.n_instances.to_string(),
            fmt_opt(s.gender_accuracy),
            fmt_opt(s.mean_comet),
            fmt_opt(s.delta_logprob),
        ];
        for m in methods {
            let v = s.methods.get(m).cloned().unwrap_or_default();
            row.extend([v.h_mean, v.delta_i, v.delta_i_pooled, v.delta_h].map(fmt_opt));
        }
        w.write_record(&row).map_err(err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
