use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use super::compute::write_json;
use super::config::{Dependent, RunConfig};
use super::systems::{system_summaries, SystemSummary};
use super::{BINS_FILE, CORRELATIONS_FILE, EFFECTS_FILE, METRICS_FILE};
use crate::bias::{Cue, Instance, MetricRecord};
use crate::dataset::{fmt_opt, load_instances, read_metric_records, write_effect_tables, CorpusManifest, EffectRow};
use crate::metrics::Method;
use crate::stats::{comet_bins, kendall_tau_b, rank_positions, single_effect_anova, spearman_rho, QualityBinning, QualityRecord};
use crate::{Error, Executor, Result};

/// Cross-system rank correlation of one metric with gender accuracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub metric: String,
    pub method: Option<Method>,
    pub n_systems: usize,
    pub spearman: Option<f64>,
    pub kendall: Option<f64>,
    /// Same statistics over ordinal rank positions (ties in system order).
    pub spearman_rank_positions: Option<f64>,
    pub kendall_rank_positions: Option<f64>,
}

/// Quality-binned entropy summaries of one (model, language, method).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinPanel {
    pub model_id: String,
    pub language: String,
    pub method: Method,
    pub binning: QualityBinning,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeSummary {
    pub effects: usize,
    pub correlations: usize,
    pub panels: usize,
    /// Cues that could not be analysed, with the reason.
    pub notes: Vec<String>,
}

pub(crate) fn require(path: &Path, command: &'static str) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::MissingStage {
            file: path.to_path_buf(),
            command,
        })
    }
}

pub(crate) fn load_manifest_instances(manifest_path: &Path) -> Result<BTreeMap<String, Instance>> {
    let manifest = CorpusManifest::load(manifest_path)?;
    let root = manifest_path.parent().unwrap_or(Path::new("."));
    let path = if manifest.instances.is_absolute() {
        manifest.instances.clone()
    } else {
        root.join(&manifest.instances)
    };
    Ok(load_instances(&path)?
        .into_iter()
        .map(|i| (i.instance_id.clone(), i))
        .collect())
}

pub(crate) fn methods_in(records: &[MetricRecord], config: &RunConfig) -> Vec<Method> {
    let present: BTreeSet<Method> = records.iter().flat_map(|r| r.methods.keys().copied()).collect();
    config.method_list().into_iter().filter(|m| present.contains(m)).collect()
}

pub fn analyze(config: &RunConfig, exec: &Executor) -> Result<AnalyzeSummary> {
    config.validate()?;
    let metrics_path = config.out.join(METRICS_FILE);
    require(&metrics_path, "compute")?;
    let records = read_metric_records(&metrics_path)?;
    let instances = load_manifest_instances(&config.manifest)?;
    let methods = methods_in(&records, config);

    let mut by_system: BTreeMap<(String, String), Vec<&MetricRecord>> = BTreeMap::new();
    for r in &records {
        if !instances.contains_key(&r.instance_id) {
            return Err(Error::validation(format!("metrics reference unknown instance `{}`", r.instance_id)));
        }
        by_system.entry((r.model_id.clone(), r.language.clone())).or_default().push(r);
    }
    let tasks: Vec<(&(String, String), &Vec<&MetricRecord>, Method)> = by_system
        .iter()
        .flat_map(|(k, rs)| methods.iter().map(move |&m| (k, rs, m)))
        .collect();

    let results = exec.map(&tasks, |(key, rs, m)| effects_for(&key.0, &key.1, rs, *m, &instances, config));
    let mut effects = Vec::new();
    let mut notes = Vec::new();
    for r in results {
        let (rows, n) = r?;
        effects.extend(rows);
        notes.extend(n);
    }
    for n in &notes {
        log::info!("{n}");
    }

    let systems = system_summaries(&records, &instances, &methods)?;
    let correlations = correlations(&systems, &methods)?;

    let panel_results = exec.map(&tasks, |(key, rs, m)| bin_panel(&key.0, &key.1, rs, *m, &instances, config.bins));
    let mut panels = Vec::new();
    for p in panel_results {
        panels.extend(p?);
    }

    write_effect_tables(&effects, &config.out.join(EFFECTS_FILE))?;
    write_correlations(&config.out.join(CORRELATIONS_FILE), &correlations)?;
    write_json(&config.out.join(BINS_FILE), &panels)?;
    Ok(AnalyzeSummary {
        effects: effects.len(),
        correlations: correlations.len(),
        panels: panels.len(),
        notes,
    })
}

fn effects_for(
    model: &str,
    language: &str,
    records: &[&MetricRecord],
    method: Method,
    instances: &BTreeMap<String, Instance>,
    config: &RunConfig,
) -> Result<(Vec<EffectRow>, Vec<String>)> {
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for cue in Cue::ALL {
        let mut values = Vec::new();
        let mut levels = Vec::new();
        for r in records {
            let Some(mm) = r.method(method) else { continue };
            let y = match config.dependent {
                Dependent::Norm => mm.norm_h,
                Dependent::Raw => Some(mm.h),
            };
            let (Some(y), Some(level)) = (y, instances[&r.instance_id].cue_level(cue, language)) else {
                continue;
            };
            values.push(y);
            levels.push(level);
        }
        if values.is_empty() {
            continue;
        }
        let reference = config.reference(cue);
        let distinct: BTreeSet<&str> = levels.iter().map(String::as_str).collect();
        if !distinct.contains(reference) {
            notes.push(format!(
                "{model}/{language}/{method}: {cue} has no `{reference}` observations; skipped"
            ));
            continue;
        }
        if distinct.len() < 2 {
            continue;
        }
        for estimate in single_effect_anova(cue.name(), &values, &levels, reference)? {
            rows.push(EffectRow {
                model_id: model.to_string(),
                language: language.to_string(),
                method,
                estimate,
            });
        }
    }
    Ok((rows, notes))
}

fn correlate(x: &[f64], y: &[f64]) -> Result<[Option<f64>; 4]> {
    if x.len() < 3 {
        return Ok([None; 4]);
    }
    let (rx, ry) = (rank_positions(x, true), rank_positions(y, true));
    Ok([
        spearman_rho(x, y)?,
        kendall_tau_b(x, y)?,
        spearman_rho(&rx, &ry)?,
        kendall_tau_b(&rx, &ry)?,
    ])
}

fn correlations(systems: &[SystemSummary], methods: &[Method]) -> Result<Vec<CorrelationRow>> {
    type Getter = Box<dyn Fn(&SystemSummary) -> Option<f64>>;
    let mut series: Vec<(String, Option<Method>, Getter)> = Vec::new();
    for &m in methods {
        series.push(("delta_i".into(), Some(m), Box::new(move |s| s.methods.get(&m)?.delta_i)));
        series.push(("delta_i_pooled".into(), Some(m), Box::new(move |s| s.methods.get(&m)?.delta_i_pooled)));
        series.push(("delta_h".into(), Some(m), Box::new(move |s| s.methods.get(&m)?.delta_h)));
    }
    series.push(("delta_logprob".into(), None, Box::new(|s| s.delta_logprob)));
    let mut out = Vec::new();
    for (metric, method, get) in series {
        let (x, y): (Vec<f64>, Vec<f64>) = systems
            .iter()
            .filter_map(|s| Some((s.gender_accuracy?, get(s)?)))
            .unzip();
        if x.is_empty() {
            continue;
        }
        let [spearman, kendall, spearman_rank_positions, kendall_rank_positions] = correlate(&x, &y)?;
        out.push(CorrelationRow {
            metric,
            method,
            n_systems: x.len(),
            spearman,
            kendall,
            spearman_rank_positions,
            kendall_rank_positions,
        });
    }
    Ok(out)
}

fn bin_panel(
    model: &str,
    language: &str,
    records: &[&MetricRecord],
    method: Method,
    instances: &BTreeMap<String, Instance>,
    bins: usize,
) -> Result<Option<BinPanel>> {
    let quality: Vec<QualityRecord> = records
        .iter()
        .filter_map(|r| {
            Some(QualityRecord {
                comet: r.comet_score?,
                entropy: r.h(method)?,
                ambiguous: instances[&r.instance_id].ambiguous,
            })
        })
        .collect();
    if quality.is_empty() {
        return Ok(None);
    }
    Ok(Some(BinPanel {
        model_id: model.to_string(),
        language: language.to_string(),
        method,
        binning: comet_bins(&quality, bins)?,
    }))
}

fn write_correlations(path: &Path, rows: &[CorrelationRow]) -> Result<()> {
    let err = |e: csv::Error| Error::validation(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    w.write_record([
        "metric",
        "method",
        "against",
        "n_systems",
        "spearman",
        "kendall",
        "spearman_rank_positions",
        "kendall_rank_positions",
    ])
    .map_err(err)?;
    for r in rows {
        w.write_record([
            r.metric.clone(),
            r.method.map(|m| m.to_string()).unwrap_or_default(),
            "gender_accuracy".to_string(),
            r.n_systems.to_string(),
            fmt_opt(r.spearman),
            fmt_opt(r.kendall),
            fmt_opt(r.spearman_rank_positions),
            fmt_opt(r.kendall_rank_positions),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
