use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;

use super::config::{AlphaSetting, RunConfig};
use super::systems::{system_summaries, write_systems};
use super::{AGGREGATES_FILE, METRICS_FILE, RUN_FILE, SYSTEMS_FILE};
use crate::bias::{
    aggregate_ambiguity_entropies, augment_with_names, class_means, correctness_surprisals, delta_logprob,
    normalized_entropy, relative_surprisal, AmbiguityAggregate, BinaryGender, ContrastGroup, Instance,
    MethodMetrics, MetricRecord, NameTable,
};
use crate::dataset::{
    fmt_opt, load_corpus, load_instances, write_instances, write_metric_records, CorpusManifest, ScoreRecord,
    FORMAT_VERSION,
};
use crate::metrics::{
    cluster_by_entailment, cosine_similarity_matrix, gender_entropy, s3e_entropy, semantic_entropy,
    sequence_entropy, tune_alpha, AlphaChoice, EntropyEstimate, Method, SampleSet, SimilarityConfig,
};
use crate::stats::max_reference_aggregation;
use crate::{Error, Executor, Result};

/// A method that could not be computed for some sample sets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SkipNote {
    pub model_id: String,
    pub language: String,
    pub method: Method,
    pub instances: usize,
    pub reason: String,
}

/// Contents of `run.json`. Holds nothing that varies between identical runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunInfo {
    pub format_version: String,
    pub tool_version: String,
    pub dataset_name: String,
    pub methods: Vec<Method>,
    pub alpha: Option<f64>,
    pub alpha_tuning: Option<AlphaChoice>,
    pub alpha_grid: Option<Vec<f64>>,
    pub entailment_threshold: f64,
    pub similarity_floor: f64,
    pub norm_tolerance: f64,
    pub bins: usize,
    pub dependent: super::Dependent,
    pub references: BTreeMap<String, String>,
    pub seed: u64,
    pub records: usize,
    pub skipped: Vec<SkipNote>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComputeSummary {
    pub records: usize,
    pub alpha: Option<AlphaChoice>,
    pub skipped: Vec<SkipNote>,
}

impl ComputeSummary {
    pub fn is_partial(&self) -> bool {
        !self.skipped.is_empty()
    }
}

struct WorkItem<'a> {
    instance: &'a Instance,
    set: &'a SampleSet,
    score: Option<&'a ScoreRecord>,
}

struct Outcome {
    record: MetricRecord,
    skipped: Vec<(Method, &'static str)>,
}

/// Per-instance metrics for every (model, language) sample set, followed by
/// contrast normalisation and the per-system aggregates.
pub fn compute(config: &RunConfig, exec: &Executor) -> Result<ComputeSummary> {
    config.validate()?;
    let corpus = load_corpus(&config.manifest)?;
    let instances = corpus.instance_map();
    let methods = config.method_list();

    let scores: BTreeMap<(&str, &str, &str), &ScoreRecord> = corpus.scores.iter().map(|s| (s.key(), s)).collect();
    let mut items = Vec::new();
    for ((_, language), sets) in &corpus.sample_sets {
        for set in sets {
            let instance = instances.get(&set.instance_id).ok_or_else(|| {
                Error::validation(format!("samples reference unknown instance `{}`", set.instance_id))
            })?;
            if !instance.applies_to(language) {
                continue;
            }
            let score = scores.get(&(set.instance_id.as_str(), set.model_id.as_str(), set.language.as_str())).copied();
            items.push(WorkItem { instance, set, score });
        }
    }

    let alpha_choice = match (&config.alpha, methods.contains(&Method::S3e)) {
        (AlphaSetting::Tune(grid), true) => {
            let calibration: Vec<SampleSet> = items
                .iter()
                .filter(|w| w.set.has_embeddings())
                .map(|w| w.set.clone())
                .collect();
            let choice = tune_alpha(&calibration, grid, config.similarity_floor)?;
            log::info!("tuned alpha = {} (rho = {})", choice.alpha, choice.correlation);
            Some(choice)
        }
        _ => None,
    };
    let alpha = match (&config.alpha, &alpha_choice) {
        (_, Some(c)) => c.alpha,
        (AlphaSetting::Fixed(a), None) => *a,
        (AlphaSetting::Tune(_), None) => 1.0,
    };
    let similarity = SimilarityConfig::new(alpha, config.similarity_floor)?;

    let outcomes: Vec<Result<Outcome>> = exec.map(&items, |w| compute_one(w, &methods, config, &similarity));
    let mut records = Vec::with_capacity(outcomes.len());
    let mut skip_counts: BTreeMap<(String, String, Method, &'static str), usize> = BTreeMap::new();
    for outcome in outcomes {
        let o = outcome?;
        for (m, reason) in o.skipped {
            *skip_counts
                .entry((o.record.model_id.clone(), o.record.language.clone(), m, reason))
                .or_default() += 1;
        }
        records.push(o.record);
    }
    let skipped: Vec<SkipNote> = skip_counts
        .into_iter()
        .map(|((model_id, language, method, reason), instances)| SkipNote {
            model_id,
            language,
            method,
            instances,
            reason: reason.to_string(),
        })
        .collect();
    for s in &skipped {
        log::warn!(
            "{} skipped for {} instance(s) of {}/{}: {}",
            s.method,
            s.instances,
            s.model_id,
            s.language,
            s.reason
        );
    }

    normalize(&mut records, &instances, &methods, config.norm_tolerance)?;
    records.sort_by(|a, b| a.key().cmp(&b.key()));

    let mut aggregates = Vec::new();
    for &m in &methods {
        aggregates.extend(
            aggregate_ambiguity_entropies(&records, &instances, m)?
                .into_iter()
                .filter(|a| a.n_ambiguous + a.n_unambiguous > 0),
        );
    }
    aggregates.sort_by(|a, b| (&a.model_id, &a.language, a.method).cmp(&(&b.model_id, &b.language, b.method)));
    let systems = system_summaries(&records, &instances, &methods)?;

    std::fs::create_dir_all(&config.out).map_err(|e| Error::io(&config.out, e))?;
    write_metric_records(&records, &config.out.join(METRICS_FILE))?;
    write_aggregates(&config.out.join(AGGREGATES_FILE), &aggregates)?;
    write_systems(&config.out.join(SYSTEMS_FILE), &systems, &methods)?;

    let info = RunInfo {
        format_version: FORMAT_VERSION.to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        dataset_name: corpus.manifest.dataset_name.clone(),
        methods: methods.clone(),
        alpha: methods.contains(&Method::S3e).then_some(alpha),
        alpha_tuning: alpha_choice,
        alpha_grid: match &config.alpha {
            AlphaSetting::Tune(g) => Some(g.clone()),
            AlphaSetting::Fixed(_) => None,
        },
        entailment_threshold: config.entailment_threshold,
        similarity_floor: config.similarity_floor,
        norm_tolerance: config.norm_tolerance,
        bins: config.bins,
        dependent: config.dependent,
        references: config
            .references
            .iter()
            .map(|(c, l)| (c.name().to_string(), l.clone()))
            .collect(),
        seed: config.seed,
        records: records.len(),
        skipped: skipped.clone(),
    };
    write_json(&config.out.join(RUN_FILE), &info)?;

    Ok(ComputeSummary {
        records: records.len(),
        alpha: alpha_choice,
        skipped,
    })
}

fn compute_one(w: &WorkItem, methods: &[Method], config: &RunConfig, similarity: &SimilarityConfig) -> Result<Outcome> {
    let set = w.set;
    let context = |e: Error| {
        Error::validation(format!("{}/{}/{}: {e}", set.model_id, set.language, set.instance_id))
    };
    let gold = w.instance.gold_gender;
    let mut record = MetricRecord::new(&set.instance_id, &set.model_id, &set.language);
    record.num_samples = set.len();
    let mut skipped = Vec::new();

    for &m in methods {
        let estimate: EntropyEstimate = match m {
            Method::Se => match &set.entailment {
                Some(matrix) => {
                    let clusters = cluster_by_entailment(set, matrix, config.entailment_threshold).map_err(context)?;
                    semantic_entropy(&clusters).map_err(context)?
                }
                None => {
                    skipped.push((m, "no entailment matrix"));
                    continue;
                }
            },
            Method::S3e => {
                if !set.has_embeddings() {
                    skipped.push((m, "no embeddings"));
                    continue;
                }
                let sim = cosine_similarity_matrix(set, config.similarity_floor).map_err(context)?;
                s3e_entropy(&sim, similarity).map_err(context)?
            }
            Method::Ge => gender_entropy(set).map_err(context)?,
            Method::Shannon => sequence_entropy(set).map_err(context)?,
        };
        let by_label = class_means(set, BinaryGender::M, &estimate.surprisals).map_err(context)?;
        let mut mm = MethodMetrics {
            h: estimate.entropy,
            surprisal_m: by_label.correct,
            surprisal_f: by_label.incorrect,
            ..Default::default()
        };
        if let Some(g) = gold {
            let c = correctness_surprisals(set, g, &estimate.surprisals).map_err(context)?;
            mm.i_correct = c.correct;
            mm.i_incorrect = c.incorrect;
            if let (Some(ic), Some(ii)) = (c.correct, c.incorrect) {
                mm.delta_i = Some(relative_surprisal(ic, ii).map_err(context)?);
            }
        }
        record.methods.insert(m, mm);
    }

    if let Some(g) = gold {
        let log_probs: Vec<f64> = set.samples.iter().map(|s| s.log_prob).collect();
        let c = class_means(set, g, &log_probs).map_err(context)?;
        record.logprob_correct = c.correct;
        record.logprob_incorrect = c.incorrect;
        if let (Some(lc), Some(li)) = (c.correct, c.incorrect) {
            record.delta_logprob = Some(delta_logprob(lc, li).map_err(context)?);
        }
    }
    if let Some(score) = w.score {
        record.comet_score = comet_for(w.instance, score).map_err(context)?;
        record.prediction_gender = score.prediction_gender;
    }
    Ok(Outcome { record, skipped })
}

/// Quality score of one translation: the best reference for ambiguous
/// inputs, the gold-gender reference otherwise.
fn comet_for(instance: &Instance, score: &ScoreRecord) -> Result<Option<f64>> {
    if score.comet_scores.is_empty() {
        return Ok(None);
    }
    let all: Vec<f64> = score.comet_scores.iter().map(|r| r.score).collect();
    if let (false, Some(gold)) = (instance.ambiguous, instance.gold_gender) {
        if let Some(r) = score
            .comet_scores
            .iter()
            .find(|r| r.reference_id.eq_ignore_ascii_case(gold.code()))
        {
            return Ok(Some(r.score));
        }
    }
    max_reference_aggregation(&all).map(Some)
}

fn normalize(
    records: &mut [MetricRecord],
    instances: &BTreeMap<String, Instance>,
    methods: &[Method],
    tolerance: f64,
) -> Result<()> {
    let mut groups: BTreeMap<(String, String, String), Vec<usize>> = BTreeMap::new();
    for (k, r) in records.iter().enumerate() {
        let key = instances[&r.instance_id].contrast_key.clone();
        groups
            .entry((r.model_id.clone(), r.language.clone(), key))
            .or_default()
            .push(k);
    }
    for ((_, _, key), members) in groups {
        for &m in methods {
            let entropies: BTreeMap<String, f64> = members
                .iter()
                .filter_map(|&k| Some((records[k].instance_id.clone(), records[k].h(m)?)))
                .collect();
            if entropies.is_empty() {
                continue;
            }
            let group = ContrastGroup {
                contrast_key: key.clone(),
                member_instance_ids: entropies.keys().cloned().collect(),
            };
            let normalized = normalized_entropy(&group, &entropies, tolerance)?;
            for &k in &members {
                let r = &mut records[k];
                if let (Some(n), Some(mm)) = (normalized.get(&r.instance_id), r.methods.get_mut(&m)) {
                    mm.norm_h = *n;
                }
            }
        }
    }
    Ok(())
}

fn write_aggregates(path: &Path, rows: &[AmbiguityAggregate]) -> Result<()> {
    let err = |e: csv::Error| Error::validation(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    w.write_record([
        "model_id",
        "language",
        "method",
        "h_unambiguous",
        "h_ambiguous",
        "delta_h",
        "n_unambiguous",
        "n_ambiguous",
    ])
    .map_err(err)?;
    for a in rows {
        w.write_record([
            a.model_id.clone(),
            a.language.clone(),
            a.method.to_string(),
            fmt_opt(a.h_unambiguous),
            fmt_opt(a.h_ambiguous),
            fmt_opt(a.delta_h),
            a.n_unambiguous.to_string(),
            a.n_ambiguous.to_string(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::validation(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes the manifest's instances plus one name-augmented copy per
/// unambiguous instance and language with a configured name. Returns the
/// number of added instances.
pub fn augment_names(manifest_path: &Path, out: &Path, names: &NameTable) -> Result<usize> {
    let manifest = CorpusManifest::load(manifest_path)?;
    let root = manifest_path.parent().unwrap_or(Path::new("."));
    let instances_path = if manifest.instances.is_absolute() {
        manifest.instances.clone()
    } else {
        root.join(&manifest.instances)
    };
    let mut instances = load_instances(&instances_path)?;
    let mut added = Vec::new();
    for inst in &instances {
        if inst.ambiguous || inst.name_insertion.is_some() || inst.target_language.is_some() {
            continue;
        }
        for language in &manifest.languages {
            let Some(g) = inst.gold_gender else { continue };
            if names.get(language, g).is_none() {
                continue;
            }
            added.push(augment_with_names(inst, language, names)?);
        }
    }
    let n = added.len();
    instances.extend(added);
    for inst in &mut instances {
        if inst.name_insertion.is_some() {
            inst.contrast_key = crate::bias::template_key(inst);
        }
    }
    write_instances(out, &instances)?;
    Ok(n)
}
