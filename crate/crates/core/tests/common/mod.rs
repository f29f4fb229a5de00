//! Synthetic corpora for integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use mtbias::bias::{
    augment_with_names, BinaryGender, CueAnnotations, FocusNoun, Gender, Instance, MethodMetrics, MetricRecord,
    NameInsertion, NameTable, RoleCue,
};
use mtbias::dataset::{
    write_embeddings, write_entailment, write_instances, write_jsonl, write_metric_records, write_sample_sets,
    CorpusManifest, ReferenceScore, SamplesEntry, ScoreRecord, FORMAT_VERSION,
};
use mtbias::metrics::{EntailmentMatrix, GenderLabel, Method, Sample, SampleSet, SamplingMeta};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const FRAMES: [&str; 3] = [
    "The {noun} called the {other} because {pron} was late.",
    "The {other} thanked the {noun} after {pron} fixed the sink.",
    "The {noun} told the {other} that {pron} would finish the report.",
];
const NOUNS: [&str; 8] = ["mechanic", "nurse", "developer", "baker", "lawyer", "cleaner", "engineer", "secretary"];
const OTHERS: [&str; 4] = ["client", "visitor", "guard", "tenant"];
const ROLES: [RoleCue; 5] = [RoleCue::SubjF, RoleCue::SubjM, RoleCue::ObjF, RoleCue::ObjM, RoleCue::None];
const GENDERS: [Gender; 3] = [Gender::F, Gender::M, Gender::N];

#[derive(Debug, Clone)]
pub struct CorpusSpec {
    pub models: Vec<String>,
    pub languages: Vec<String>,
    pub templates: usize,
    pub num_samples: usize,
    pub dim: usize,
    pub seed: u64,
    pub embeddings: bool,
    /// Embeddings in a binary sidecar instead of inline.
    pub sidecar: bool,
    pub entailment: bool,
    pub scores: bool,
    pub names: bool,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            models: vec!["opus".into(), "m2m".into(), "deb-opus".into()],
            languages: vec!["es".into(), "ru".into()],
            templates: 8,
            num_samples: 12,
            dim: 6,
            seed: 7,
            embeddings: true,
            sidecar: true,
            entailment: true,
            scores: true,
            names: true,
        }
    }
}

fn pronoun_word(g: Gender) -> &'static str {
    match g {
        Gender::M => "he",
        Gender::F => "she",
        Gender::N => "they",
    }
}

pub fn template_instances(templates: usize, with_ru: bool) -> Vec<Instance> {
    let mut out = Vec::new();
    for t in 0..templates {
        let noun = NOUNS[t % NOUNS.len()];
        let other = OTHERS[t % OTHERS.len()];
        let frame = FRAMES[t % FRAMES.len()];
        for pronoun in [Gender::M, Gender::F, Gender::N] {
            let text = frame
                .replace("{noun}", noun)
                .replace("{other}", other)
                .replace("{pron}", pronoun_word(pronoun));
            let start = text.find(noun).unwrap();
            let gold = match pronoun {
                Gender::M => Some(BinaryGender::M),
                Gender::F => Some(BinaryGender::F),
                Gender::N => None,
            };
            out.push(Instance {
                instance_id: format!("t{t:02}-{}", pronoun_word(pronoun)),
                source_text: text.clone(),
                focus_noun: FocusNoun {
                    text: noun.to_string(),
                    start,
                    end: start + noun.len(),
                },
                pronoun_gender: pronoun,
                stereotype_gender: GENDERS[t % 3],
                cues: CueAnnotations {
                    recency: GENDERS[t % 3],
                    ic_role: ROLES[t % 5],
                    stereotype_role: ROLES[(t + 2) % 5],
                    subject: GENDERS[(t + 1) % 3],
                    names_present: false,
                },
                ambiguous: pronoun == Gender::N,
                contrast_key: String::new(),
                gold_gender: gold,
                default_masculine: with_ru && t % 4 == 0,
                target_language: None,
                name_insertion: None,
                extra: BTreeMap::new(),
            });
        }
    }
    out
}

fn label_for(rng: &mut ChaCha8Rng, inst: &Instance, bias: f64) -> GenderLabel {
    if rng.random_bool(0.03) {
        return GenderLabel::Unknown;
    }
    let p_masc = match inst.gold_gender {
        Some(BinaryGender::M) => 0.9,
        Some(BinaryGender::F) => 0.9 - bias,
        None => 0.5 + bias / 2.0,
    };
    if rng.random_bool(p_masc.clamp(0.0, 1.0)) {
        GenderLabel::Masculine
    } else {
        GenderLabel::Feminine
    }
}

fn sample_set(rng: &mut ChaCha8Rng, inst: &Instance, model: &str, language: &str, n: usize, dim: usize, bias: f64) -> (SampleSet, Vec<(GenderLabel, usize)>) {
    let noise = Normal::new(0.0, 0.1).unwrap();
    let mut keys = Vec::with_capacity(n);
    let samples = (0..n)
        .map(|_| {
            let label = label_for(rng, inst, bias);
            let variant = rng.random_range(0..3usize);
            keys.push((label, variant));
            let mut embedding: Vec<f64> = (0..dim).map(|_| noise.sample(rng)).collect();
            let axis = match label {
                GenderLabel::Masculine => 0,
                GenderLabel::Feminine => 1,
                _ => 2,
            };
            embedding[axis] += 1.0;
            embedding[3] += 0.3 * variant as f64;
            Sample {
                text: format!("{} translation {variant} of {}", label.code(), inst.instance_id),
                log_prob: -rng.random_range(0.5..8.0),
                embedding: Some(embedding),
                gender_label: label,
            }
        })
        .collect();
    let mut set = SampleSet::new(&inst.instance_id, model, language, samples).unwrap();
    set.sampling_meta = Some(SamplingMeta {
        num_samples: n,
        epsilon: 0.02,
        seed: 1234,
    });
    (set, keys)
}

fn entailment(rng: &mut ChaCha8Rng, keys: &[(GenderLabel, usize)]) -> EntailmentMatrix {
    let n = keys.len();
    let mut scores = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            scores[i * n + j] = if i == j {
                1.0
            } else if keys[i] == keys[j] {
                rng.random_range(0.9..0.99)
            } else {
                rng.random_range(0.0..0.4)
            };
        }
    }
    EntailmentMatrix::new(n, scores).unwrap()
}

/// Writes a complete corpus into `dir` and returns the manifest path.
pub fn write_corpus(dir: &Path, spec: &CorpusSpec) -> PathBuf {
    let has_ru = spec.languages.iter().any(|l| l == "ru");
    let mut instances = template_instances(spec.templates, has_ru);
    if spec.names {
        let table = NameTable::default();
        let mut added = Vec::new();
        for inst in instances.iter().filter(|i| !i.ambiguous) {
            for lang in &spec.languages {
                added.push(augment_with_names(inst, lang, &table).unwrap());
            }
        }
        instances.extend(added);
    }
    write_instances(&dir.join("instances.jsonl"), &instances).unwrap();

    let mut entries = Vec::new();
    let mut scores = Vec::new();
    for (mi, model) in spec.models.iter().enumerate() {
        for (li, lang) in spec.languages.iter().enumerate() {
            let bias = 0.15 * mi as f64 + 0.1 * li as f64;
            let mut sets = Vec::new();
            let mut matrices = BTreeMap::new();
            for (ii, inst) in instances.iter().filter(|i| i.applies_to(lang)).enumerate() {
                let seed = spec.seed.wrapping_mul(1_000_003) + ((mi * 131 + li) * 100_003 + ii) as u64;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let (set, keys) = sample_set(&mut rng, inst, model, lang, spec.num_samples, spec.dim, bias);
                if spec.entailment {
                    matrices.insert(inst.instance_id.clone(), entailment(&mut rng, &keys));
                }
                if spec.scores {
                    let comet = |id: &str, rng: &mut ChaCha8Rng| ReferenceScore {
                        reference_id: id.to_string(),
                        score: (rng.random_range(30.0..95.0_f64) * 100.0).round() / 100.0,
                    };
                    let comet_scores = match inst.gold_gender {
                        Some(g) => vec![comet(g.code(), &mut rng)],
                        None => vec![comet("F", &mut rng), comet("M", &mut rng)],
                    };
                    let masc = keys.iter().filter(|k| k.0 == GenderLabel::Masculine).count();
                    let fem = keys.iter().filter(|k| k.0 == GenderLabel::Feminine).count();
                    scores.push(ScoreRecord {
                        instance_id: inst.instance_id.clone(),
                        model_id: model.clone(),
                        language: lang.clone(),
                        comet_scores,
                        prediction_gender: Some(if masc >= fem { GenderLabel::Masculine } else { GenderLabel::Feminine }),
                    });
                }
                sets.push(set);
            }
            let samples_name = format!("samples.{model}.{lang}.jsonl");
            let mut entry = SamplesEntry {
                model: model.clone(),
                language: lang.clone(),
                path: samples_name.clone().into(),
                embeddings: None,
                entailment: None,
            };
            if !spec.embeddings {
                for s in &mut sets {
                    for x in &mut s.samples {
                        x.embedding = None;
                    }
                }
            } else if spec.sidecar {
                let rows: Vec<Vec<f32>> = sets
                    .iter()
                    .flat_map(|s| s.samples.iter())
                    .map(|s| s.embedding.as_ref().unwrap().iter().map(|&v| v as f32).collect())
                    .collect();
                let name = format!("embeddings.{model}.{lang}.f32");
                write_embeddings(&dir.join(&name), &rows).unwrap();
                for s in &mut sets {
                    for x in &mut s.samples {
                        x.embedding = None;
                    }
                }
                entry.embeddings = Some(name.into());
            }
            write_sample_sets(&dir.join(&samples_name), &sets).unwrap();
            if spec.entailment {
                let name = format!("entailment.{model}.{lang}.jsonl");
                write_entailment(&dir.join(&name), &matrices).unwrap();
                entry.entailment = Some(name.into());
            }
            entries.push(entry);
        }
    }
    if spec.scores {
        write_jsonl(&dir.join("scores.jsonl"), &scores).unwrap();
    }
    let manifest = CorpusManifest {
        dataset_name: "synthetic".into(),
        format_version: FORMAT_VERSION.into(),
        languages: spec.languages.clone(),
        models: spec.models.clone(),
        instances: "instances.jsonl".into(),
        samples: entries,
        scores: spec.scores.then(|| "scores.jsonl".into()),
    };
    let path = dir.join("manifest.json");
    manifest.save(&path).unwrap();
    path
}

/// Corpus with a planted +0.30 entropy shift on name-bearing instances and
/// N(0, 0.05) noise. Every other cue cycles through its levels by replicate
/// so each level sees the same multiset of values. Writes `instances.jsonl`,
/// `manifest.json` and `<out>/metrics.csv`; returns the manifest path.
pub fn write_planted_names_corpus(dir: &Path, out: &Path, base_draws: usize, replicates: usize, seed: u64) -> PathBuf {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.05).unwrap();
    let e: Vec<f64> = (0..base_draws).map(|_| noise.sample(&mut rng)).collect();
    let mut instances = Vec::new();
    let mut records = Vec::new();
    for r in 0..replicates {
        let pronoun = GENDERS[r % 3];
        for (j, &ej) in e.iter().enumerate() {
            for named in [false, true] {
                let noun = "mechanic";
                let plain = format!("The {noun} told the client that {} would call.", pronoun_word(pronoun));
                let (text, insertion) = if named {
                    let offset = 4 + noun.len();
                    (
                        format!("{} Ivan{}", &plain[..offset], &plain[offset..]),
                        Some(NameInsertion {
                            name: "Ivan".into(),
                            offset,
                        }),
                    )
                } else {
                    (plain, None)
                };
                let id = format!("p{r:02}-{j}{}", if named { "+name" } else { "" });
                instances.push(Instance {
                    instance_id: id.clone(),
                    source_text: text,
                    focus_noun: FocusNoun {
                        text: noun.into(),
                        start: 4,
                        end: 4 + noun.len(),
                    },
                    pronoun_gender: pronoun,
                    stereotype_gender: Gender::M,
                    cues: CueAnnotations {
                        recency: GENDERS[r % 3],
                        ic_role: ROLES[r % 5],
                        stereotype_role: ROLES[(r / 3) % 5],
                        subject: GENDERS[(r / 2) % 3],
                        names_present: named,
                    },
                    ambiguous: pronoun == Gender::N,
                    contrast_key: String::new(),
                    gold_gender: match pronoun {
                        Gender::M => Some(BinaryGender::M),
                        Gender::F => Some(BinaryGender::F),
                        Gender::N => None,
                    },
                    default_masculine: r % 2 == 0,
                    target_language: None,
                    name_insertion: insertion,
                    extra: BTreeMap::new(),
                });
                let mut rec = MetricRecord::new(id, "planted", "ru");
                rec.num_samples = 128;
                rec.methods.insert(
                    Method::S3e,
                    MethodMetrics {
                        h: if named { 0.3 + ej } else { ej },
                        ..Default::default()
                    },
                );
                records.push(rec);
            }
        }
    }
    write_instances(&dir.join("instances.jsonl"), &instances).unwrap();
    std::fs::create_dir_all(out).unwrap();
    write_metric_records(&records, &out.join("metrics.csv")).unwrap();
    let manifest = CorpusManifest {
        dataset_name: "planted".into(),
        format_version: FORMAT_VERSION.into(),
        languages: vec!["ru".into()],
        models: vec!["planted".into()],
        instances: "instances.jsonl".into(),
        samples: vec![],
        scores: None,
    };
    let path = dir.join("manifest.json");
    manifest.save(&path).unwrap();
    path
}
