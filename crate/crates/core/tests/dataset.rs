mod common;

use std::collections::BTreeMap;

use common::{template_instances, write_corpus, CorpusSpec};
use mtbias::bias::{BinaryGender, MethodMetrics, MetricRecord};
use mtbias::dataset::{
    load_corpus, load_instances, load_sample_sets, read_jsonl, read_metric_records, validate_corpus,
    write_embeddings, write_instances, write_jsonl, write_metric_records, CorpusManifest, ScoreRecord, Severity,
};
use mtbias::metrics::{GenderLabel, Method};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small() -> CorpusSpec {
    CorpusSpec {
        templates: 3,
        num_samples: 6,
        ..CorpusSpec::default()
    }
}

#[test]
fn empty_jsonl_is_empty_list() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("empty.jsonl");
    std::fs::write(&p, "").unwrap();
    let rows: Vec<ScoreRecord> = read_jsonl(&p).unwrap();
    assert!(rows.is_empty());
    std::fs::write(&p, "\n\n").unwrap();
    assert!(read_jsonl::<ScoreRecord>(&p).unwrap().is_empty());
}

#[test]
fn three_pronoun_variants_share_one_contrast_key() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("instances.jsonl");
    write_instances(&p, &template_instances(1, false)).unwrap();
    let loaded = load_instances(&p).unwrap();
    assert_eq!(loaded.len(), 3);
    assert!(loaded.iter().all(|i| !i.contrast_key.is_empty()));
    assert!(loaded.windows(2).all(|w| w[0].contrast_key == w[1].contrast_key));
}

#[test]
fn ambiguous_item_with_gold_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("instances.jsonl");
    let mut rows = template_instances(1, false);
    let amb = rows.iter_mut().find(|i| i.ambiguous).unwrap();
    amb.gold_gender = Some(BinaryGender::F);
    write_instances(&p, &rows).unwrap();
    let err = load_instances(&p).unwrap_err().to_string();
    assert!(err.contains("record 3"), "{err}");
}

#[test]
fn positive_log_prob_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let spec = CorpusSpec {
        sidecar: false,
        ..small()
    };
    write_corpus(dir.path(), &spec);
    let p = dir.path().join("samples.opus.es.jsonl");
    let text = std::fs::read_to_string(&p).unwrap();
    let mut lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    lines[1]["samples"][0]["log_prob"] = serde_json::json!(0.5);
    write_jsonl(&p, &lines).unwrap();
    let err = load_sample_sets(&p, None).unwrap_err().to_string();
    assert!(err.contains(":2"), "{err}");
}

#[test]
fn sidecar_row_count_must_match() {
    let dir = tempfile::tempdir().unwrap();
    write_corpus(dir.path(), &small());
    let samples = dir.path().join("samples.opus.es.jsonl");
    let sidecar = dir.path().join("embeddings.opus.es.f32");
    let sets = load_sample_sets(&samples, Some(&sidecar)).unwrap();
    let total: usize = sets.iter().map(|s| s.len()).sum();
    assert!(sets.iter().all(|s| s.samples.iter().all(|x| x.embedding.as_ref().unwrap().len() == 6)));

    let rows: Vec<Vec<f32>> = (0..total - 1).map(|_| vec![1.0; 6]).collect();
    write_embeddings(&sidecar, &rows).unwrap();
    assert!(load_sample_sets(&samples, Some(&sidecar)).is_err());
}

#[test]
fn missing_coverage_is_one_violation() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_corpus(dir.path(), &small());
    assert!(validate_corpus(&manifest).passes(true));
    let p = dir.path().join("samples.m2m.ru.jsonl");
    let text = std::fs::read_to_string(&p).unwrap();
    assert!(text.lines().next().unwrap().contains("\"t00-he\""));
    let kept: Vec<&str> = text.lines().skip(1).collect();
    std::fs::write(&p, kept.join("\n") + "\n").unwrap();
    // Keep the sidecar consistent so only coverage is at fault.
    let sets = load_sample_sets(&p, None);
    assert!(sets.is_ok());
    let side = dir.path().join("embeddings.m2m.ru.f32");
    let total: usize = sets.unwrap().iter().map(|s| s.len()).sum();
    write_embeddings(&side, &vec![vec![0.5f32; 6]; total]).unwrap();

    let ent = dir.path().join("entailment.m2m.ru.jsonl");
    let text = std::fs::read_to_string(&ent).unwrap();
    let kept: Vec<&str> = text.lines().filter(|l| !l.contains("\"t00-he\"")).collect();
    std::fs::write(&ent, kept.join("\n") + "\n").unwrap();

    let report = validate_corpus(&manifest);
    let errors: Vec<_> = report.errors().collect();
    assert_eq!(errors.len(), 1, "{errors:?}");
    assert!(errors[0].message.contains("missing coverage"));
}

#[test]
fn single_reference_ambiguous_item_warns() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_corpus(dir.path(), &small());
    let p = dir.path().join("scores.jsonl");
    let mut rows: Vec<ScoreRecord> = read_jsonl(&p).unwrap();
    let target = rows.iter_mut().find(|r| r.comet_scores.len() == 2).unwrap();
    target.comet_scores.truncate(1);
    write_jsonl(&p, &rows).unwrap();
    let report = validate_corpus(&manifest);
    assert_eq!(report.errors().count(), 0);
    let warnings: Vec<_> = report.warnings().collect();
    assert_eq!(warnings.len(), 1);
    assert_eq!(warnings[0].severity, Severity::Warning);
    assert!(report.passes(false) && !report.passes(true));
}

#[test]
fn unsupported_format_version() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_corpus(dir.path(), &small());
    let mut m = CorpusManifest::load(&manifest).unwrap();
    m.format_version = "1.4.0".into();
    m.save(&manifest).unwrap();
    assert!(load_corpus(&manifest).is_ok());
    m.format_version = "2.0.0".into();
    m.save(&manifest).unwrap();
    assert!(load_corpus(&manifest).is_err());
    assert!(!validate_corpus(&manifest).passes(false));
}

fn random_record(rng: &mut ChaCha8Rng, k: usize) -> MetricRecord {
    let mut r = MetricRecord::new(format!("inst-{k:03}"), "opus", ["es", "uk"][k % 2]);
    r.num_samples = rng.random_range(1..100);
    let opt = |rng: &mut ChaCha8Rng| rng.random_bool(0.8).then(|| rng.random::<f64>() * 10.0 - 5.0);
    for m in Method::ALL {
        r.methods.insert(
            m,
            MethodMetrics {
                h: rng.random::<f64>() * 3.0,
                surprisal_m: opt(rng),
                surprisal_f: opt(rng),
                norm_h: opt(rng),
                i_correct: opt(rng),
                i_incorrect: opt(rng),
                delta_i: opt(rng),
            },
        );
    }
    r.logprob_correct = opt(rng);
    r.logprob_incorrect = opt(rng);
    r.delta_logprob = opt(rng);
    r.comet_score = opt(rng).map(f64::abs);
    r.prediction_gender = [None, Some(GenderLabel::Masculine), Some(GenderLabel::Feminine)][k % 3];
    r
}

#[test]
fn metric_records_round_trip_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let records: Vec<MetricRecord> = (0..100).map(|k| random_record(&mut rng, k)).collect();
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    write_metric_records(&records, &a).unwrap();
    let back = read_metric_records(&a).unwrap();
    assert_eq!(back, records);
    write_metric_records(&back, &b).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn empty_record_list_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("m.csv");
    write_metric_records(&[], &p).unwrap();
    let text = std::fs::read_to_string(&p).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("instance_id,model_id,language,num_samples"));
    assert!(read_metric_records(&p).unwrap().is_empty());
}

#[test]
fn corpus_loads_with_defaults_applied() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_corpus(dir.path(), &small());
    let corpus = load_corpus(&manifest).unwrap();
    let ids: BTreeMap<_, _> = corpus.instance_map();
    assert_eq!(ids.len(), 9 + 12);
    assert!(ids["t00-he+name.ru"].default_masculine);
    assert!(!ids["t00-he+name.es"].default_masculine);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn validation_never_panics_on_garbage(
        target in 0usize..4,
        bytes in proptest::collection::vec(any::<u8>(), 0..400),
        keep_prefix in any::<bool>(),
    ) {
        let dir = tempfile::tempdir().unwrap();
        let manifest = write_corpus(dir.path(), &CorpusSpec { templates: 1, num_samples: 3, models: vec!["m".into()], ..CorpusSpec::default() });
        let file = ["manifest.json", "instances.jsonl", "samples.m.es.jsonl", "scores.jsonl"][target];
        let p = dir.path().join(file);
        let mut content = if keep_prefix { std::fs::read(&p).unwrap() } else { Vec::new() };
        content.extend_from_slice(&bytes);
        std::fs::write(&p, content).unwrap();
        let report = validate_corpus(&manifest);
        let _ = report.to_json();
        if !bytes.iter().all(|b| b.is_ascii_whitespace()) && !keep_prefix {
            prop_assert!(!report.passes(false));
        }
    }
}
