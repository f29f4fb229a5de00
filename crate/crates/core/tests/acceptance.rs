//! Acceptance gate: one PASS/FAIL line per criterion; exits non-zero if any
//! criterion fails.

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};

use mtbias::bias::{normalized_entropy, relative_entropy, ContrastGroup};
use mtbias::dataset::read_effect_tables;
use mtbias::metrics::{
    cluster_by_entailment, cosine_similarity_matrix, gender_entropy, s3e_entropy, semantic_entropy,
    shannon_entropy, ClusterAssignment, EntailmentMatrix, GenderLabel, Sample, SampleSet, SimilarityConfig,
    SimilarityMatrix,
};
use mtbias::pipeline::{analyze, compute, report, Dependent, RunConfig, EFFECTS_FILE};
use mtbias::stats::{kendall_tau_b, rank_positions, spearman_rho};
use mtbias::Executor;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// (language, model, H unambiguous, H ambiguous, reported relative entropy)
const TABLE_3: [(&str, &str, f64, f64, f64); 12] = [
    ("ES", "Opus-MT", 1.23, 1.12, 0.09),
    ("ES", "deb-Opus-MT", 0.97, 0.89, 0.08),
    ("ES", "m2m100", 1.79, 1.45, 0.19),
    ("FR", "Opus-MT", 1.79, 1.43, 0.20),
    ("FR", "deb-Opus-MT", 1.21, 1.08, 0.11),
    ("FR", "m2m100", 3.22, 2.78, 0.14),
    ("UK", "Opus-MT", 1.96, 2.16, -0.10),
    ("UK", "deb-Opus-MT", 1.98, 2.15, -0.09),
    ("UK", "m2m100", 2.05, 2.28, -0.11),
    ("RU", "Opus-MT", 1.56, 1.68, -0.08),
    ("RU", "deb-Opus-MT", 1.05, 0.97, 0.08),
    ("RU", "m2m100", 1.83, 2.29, -0.25),
];

/// Gender accuracy and relative surprisal (S3E) per system, same row order.
const TABLE_1_ACC: [f64; 12] = [67.95, 68.13, 70.77, 64.27, 64.79, 61.66, 45.34, 46.12, 47.76, 48.57, 48.42, 48.49];
const TABLE_1_DELTA_I: [f64; 12] = [-0.10, -0.13, -0.13, -0.04, -0.08, -0.07, -0.03, -0.03, -0.02, 0.00, -0.03, -0.03];

fn delta_h_reproduction() -> Outcome {
    let start = Instant::now();
    let mut worst = (0.0_f64, "");
    let mut tight_ok = true;
    let mut tight = Vec::new();
    for (lang, model, u, a, reported) in TABLE_3 {
        let got = relative_entropy(u, a).unwrap();
        let err = (got - reported).abs();
        if err > worst.0 {
            worst = (err, model);
        }
        if model == "Opus-MT" && (lang == "ES" || lang == "UK") {
            tight_ok &= err <= 0.005;
            tight.push(format!("{lang} {got:.4}"));
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst.0 <= 0.03 && tight_ok && elapsed < Duration::from_secs(1),
        format!(
            "max |err| {:.4} over 12 rows (<= 0.03); Opus-MT {} (<= 0.005); {:?}",
            worst.0,
            tight.join(", "),
            elapsed
        ),
    )
}

fn rank_correlation_reproduction() -> Outcome {
    let start = Instant::now();
    let acc = rank_positions(&TABLE_1_ACC, true);
    let di = rank_positions(&TABLE_1_DELTA_I, true);
    let rho = spearman_rho(&acc, &di).unwrap().unwrap();
    let tau = kendall_tau_b(&acc, &di).unwrap().unwrap();
    let raw_rho = spearman_rho(&TABLE_1_ACC, &TABLE_1_DELTA_I).unwrap().unwrap();
    let raw_tau = kendall_tau_b(&TABLE_1_ACC, &TABLE_1_DELTA_I).unwrap().unwrap();
    let elapsed = start.elapsed();
    outcome(
        (rho + 0.78).abs() <= 0.05 && (tau + 0.58).abs() <= 0.05 && elapsed < Duration::from_secs(1),
        format!(
            "rank positions: rho {rho:.4} (target -0.78), tau {tau:.4} (target -0.58); \
             average-rank ties on raw values: rho {raw_rho:.4}, tau {raw_tau:.4}; {elapsed:?}"
        ),
    )
}

fn random_assignment(rng: &mut ChaCha8Rng) -> ClusterAssignment {
    let n = rng.random_range(1..=256);
    let k = rng.random_range(1..=16usize);
    let keys: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
    ClusterAssignment::from_keys(&keys).unwrap()
}

fn se_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let a = random_assignment(&mut rng);
        let n = a.len() as f64;
        let p: Vec<f64> = a.cluster_sizes().iter().map(|&c| c as f64 / n).collect();
        let diff = (semantic_entropy(&a).unwrap().entropy - shannon_entropy(&p).unwrap()).abs();
        worst = worst.max(diff);
    }
    outcome(worst <= 1e-12, format!("1000 assignments, max |diff| {worst:e} (<= 1e-12)"))
}

fn s3e_degeneration() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let floor = 1e-12;
    let config = SimilarityConfig::new(1.0, floor).unwrap();
    let mut worst = 0.0_f64;
    for _ in 0..200 {
        let a = random_assignment(&mut rng);
        let c = a.cluster_of();
        let n = c.len();
        let values = (0..n * n)
            .map(|k| if c[k / n] == c[k % n] { 1.0 } else { floor })
            .collect();
        let s = SimilarityMatrix::new(n, values).unwrap();
        let diff = (s3e_entropy(&s, &config).unwrap().entropy - semantic_entropy(&a).unwrap().entropy).abs();
        worst = worst.max(diff);
    }
    outcome(worst <= 1e-6, format!("200 clusterings, max |diff| {worst:e} (<= 1e-6)"))
}

fn norm_h_invariant() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let tolerance = 1e-9;
    let mut worst = 0.0_f64;
    let mut degenerate_ok = true;
    for g in 0..500 {
        let size = rng.random_range(1..=3);
        let ids: Vec<String> = (0..size).map(|k| format!("g{g}-{k}")).collect();
        let group = ContrastGroup {
            contrast_key: format!("g{g}"),
            member_instance_ids: ids.clone(),
        };
        let live: BTreeMap<String, f64> = ids.iter().map(|id| (id.clone(), rng.random_range(0.01..4.0))).collect();
        let norm = normalized_entropy(&group, &live, tolerance).unwrap();
        let mean = norm.values().map(|v| v.unwrap()).sum::<f64>() / size as f64;
        worst = worst.max((mean - 1.0).abs());

        let dead: BTreeMap<String, f64> = ids.iter().map(|id| (id.clone(), rng.random_range(0.0..1e-10))).collect();
        degenerate_ok &= normalized_entropy(&group, &dead, tolerance).unwrap().values().all(Option::is_none);
    }
    outcome(
        worst <= 1e-9 && degenerate_ok,
        format!("500 groups, max |mean - 1| {worst:e} (<= 1e-9); degenerate groups all missing: {degenerate_ok}"),
    )
}

fn planted_anova() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let manifest = common::write_planted_names_corpus(dir.path(), &out, 7, 30, 11);
    let mut config = RunConfig::new(&manifest, &out);
    config.dependent = Dependent::Raw;
    analyze(&config, &Executor::sequential()).unwrap();
    let rows = read_effect_tables(&out.join(EFFECTS_FILE)).unwrap();
    let elapsed = start.elapsed();

    let names: Vec<_> = rows.iter().filter(|r| r.estimate.cue == "Names").collect();
    let others: Vec<_> = rows.iter().filter(|r| r.estimate.cue != "Names").collect();
    let (names_ok, names_detail) = match names.as_slice() {
        [n] => {
            let e = &n.estimate;
            let p = e.p_value.unwrap_or(1.0);
            (
                (e.coefficient - 0.3).abs() <= 0.03 && p < 1e-3,
                format!("Names {:.4} (n={}/{}, p={p:e})", e.coefficient, e.n_level, e.n_reference),
            )
        }
        _ => (false, format!("{} Names rows", names.len())),
    };
    let worst = others.iter().map(|r| r.estimate.coefficient.abs()).fold(0.0, f64::max);
    let any_sig = others.iter().any(|r| r.estimate.significant);
    let cues: std::collections::BTreeSet<&str> = others.iter().map(|r| r.estimate.cue.as_str()).collect();
    outcome(
        names_ok && worst <= 0.03 && !any_sig && cues.len() == 7 && elapsed < Duration::from_secs(5),
        format!(
            "{names_detail}; {} other levels over {} cues, max |coef| {worst:e}, any significant: {any_sig}; {elapsed:?}",
            others.len(),
            cues.len()
        ),
    )
}

fn labelled(labels: &[(GenderLabel, usize)]) -> SampleSet {
    let samples = labels
        .iter()
        .flat_map(|&(g, n)| std::iter::repeat_n(g, n))
        .map(|g| Sample {
            text: String::new(),
            log_prob: -1.0,
            embedding: None,
            gender_label: g,
        })
        .collect();
    SampleSet::new("x", "m", "es", samples).unwrap()
}

fn analytic_fixtures() -> Outcome {
    let mut failures = Vec::new();
    let mut total = 1;
    let mut check = |name: &str, got: f64, want: f64, tol: f64| {
        total += 1;
        if (got - want).abs() > tol {
            failures.push(format!("{name}: {got} != {want}"));
        }
    };
    let ln2 = std::f64::consts::LN_2;
    check("shannon [1]", shannon_entropy(&[1.0]).unwrap(), 0.0, 0.0);
    check("shannon [.5,.5]", shannon_entropy(&[0.5, 0.5]).unwrap(), ln2, 1e-12);
    check("shannon [.7,.2,.1]", shannon_entropy(&[0.7, 0.2, 0.1]).unwrap(), 0.8018, 1e-4);

    let sizes = |s: &[usize]| {
        let keys: Vec<usize> = s.iter().enumerate().flat_map(|(c, &n)| std::iter::repeat_n(c, n)).collect();
        semantic_entropy(&ClusterAssignment::from_keys(&keys).unwrap()).unwrap().entropy
    };
    check("SE 128", sizes(&[128]), 0.0, 0.0);
    check("SE 64/64", sizes(&[64, 64]), ln2, 1e-12);
    check("SE 64/32/32", sizes(&[64, 32, 32]), 1.0397, 1e-4);

    use GenderLabel::{Feminine as F, Masculine as M};
    check("GE all M", gender_entropy(&labelled(&[(M, 128)])).unwrap().entropy, 0.0, 0.0);
    check("GE 64/64", gender_entropy(&labelled(&[(M, 64), (F, 64)])).unwrap().entropy, ln2, 1e-12);
    check("GE 96/32", gender_entropy(&labelled(&[(M, 96), (F, 32)])).unwrap().entropy, 0.5623, 1e-4);

    let with_embeddings = |vs: &[[f64; 2]]| {
        let samples = vs
            .iter()
            .map(|v| Sample {
                text: String::new(),
                log_prob: -1.0,
                embedding: Some(v.to_vec()),
                gender_label: GenderLabel::Unknown,
            })
            .collect();
        SampleSet::new("x", "m", "es", samples).unwrap()
    };
    let same = cosine_similarity_matrix(&with_embeddings(&[[1.0, 2.0]; 3]), 1e-6).unwrap();
    check("cosine identical", (0..9).map(|k| same.get(k / 3, k % 3)).fold(1.0, f64::min), 1.0, 0.0);
    let ortho = cosine_similarity_matrix(&with_embeddings(&[[1.0, 0.0], [0.0, 1.0]]), 1e-6).unwrap();
    check("cosine orthogonal", ortho.get(0, 1), 1e-6, 0.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let diag = cosine_similarity_matrix(&with_embeddings(&[[1.0, 0.0], [h, h]]), 1e-6).unwrap();
    #[allow(clippy::approx_constant)]
    check("cosine 45deg", diag.get(0, 1), 0.7071, 1e-4);

    let cfg = SimilarityConfig::default();
    let ones = SimilarityMatrix::new(3, vec![1.0; 9]).unwrap();
    for alpha in [0.5, 1.0, 4.0] {
        let c = SimilarityConfig::new(alpha, 1e-6).unwrap();
        check("S3E all ones", s3e_entropy(&ones, &c).unwrap().entropy, 0.0, 0.0);
    }
    let two = SimilarityMatrix::from_rows(&[
        vec![1.0, 1.0, 1e-6, 1e-6],
        vec![1.0, 1.0, 1e-6, 1e-6],
        vec![1e-6, 1e-6, 1.0, 1.0],
        vec![1e-6, 1e-6, 1.0, 1.0],
    ])
    .unwrap();
    check("S3E two groups", s3e_entropy(&two, &cfg).unwrap().entropy, -(0.5 + 0.5e-6_f64).ln(), 1e-12);
    let s = SimilarityMatrix::from_rows(&[vec![1.0, 0.8, 0.2], vec![0.8, 1.0, 0.4], vec![0.2, 0.4, 1.0]]).unwrap();
    let est = s3e_entropy(&s, &cfg).unwrap();
    for (k, want) in [0.4055, 0.3102, 0.6286].into_iter().enumerate() {
        check("S3E surprisal", est.surprisals[k], want, 1e-4);
    }
    check("S3E 3x3", est.entropy, 0.4481, 1e-4);

    let cluster_count = |off: f64| {
        let n = 5;
        let scores = (0..n * n).map(|k| if k / n == k % n { 1.0 } else { off }).collect();
        let set = labelled(&[(M, n)]);
        cluster_by_entailment(&set, &EntailmentMatrix::new(n, scores).unwrap(), 0.5)
            .unwrap()
            .num_clusters() as f64
    };
    check("clusters all entail", cluster_count(0.99), 1.0, 0.0);
    check("clusters none entail", cluster_count(0.01), 5.0, 0.0);
    let pairs = EntailmentMatrix::from_rows(&[
        vec![1.0, 0.9, 0.1, 0.2],
        vec![0.8, 1.0, 0.3, 0.1],
        vec![0.2, 0.1, 1.0, 0.7],
        vec![0.1, 0.4, 0.6, 1.0],
    ])
    .unwrap();
    let a = cluster_by_entailment(&labelled(&[(M, 4)]), &pairs, 0.5).unwrap();
    if a.cluster_of() != [0, 0, 1, 1] {
        failures.push(format!("two pairs: {:?}", a.cluster_of()));
    }

    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{total} fixtures (ln 2, 1.0397, 0.5623, 0.4481 within 1e-4)")
        } else {
            failures.join("; ")
        },
    )
}

fn hash_tree(root: &Path) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let digest = Sha256::digest(std::fs::read(&p).unwrap());
                let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
                out.insert(p.strip_prefix(root).unwrap().display().to_string(), hex);
            }
        }
    }
    out
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let manifest = common::write_corpus(dir.path(), &common::CorpusSpec::default());
    let mut hashes = Vec::new();
    for jobs in [1, 4] {
        for run in 0..3 {
            let out = dir.path().join(format!("out-{jobs}-{run}"));
            let mut config = RunConfig::new(&manifest, &out).tuned();
            config.jobs = jobs;
            let exec = Executor::with_jobs(jobs).unwrap();
            compute(&config, &exec).unwrap();
            analyze(&config, &exec).unwrap();
            report(&config).unwrap();
            hashes.push(hash_tree(&out));
        }
    }
    let files = hashes[0].len();
    let identical = hashes.iter().all(|h| *h == hashes[0]);
    outcome(
        identical && files == 14,
        format!("6 runs (3 x jobs 1, 3 x jobs 4), {files} output files each, identical: {identical}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("relative entropy matches the reference table", delta_h_reproduction),
        ("rank correlation of accuracy and relative surprisal", rank_correlation_reproduction),
        ("semantic entropy per-sample equivalence", se_equivalence),
        ("S3E degenerates to semantic entropy", s3e_degeneration),
        ("norm-H group mean invariant", norm_h_invariant),
        ("planted Names effect recovery", planted_anova),
        ("analytic entropy fixtures", analytic_fixtures),
        ("byte-identical outputs across runs and workers", determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
