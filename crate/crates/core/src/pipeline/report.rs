use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::analyze::{load_manifest_instances, methods_in, require, BinPanel};
use super::compute::write_json;
use super::config::RunConfig;
use super::systems::{system_summaries, SystemSummary};
use super::{BINS_FILE, EFFECTS_FILE, METRICS_FILE, REPORT_DIR};
use crate::bias::aggregate_ambiguity_entropies;
use crate::dataset::{fmt_f64, fmt_opt, read_effect_tables, read_metric_records, EffectRow};
use crate::metrics::Method;
use crate::stats::{rank_models, Condition};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ReportSummary {
    pub files: Vec<PathBuf>,
}

struct Ranking {
    metric: &'static str,
    method: Option<Method>,
    ascending: bool,
    order: Vec<(String, f64)>,
}

fn fmt_cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.4}"))
}

fn rankings(systems: &[SystemSummary], methods: &[Method]) -> Vec<Ranking> {
    type Getter = Box<dyn Fn(&SystemSummary) -> Option<f64>>;
    let mut specs: Vec<(&'static str, Option<Method>, bool, Getter)> =
        vec![("gender_accuracy", None, false, Box::new(|s| s.gender_accuracy))];
    for &m in methods {
        specs.push(("delta_i", Some(m), true, Box::new(move |s| s.methods.get(&m)?.delta_i)));
        specs.push(("delta_h", Some(m), true, Box::new(move |s| s.methods.get(&m)?.delta_h)));
    }
    specs.push(("delta_logprob", None, false, Box::new(|s| s.delta_logprob)));
    specs
        .into_iter()
        .filter_map(|(metric, method, ascending, get)| {
            let values: BTreeMap<String, f64> = systems.iter().filter_map(|s| Some((s.id(), get(s)?))).collect();
            if values.is_empty() {
                return None;
            }
            let order = rank_models(&values, ascending)
                .into_iter()
                .map(|id| {
                    let v = values[&id];
                    (id, v)
                })
                .collect();
            Some(Ranking {
                metric,
                method,
                ascending,
                order,
            })
        })
        .collect()
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| Error::validation(format!("{}: {e}", path.display())))
}

fn write_rows(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let err = |e: csv::Error| Error::validation(format!("{}: {e}", path.display()));
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Renders the analysis outputs as CSV and aligned text tables, plus the
/// data behind per-bin violin plots.
pub fn report(config: &RunConfig) -> Result<ReportSummary> {
    let metrics_path = config.out.join(METRICS_FILE);
    let effects_path = config.out.join(EFFECTS_FILE);
    let bins_path = config.out.join(BINS_FILE);
    require(&metrics_path, "compute")?;
    require(&effects_path, "analyze")?;
    require(&bins_path, "analyze")?;

    let records = read_metric_records(&metrics_path)?;
    let instances = load_manifest_instances(&config.manifest)?;
    let methods = methods_in(&records, config);
    let systems = system_summaries(&records, &instances, &methods)?;
    let effects = read_effect_tables(&effects_path)?;
    let bins_text = std::fs::read_to_string(&bins_path).map_err(|e| Error::io(&bins_path, e))?;
    let panels: Vec<BinPanel> = serde_json::from_str(&bins_text).map_err(|e| Error::Parse {
        path: bins_path.clone(),
        line: e.line(),
        message: e.to_string(),
    })?;

    let dir = config.out.join(REPORT_DIR);
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut files = Vec::new();
    let mut emit = |name: &str| {
        let p = dir.join(name);
        files.push(p.clone());
        p
    };

    // Rankings.
    let ranks = rankings(&systems, &methods);
    let mut rows = Vec::new();
    let mut text = String::new();
    for r in &ranks {
        let method = r.method.map(|m| m.to_string()).unwrap_or_default();
        let title = match r.method {
            Some(m) => format!("{} ({m})", r.metric),
            None => r.metric.to_string(),
        };
        let dir = if r.ascending { "ascending" } else { "descending" };
        let _ = writeln!(text, "{title}, {dir}");
        for (k, (id, v)) in r.order.iter().enumerate() {
            rows.push(vec![r.metric.to_string(), method.clone(), (k + 1).to_string(), id.clone(), fmt_f64(*v)]);
            let _ = writeln!(text, "  {:>2}. {id:<24} {v:>10.4}", k + 1);
        }
        text.push('\n');
    }
    write_rows(&emit("rankings.csv"), &["metric", "method", "rank", "system", "value"], &rows)?;
    write_text(&emit("rankings.txt"), &text)?;

    // Relative entropy per system.
    let mut rows = Vec::new();
    let mut text = format!(
        "{:<16} {:<8} {:<8} {:>10} {:>10} {:>10}\n",
        "model", "language", "method", "H unamb", "H amb", "delta H"
    );
    for &m in &methods {
        for a in aggregate_ambiguity_entropies(&records, &instances, m)? {
            if a.n_ambiguous + a.n_unambiguous == 0 {
                continue;
            }
            let _ = writeln!(
                text,
                "{:<16} {:<8} {:<8} {:>10} {:>10} {:>10}",
                a.model_id,
                a.language,
                m.to_string(),
                fmt_cell(a.h_unambiguous),
                fmt_cell(a.h_ambiguous),
                fmt_cell(a.delta_h)
            );
            rows.push(vec![
                a.model_id,
                a.language,
                m.to_string(),
                fmt_opt(a.h_unambiguous),
                fmt_opt(a.h_ambiguous),
                fmt_opt(a.delta_h),
            ]);
        }
    }
    write_rows(
        &emit("delta_h.csv"),
        &["model_id", "language", "method", "h_unambiguous", "h_ambiguous", "delta_h"],
        &rows,
    )?;
    write_text(&emit("delta_h.txt"), &text)?;

    // Effect table.
    let (rows, text) = anova_tables(&effects);
    write_rows(
        &emit("anova.csv"),
        &[
            "model_id",
            "language",
            "method",
            "cue",
            "level",
            "reference_level",
            "coefficient",
            "p_value",
            "significant",
        ],
        &rows,
    )?;
    write_text(&emit("anova.txt"), &text)?;

    // Violin data.
    let violins: Vec<ViolinPanel> = panels.iter().map(ViolinPanel::from).collect();
    write_json(&emit("violin.json"), &violins)?;

    Ok(ReportSummary { files })
}

fn anova_tables(effects: &[EffectRow]) -> (Vec<Vec<String>>, String) {
    let mut rows = Vec::new();
    let mut text = String::new();
    let mut current = None;
    for r in effects {
        let key = (&r.model_id, &r.language, r.method);
        if current != Some(key) {
            let _ = writeln!(text, "{}{}/{} ({})", if current.is_some() { "\n" } else { "" }, r.model_id, r.language, r.method);
            current = Some(key);
        }
        let e = &r.estimate;
        let _ = writeln!(
            text,
            "  {:<20} {:<10} {:>9.4}{}",
            e.cue,
            e.level,
            e.coefficient,
            if e.significant { " *" } else { "" }
        );
        rows.push(vec![
            r.model_id.clone(),
            r.language.clone(),
            r.method.to_string(),
            e.cue.clone(),
            e.level.clone(),
            e.reference_level.clone(),
            fmt_f64(e.coefficient),
            fmt_opt(e.p_value),
            e.significant.to_string(),
        ]);
    }
    if !text.is_empty() {
        text.push_str("\n* p < 0.05\n");
    }
    (rows, text)
}

#[derive(Serialize)]
struct Violin {
    bin_index: usize,
    bin_range: (f64, f64),
    condition: Condition,
    count: usize,
    quartiles: Option<[f64; 5]>,
    mean: Option<f64>,
    values: Vec<f64>,
    density: Vec<(f64, f64)>,
}

#[derive(Serialize)]
struct ViolinPanel {
    model_id: String,
    language: String,
    method: Method,
    edges: Vec<f64>,
    collapsed: bool,
    violins: Vec<Violin>,
}

fn quartiles(b: &crate::stats::BinnedSummary) -> Option<[f64; 5]> {
    Some([b.min?, b.q1?, b.median?, b.q3?, b.max?])
}

impl From<&BinPanel> for ViolinPanel {
    fn from(p: &BinPanel) -> Self {
        ViolinPanel {
            model_id: p.model_id.clone(),
            language: p.language.clone(),
            method: p.method,
            edges: p.binning.edges.clone(),
            collapsed: p.binning.collapsed,
            violins: p
                .binning
                .bins
                .iter()
                .map(|b| Violin {
                    bin_index: b.bin_index,
                    bin_range: b.bin_range,
                    condition: b.condition,
                    count: b.count,
                    quartiles: quartiles(b),
                    mean: b.mean,
                    values: b.values.clone(),
                    density: b.density.iter().map(|d| (d.x, d.density)).collect(),
                })
                .collect(),
        }
    }
}
