use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

use crate::bias::{Cue, MethodMetrics, MetricRecord};
use crate::metrics::{GenderLabel, Method};
use crate::stats::EffectEstimate;
use crate::{Error, Result};

/// One effect estimate with the (model, language, method) it belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectRow {
    pub model_id: String,
    pub language: String,
    pub method: Method,
    pub estimate: EffectEstimate,
}

impl EffectRow {
    /// Table order: system, method, cue column order, level display order.
    fn sort_key(&self) -> (&str, &str, Method, usize, usize, &str) {
        let cue = Cue::from_name(&self.estimate.cue);
        let cue_rank = cue.map_or(usize::MAX, |c| c as usize);
        let level_rank = cue
            .and_then(|c| c.level_order().iter().position(|l| *l == self.estimate.level))
            .unwrap_or(usize::MAX);
        (&self.model_id, &self.language, self.method, cue_rank, level_rank, &self.estimate.level)
    }
}

const BASE_COLUMNS: [&str; 4] = ["instance_id", "model_id", "language", "num_samples"];
const METHOD_FIELDS: [&str; 7] = ["h", "surprisal_m", "surprisal_f", "norm_h", "i_correct", "i_incorrect", "delta_i"];
const TAIL_COLUMNS: [&str; 5] = [
    "logprob_correct",
    "logprob_incorrect",
    "delta_logprob",
    "comet_score",
    "prediction_gender",
];
const EFFECT_COLUMNS: [&str; 14] = [
    "model_id",
    "language",
    "method",
    "cue",
    "level",
    "reference_level",
    "coefficient",
    "p_value",
    "significant",
    "n_level",
    "n_reference",
    "t",
    "df",
    "degenerate",
];

/// Shortest representation that parses back to the same bits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: e.to_string(),
    }
}

fn method_values(m: &MethodMetrics) -> [Option<f64>; 7] {
    [
        Some(m.h),
        m.surprisal_m,
        m.surprisal_f,
        m.norm_h,
        m.i_correct,
        m.i_incorrect,
        m.delta_i,
    ]
}

/// Writes records sorted by (instance_id, model_id, language). Per-method
/// columns appear only for methods present in at least one record.
pub fn write_metric_records(records: &[MetricRecord], path: &Path) -> Result<()> {
    let mut sorted: Vec<&MetricRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.key().cmp(&b.key()));
    let methods: Vec<Method> = Method::ALL
        .into_iter()
        .filter(|m| records.iter().any(|r| r.methods.contains_key(m)))
        .collect();

    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    let mut header: Vec<String> = BASE_COLUMNS.iter().map(|s| s.to_string()).collect();
    for m in &methods {
        header.extend(METHOD_FIELDS.iter().map(|f| format!("{f}_{m}")));
    }
    header.extend(TAIL_COLUMNS.iter().map(|s| s.to_string()));
    w.write_record(&header).map_err(|e| csv_err(path, e))?;

    for r in sorted {
        let mut row = vec![
            r.instance_id.clone(),
            r.model_id.clone(),
            r.language.clone(),
            r.num_samples.to_string(),
        ];
        for m in &methods {
            match r.methods.get(m) {
                Some(mm) => row.extend(method_values(mm).into_iter().map(fmt_opt)),
                None => row.extend(std::iter::repeat_n(String::new(), METHOD_FIELDS.len())),
            }
        }
        row.extend([
            fmt_opt(r.logprob_correct),
            fmt_opt(r.logprob_incorrect),
            fmt_opt(r.delta_logprob),
            fmt_opt(r.comet_score),
            r.prediction_gender.map(|g| g.code().to_string()).unwrap_or_default(),
        ]);
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

struct Row<'a> {
    path: &'a Path,
    line: usize,
    columns: &'a BTreeMap<String, usize>,
    record: &'a csv::StringRecord,
}

impl Row<'_> {
    fn err(&self, msg: String) -> Error {
        Error::Parse {
            path: self.path.to_path_buf(),
            line: self.line,
            message: msg,
        }
    }

    fn raw(&self, column: &str) -> Result<&str> {
        let k = self
            .columns
            .get(column)
            .ok_or_else(|| self.err(format!("missing column `{column}`")))?;
        Ok(self.record.get(*k).unwrap_or(""))
    }

    fn string(&self, column: &str) -> Result<String> {
        self.raw(column).map(str::to_string)
    }

    fn parse<T: std::str::FromStr>(&self, column: &str) -> Result<T> {
        let s = self.raw(column)?;
        s.parse().map_err(|_| self.err(format!("`{column}`: cannot parse `{s}`")))
    }

    fn opt_f64(&self, column: &str) -> Result<Option<f64>> {
        match self.raw(column)? {
            "" => Ok(None),
            _ => self.parse(column).map(Some),
        }
    }
}

fn read_table<T>(path: &Path, mut f: impl FnMut(&Row) -> Result<T>) -> Result<(Vec<String>, Vec<T>)> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| csv_err(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let columns: BTreeMap<String, usize> = headers.iter().enumerate().map(|(k, h)| (h.clone(), k)).collect();
    let mut out = Vec::new();
    for (k, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| csv_err(path, e))?;
        out.push(f(&Row {
            path,
            line: k + 2,
            columns: &columns,
            record: &record,
        })?);
    }
    Ok((headers, out))
}

pub fn read_metric_records(path: &Path) -> Result<Vec<MetricRecord>> {
    let mut methods: Option<Vec<Method>> = None;
    let (_, records) = read_table(path, |row| {
        let methods = methods.get_or_insert_with(|| {
            Method::ALL
                .into_iter()
                .filter(|m| row.columns.contains_key(&format!("h_{m}")))
                .collect()
        });
        let mut r = MetricRecord::new(row.string("instance_id")?, row.string("model_id")?, row.string("language")?);
        r.num_samples = row.parse("num_samples")?;
        for m in methods.iter() {
            let col = |f: &str| format!("{f}_{m}");
            let Some(h) = row.opt_f64(&col("h"))? else { continue };
            r.methods.insert(
                *m,
                MethodMetrics {
                    h,
                    surprisal_m: row.opt_f64(&col("surprisal_m"))?,
                    surprisal_f: row.opt_f64(&col("surprisal_f"))?,
                    norm_h: row.opt_f64(&col("norm_h"))?,
                    i_correct: row.opt_f64(&col("i_correct"))?,
                    i_incorrect: row.opt_f64(&col("i_incorrect"))?,
                    delta_i: row.opt_f64(&col("delta_i"))?,
                },
            );
        }
        r.logprob_correct = row.opt_f64("logprob_correct")?;
        r.logprob_incorrect = row.opt_f64("logprob_incorrect")?;
        r.delta_logprob = row.opt_f64("delta_logprob")?;
        r.comet_score = row.opt_f64("comet_score")?;
        r.prediction_gender = match row.raw("prediction_gender")? {
            "" => None,
            s => Some(GenderLabel::parse_code(s).ok_or_else(|| row.err(format!("bad gender `{s}`")))?),
        };
        Ok(r)
    })?;
    Ok(records)
}

pub fn write_effect_tables(rows: &[EffectRow], path: &Path) -> Result<()> {
    let mut sorted: Vec<&EffectRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(EFFECT_COLUMNS).map_err(|e| csv_err(path, e))?;
    for r in sorted {
        let e = &r.estimate;
        w.write_record([
            r.model_id.clone(),
            r.language.clone(),
            r.method.to_string(),
            e.cue.clone(),
            e.level.clone(),
            e.reference_level.clone(),
            fmt_f64(e.coefficient),
            fmt_opt(e.p_value),
            e.significant.to_string(),
            e.n_level.to_string(),
            e.n_reference.to_string(),
            fmt_opt(e.t),
            fmt_opt(e.df),
            e.degenerate.to_string(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_effect_tables(path: &Path) -> Result<Vec<EffectRow>> {
    let (_, rows) = read_table(path, |row| {
        Ok(EffectRow {
            model_id: row.string("model_id")?,
            language: row.string("language")?,
            method: row.parse("method")?,
            estimate: EffectEstimate {
                cue: row.string("cue")?,
                level: row.string("level")?,
                reference_level: row.string("reference_level")?,
                coefficient: row.parse("coefficient")?,
                p_value: row.opt_f64("p_value")?,
                significant: row.parse("significant")?,
                n_level: row.parse("n_level")?,
                n_reference: row.parse("n_reference")?,
                t: row.opt_f64("t")?,
                df: row.opt_f64("df")?,
                degenerate: row.parse("degenerate")?,
            },
        })
    })?;
    Ok(rows)
}
