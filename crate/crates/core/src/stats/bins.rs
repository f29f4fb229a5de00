use serde::{Deserialize, Serialize};

use super::{mean, sample_variance};
use crate::{Error, Result};

/// Number of kernel-density support points per violin.
const DENSITY_POINTS: usize = 32;
/// Density support extends this many bandwidths beyond the data range.
const DENSITY_CUT: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Condition {
    Ambiguous,
    Unambiguous,
}

/// One instance's quality score and entropy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityRecord {
    pub comet: f64,
    pub entropy: f64,
    pub ambiguous: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityPoint {
    pub x: f64,
    pub density: f64,
}

/// Entropy distribution of one (quality bin, condition) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedSummary {
    pub bin_index: usize,
    pub bin_range: (f64, f64),
    pub condition: Condition,
    pub count: usize,
    pub values: Vec<f64>,
    pub min: Option<f64>,
    pub q1: Option<f64>,
    pub median: Option<f64>,
    pub q3: Option<f64>,
    pub max: Option<f64>,
    pub mean: Option<f64>,
    pub density: Vec<DensityPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityBinning {
    /// Bin edges after merging collapsed quantiles; `edges.len() - 1` bins
    /// (a single degenerate bin has two equal edges).
    pub edges: Vec<f64>,
    /// Set when duplicate scores made quantile edges coincide.
    pub collapsed: bool,
    /// Two summaries per bin, ambiguous first.
    pub bins: Vec<BinnedSummary>,
}

/// Linear-interpolation quantile of sorted data (the common "type 7").
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn gaussian_kde(values: &[f64]) -> Vec<DensityPoint> {
    if values.len() < 2 {
        return Vec::new();
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let sd = sample_variance(values).sqrt();
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    let h = 0.9 * spread * (values.len() as f64).powf(-0.2);
    if !(h > 0.0) {
        return Vec::new();
    }
    let lo = sorted[0] - DENSITY_CUT * h;
    let hi = sorted[sorted.len() - 1] + DENSITY_CUT * h;
    let norm = 1.0 / (values.len() as f64 * h * (2.0 * std::f64::consts::PI).sqrt());
    (0..DENSITY_POINTS)
        .map(|k| {
            let x = lo + (hi - lo) * k as f64 / (DENSITY_POINTS - 1) as f64;
            let density = norm
                * values
                    .iter()
                    .map(|v| (-0.5 * ((x - v) / h).powi(2)).exp())
                    .sum::<f64>();
            DensityPoint { x, density }
        })
        .collect()
}

fn summarize(bin_index: usize, bin_range: (f64, f64), condition: Condition, values: Vec<f64>) -> BinnedSummary {
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let stat = |q: f64| (!sorted.is_empty()).then(|| quantile_sorted(&sorted, q));
    BinnedSummary {
        bin_index,
        bin_range,
        condition,
        count: values.len(),
        min: sorted.first().copied(),
        q1: stat(0.25),
        median: stat(0.5),
        q3: stat(0.75),
        max: sorted.last().copied(),
        mean: (!values.is_empty()).then(|| mean(&values)),
        density: gaussian_kde(&values),
        values,
    }
}

/// Equal-count (quantile) binning of records by quality score into `k`
/// bins, each split by ambiguity condition.
///
/// Bin `b` covers `[edges[b], edges[b+1])`; the last bin is closed. Edges
/// that coincide because of repeated scores are merged and flagged.
pub fn comet_bins(records: &[QualityRecord], k: usize) -> Result<QualityBinning> {
    if k < 2 {
        return Err(Error::validation(format!("need at least 2 bins, got {k}")));
    }
    if records.is_empty() {
        return Err(Error::validation("no records to bin"));
    }
    if records.iter().any(|r| !r.comet.is_finite() || !r.entropy.is_finite()) {
        return Err(Error::validation("non-finite score or entropy"));
    }
    let mut scores: Vec<f64> = records.iter().map(|r| r.comet).collect();
    scores.sort_by(f64::total_cmp);
    let raw: Vec<f64> = (0..=k).map(|i| quantile_sorted(&scores, i as f64 / k as f64)).collect();
    let mut edges = raw.clone();
    edges.dedup();
    let collapsed = edges.len() < raw.len();
    if edges.len() == 1 {
        edges.push(edges[0]);
    }
    let n_bins = edges.len() - 1;

    let mut cells: Vec<[Vec<f64>; 2]> = vec![[Vec::new(), Vec::new()]; n_bins];
    for r in records {
        let b = edges[1..n_bins].partition_point(|e| *e <= r.comet);
        cells[b][usize::from(!r.ambiguous)].push(r.entropy);
    }
    let bins = cells
        .into_iter()
        .enumerate()
        .flat_map(|(b, [amb, unamb])| {
            let range = (edges[b], edges[b + 1]);
            [
                summarize(b, range, Condition::Ambiguous, amb),
                summarize(b, range, Condition::Unambiguous, unamb),
            ]
        })
        .collect();
    Ok(QualityBinning {
        edges,
        collapsed,
        bins,
    })
}
