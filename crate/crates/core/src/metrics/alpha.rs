use super::entropy::gender_entropy;
use super::similarity::{cosine_similarity_matrix, s3e_entropy, SimilarityConfig, SimilarityMatrix};
use super::types::SampleSet;
use crate::stats::spearman_rho;
use crate::{Error, Result};

pub const DEFAULT_ALPHA_GRID: [f64; 6] = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0];

/// Selected similarity exponent and the rank correlation it achieved.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct AlphaChoice {
    pub alpha: f64,
    pub correlation: f64,
}

/// Picks the exponent from `grid` whose S3E entropies have the highest
/// Spearman correlation with gender entropy across the calibration sets.
/// Ties go to the smallest exponent.
pub fn tune_alpha(calibration: &[SampleSet], grid: &[f64], floor: f64) -> Result<AlphaChoice> {
    if calibration.len() < 3 {
        return Err(Error::validation(format!(
            "alpha tuning needs at least 3 calibration instances, got {}",
            calibration.len()
        )));
    }
    let prepared: Vec<(SimilarityMatrix, f64)> = calibration
        .iter()
        .map(|set| {
            Ok((
                cosine_similarity_matrix(set, floor)?,
                gender_entropy(set)?.entropy,
            ))
        })
        .collect::<Result<_>>()?;
    let ge: Vec<f64> = prepared.iter().map(|(_, h)| *h).collect();

    let mut failure = None;
    let choice = best_alpha(grid, |alpha| {
        let cfg = match SimilarityConfig::new(alpha, floor) {
            Ok(cfg) => cfg,
            Err(e) => {
                failure.get_or_insert(e);
                return None;
            }
        };
        let s3e: Option<Vec<f64>> = prepared
            .iter()
            .map(|(sim, _)| s3e_entropy(sim, &cfg).ok().map(|e| e.entropy))
            .collect();
        spearman_rho(&s3e?, &ge).ok().flatten()
    });
    match (choice, failure) {
        (_, Some(e)) => Err(e),
        (Some(c), None) => Ok(c),
        (None, None) => Err(Error::validation(
            "rank correlation is undefined for every alpha in the grid",
        )),
    }
}

/// Grid search over `grid` in ascending order; `score` returns `None` where
/// the correlation is undefined. Strictly better scores replace the current
/// best, so ties keep the smaller exponent.
pub fn best_alpha(grid: &[f64], mut score: impl FnMut(f64) -> Option<f64>) -> Option<AlphaChoice> {
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let mut best: Option<AlphaChoice> = None;
    for alpha in sorted {
        let Some(correlation) = score(alpha).filter(|c| c.is_finite()) else {
            continue;
        };
        if best.is_none_or(|b| correlation > b.correlation) {
            best = Some(AlphaChoice { alpha, correlation });
        }
    }
    best
}
