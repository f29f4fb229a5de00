//! Statistical analysis: Welch t-tests, single-effect cue analysis, rank
//! correlations, quality binning and model rankings.

mod anova;
mod bins;
mod rank;
mod welch;

pub use anova::{single_effect_anova, EffectEstimate, SIGNIFICANCE_LEVEL};
pub use bins::{comet_bins, BinnedSummary, Condition, DensityPoint, QualityBinning, QualityRecord};
pub use rank::{kendall_tau_b, rank_models, rank_positions, spearman_rho};
pub use welch::{welch_t_test, WelchTest};

use crate::{Error, Result};

/// Best score over the acceptable references of one item.
pub fn max_reference_aggregation(scores_per_reference: &[f64]) -> Result<f64> {
    if scores_per_reference.is_empty() {
        return Err(Error::validation("no reference scores"));
    }
    if scores_per_reference.iter().any(|s| s.is_nan()) {
        return Err(Error::validation("NaN reference score"));
    }
    Ok(scores_per_reference
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Mean shifted by the first value, so constant input comes back exactly.
pub(crate) fn mean(values: &[f64]) -> f64 {
    let Some(&x0) = values.first() else {
        return f64::NAN;
    };
    x0 + values.iter().map(|v| v - x0).sum::<f64>() / values.len() as f64
}

/// Unbiased sample variance; requires at least two values.
pub(crate) fn sample_variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64
}
