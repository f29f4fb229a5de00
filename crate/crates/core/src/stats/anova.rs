use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::{mean, welch_t_test};
use crate::{Error, Result};

pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

/// Deviation of one cue level's mean from the reference level's mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectEstimate {
    pub cue: String,
    pub level: String,
    pub reference_level: String,
    pub coefficient: f64,
    /// Absent when either group has fewer than two observations.
    pub p_value: Option<f64>,
    pub significant: bool,
    pub n_level: usize,
    pub n_reference: usize,
    pub t: Option<f64>,
    pub df: Option<f64>,
    /// Both groups had zero variance.
    pub degenerate: bool,
}

/// Single-effect analysis of one cue: for every non-reference level, the
/// coefficient is `mean(level) - mean(reference)` and the p-value comes from
/// a two-sided Welch t-test of the level group against the reference group.
///
/// Estimates are returned in lexicographic level order.
pub fn single_effect_anova(
    cue: &str,
    values: &[f64],
    factor: &[impl AsRef<str>],
    reference: &str,
) -> Result<Vec<EffectEstimate>> {
    if values.len() != factor.len() {
        return Err(Error::DimensionMismatch {
            expected: values.len(),
            got: factor.len(),
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation(format!("cue `{cue}`: non-finite value")));
    }
    let mut groups: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for (v, level) in values.iter().zip(factor) {
        groups.entry(level.as_ref()).or_default().push(*v);
    }
    let Some(reference_values) = groups.get(reference) else {
        return Err(Error::validation(format!(
            "cue `{cue}`: reference level `{reference}` has no observations"
        )));
    };
    let reference_mean = mean(reference_values);

    let mut out = Vec::with_capacity(groups.len().saturating_sub(1));
    for (&level, level_values) in &groups {
        if level == reference {
            continue;
        }
        let coefficient = mean(level_values) - reference_mean;
        let test = if level_values.len() >= 2 && reference_values.len() >= 2 {
            Some(welch_t_test(level_values, reference_values)?)
        } else {
            None
        };
        let p_value = test.map(|t| t.p);
        out.push(EffectEstimate {
            cue: cue.to_string(),
            level: level.to_string(),
            reference_level: reference.to_string(),
            coefficient,
            p_value,
            significant: p_value.is_some_and(|p| p < SIGNIFICANCE_LEVEL),
            n_level: level_values.len(),
            n_reference: reference_values.len(),
            t: test.map(|t| t.t),
            df: test.map(|t| t.df),
            degenerate: test.is_some_and(|t| t.degenerate),
        });
    }
    Ok(out)
}
