use std::collections::BTreeMap;

use super::contrast::ContrastGroup;
use super::instance::BinaryGender;
use crate::metrics::SampleSet;
use crate::{Error, Result};

/// Contrast groups whose mean entropy falls below this are left undefined.
pub const DEFAULT_NORM_TOLERANCE: f64 = 1e-9;

const ZERO: f64 = 1e-12;

/// `(a - b) / ((a + b) / 2)` for non-negative inputs; 0 when both vanish.
fn symmetric_relative_difference(a: f64, b: f64, what: &str) -> Result<f64> {
    if !(a >= 0.0 && b >= 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::validation(format!(
            "{what} inputs must be finite and non-negative, got ({a}, {b})"
        )));
    }
    if a < ZERO && b < ZERO {
        return Ok(0.0);
    }
    Ok((a - b) / (0.5 * (a + b)))
}

/// Relative surprisal of correct vs incorrect gender inflections, in
/// `[-2, 2]`; negative means the correct inflection is less surprising.
pub fn relative_surprisal(i_correct: f64, i_incorrect: f64) -> Result<f64> {
    symmetric_relative_difference(i_correct, i_incorrect, "relative surprisal")
}

/// Relative entropy of unambiguous vs ambiguous inputs, in `[-2, 2]`.
pub fn relative_entropy(h_unambiguous: f64, h_ambiguous: f64) -> Result<f64> {
    symmetric_relative_difference(h_unambiguous, h_ambiguous, "relative entropy")
}

/// Log-probability baseline: relative difference of mean sequence
/// log-probabilities, positive when correct translations are more probable.
pub fn delta_logprob(correct_mean: f64, incorrect_mean: f64) -> Result<f64> {
    if !correct_mean.is_finite() || !incorrect_mean.is_finite() {
        return Err(Error::validation("log-probability means must be finite"));
    }
    let scale = 0.5 * (correct_mean.abs() + incorrect_mean.abs());
    if scale < ZERO {
        return Ok(0.0);
    }
    Ok((correct_mean - incorrect_mean) / scale)
}

/// Means of a per-sample quantity over the correct- and incorrect-gender
/// samples. Neutral and Unknown samples belong to neither class.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClassMeans {
    pub correct: Option<f64>,
    pub incorrect: Option<f64>,
}

pub fn class_means(samples: &SampleSet, gold: BinaryGender, values: &[f64]) -> Result<ClassMeans> {
    if values.len() != samples.len() {
        return Err(Error::DimensionMismatch {
            expected: samples.len(),
            got: values.len(),
        });
    }
    let (correct, incorrect) = (gold.label(), gold.opposite().label());
    let mut sums = [(0.0, 0usize); 2];
    for (s, v) in samples.samples.iter().zip(values) {
        let slot = match s.gender_label {
            g if g == correct => 0,
            g if g == incorrect => 1,
            _ => continue,
        };
        sums[slot].0 += v;
        sums[slot].1 += 1;
    }
    let avg = |(s, n): (f64, usize)| (n > 0).then(|| s / n as f64);
    Ok(ClassMeans {
        correct: avg(sums[0]),
        incorrect: avg(sums[1]),
    })
}

/// Mean surprisal of correct- and incorrect-gender samples.
pub fn correctness_surprisals(
    samples: &SampleSet,
    gold: BinaryGender,
    per_sample_surprisal: &[f64],
) -> Result<ClassMeans> {
    class_means(samples, gold, per_sample_surprisal)
}

/// Each member's entropy divided by the group's mean entropy (the member
/// itself included). All members are `None` when that mean is below
/// `tolerance`.
pub fn normalized_entropy(
    group: &ContrastGroup,
    entropies: &BTreeMap<String, f64>,
    tolerance: f64,
) -> Result<BTreeMap<String, Option<f64>>> {
    let values: Vec<(&String, f64)> = group
        .member_instance_ids
        .iter()
        .map(|id| {
            entropies.get(id).map(|h| (id, *h)).ok_or_else(|| {
                Error::validation(format!(
                    "contrast group `{}`: no entropy for member `{id}`",
                    group.contrast_key
                ))
            })
        })
        .collect::<Result<_>>()?;
    if values.is_empty() {
        return Err(Error::validation(format!(
            "contrast group `{}` is empty",
            group.contrast_key
        )));
    }
    let denom = values.iter().map(|(_, h)| h).sum::<f64>() / values.len() as f64;
    Ok(values
        .into_iter()
        .map(|(id, h)| (id.clone(), (denom >= tolerance).then(|| h / denom)))
        .collect())
}
