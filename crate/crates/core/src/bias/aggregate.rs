use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::desiderata::relative_entropy;
use super::instance::Instance;
use super::record::MetricRecord;
use crate::metrics::Method;
use crate::{Error, Result};

/// Partition means of one method's entropy for one (model, language).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmbiguityAggregate {
    pub model_id: String,
    pub language: String,
    pub method: Method,
    pub h_unambiguous: Option<f64>,
    pub h_ambiguous: Option<f64>,
    /// Relative entropy of the two partition means; absent when either
    /// partition is empty.
    pub delta_h: Option<f64>,
    pub n_unambiguous: usize,
    pub n_ambiguous: usize,
}

/// Mean entropy over unambiguous and ambiguous instances and their relative
/// entropy, per (model, language), sorted by that key.
pub fn aggregate_ambiguity_entropies(
    records: &[MetricRecord],
    instances: &BTreeMap<String, Instance>,
    method: Method,
) -> Result<Vec<AmbiguityAggregate>> {
    type Sums = [(f64, usize); 2];
    let mut by_system: BTreeMap<(&str, &str), Sums> = BTreeMap::new();
    for r in records {
        let inst = instances.get(&r.instance_id).ok_or_else(|| {
            Error::validation(format!("record for unknown instance `{}`", r.instance_id))
        })?;
        let sums = by_system
            .entry((&r.model_id, &r.language))
            .or_insert([(0.0, 0); 2]);
        if let Some(h) = r.h(method) {
            let slot = &mut sums[usize::from(inst.ambiguous)];
            slot.0 += h;
            slot.1 += 1;
        }
    }
    by_system
        .into_iter()
        .map(|((model, language), [unamb, amb])| {
            let avg = |(s, n): (f64, usize)| (n > 0).then(|| s / n as f64);
            let (h_unambiguous, h_ambiguous) = (avg(unamb), avg(amb));
            let delta_h = match (h_unambiguous, h_ambiguous) {
                (Some(u), Some(a)) => Some(relative_entropy(u, a)?),
                _ => None,
            };
            Ok(AmbiguityAggregate {
                model_id: model.to_string(),
                language: language.to_string(),
                method,
                h_unambiguous,
                h_ambiguous,
                delta_h,
                n_unambiguous: unamb.1,
                n_ambiguous: amb.1,
            })
        })
        .collect()
}

/// Percentage of unambiguous instances whose predicted focus-noun gender
/// equals the gold gender. `None` without any scorable prediction.
pub fn gender_accuracy(records: &[MetricRecord], instances: &BTreeMap<String, Instance>) -> Option<f64> {
    let (mut correct, mut total) = (0usize, 0usize);
    for r in records {
        let Some(gold) = instances.get(&r.instance_id).and_then(|i| i.gold_gender) else {
            continue;
        };
        let Some(pred) = r.prediction_gender else {
            continue;
        };
        total += 1;
        if pred == gold.label() {
            correct += 1;
        }
    }
    (total > 0).then(|| 100.0 * correct as f64 / total as f64)
}
