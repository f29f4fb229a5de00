use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::metrics::{GenderLabel, Method};

/// Per-method values for one instance.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MethodMetrics {
    pub h: f64,
    /// Mean surprisal of masculine / feminine labelled samples.
    pub surprisal_m: Option<f64>,
    pub surprisal_f: Option<f64>,
    pub norm_h: Option<f64>,
    pub i_correct: Option<f64>,
    pub i_incorrect: Option<f64>,
    pub delta_i: Option<f64>,
}

/// All metric values for one (instance, model, language).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub instance_id: String,
    pub model_id: String,
    pub language: String,
    pub num_samples: usize,
    pub methods: BTreeMap<Method, MethodMetrics>,
    pub logprob_correct: Option<f64>,
    pub logprob_incorrect: Option<f64>,
    pub delta_logprob: Option<f64>,
    pub comet_score: Option<f64>,
    pub prediction_gender: Option<GenderLabel>,
}

impl MetricRecord {
    pub fn new(instance_id: impl Into<String>, model_id: impl Into<String>, language: impl Into<String>) -> Self {
        MetricRecord {
            instance_id: instance_id.into(),
            model_id: model_id.into(),
            language: language.into(),
            num_samples: 0,
            methods: BTreeMap::new(),
            logprob_correct: None,
            logprob_incorrect: None,
            delta_logprob: None,
            comet_score: None,
            prediction_gender: None,
        }
    }

    pub fn method(&self, method: Method) -> Option<&MethodMetrics> {
        self.methods.get(&method)
    }

    pub fn h(&self, method: Method) -> Option<f64> {
        self.method(method).map(|m| m.h)
    }

    /// Sort key used by every writer.
    pub fn key(&self) -> (&str, &str, &str) {
        (&self.instance_id, &self.model_id, &self.language)
    }
}
