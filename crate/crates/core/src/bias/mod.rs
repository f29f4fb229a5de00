//! Bias desiderata over per-instance uncertainty: relative surprisal,
//! contrast-normalised entropy, relative entropy and the log-probability
//! baseline, plus the instance model they operate on.

mod aggregate;
mod contrast;
mod desiderata;
mod instance;
mod names;
mod record;

pub use aggregate::{aggregate_ambiguity_entropies, gender_accuracy, AmbiguityAggregate};
pub use contrast::{build_contrast_sets, template_key, tokenize, ContrastGroup, PRONOUN_LEXICON};
pub use desiderata::{
    class_means, correctness_surprisals, delta_logprob, normalized_entropy, relative_entropy,
    relative_surprisal, ClassMeans, DEFAULT_NORM_TOLERANCE,
};
pub use instance::{BinaryGender, Cue, CueAnnotations, FocusNoun, Gender, Instance, RoleCue};
pub use names::{augment_with_names, remove_name, NameInsertion, NameTable};
pub use record::{MethodMetrics, MetricRecord};
