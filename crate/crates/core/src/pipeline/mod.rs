//! Staged driver: `compute` writes per-instance metric records, `analyze`
//! turns them into effect, correlation and binning tables, and `report`
//! renders ranking, relative-entropy, effect and violin outputs. Stages talk
//! through files in one output directory.

mod analyze;
mod compute;
mod config;
mod report;
mod systems;

pub use analyze::{analyze, AnalyzeSummary, BinPanel, CorrelationRow};
pub use compute::{augment_names, compute, ComputeSummary, RunInfo, SkipNote};
pub use config::{AlphaSetting, Dependent, RunConfig};
pub use report::{report, ReportSummary};
pub use systems::{system_summaries, SystemSummary};

pub const METRICS_FILE: &str = "metrics.csv";
pub const AGGREGATES_FILE: &str = "aggregates.csv";
pub const SYSTEMS_FILE: &str = "systems.csv";
pub const RUN_FILE: &str = "run.json";
pub const EFFECTS_FILE: &str = "effects.csv";
pub const CORRELATIONS_FILE: &str = "correlations.csv";
pub const BINS_FILE: &str = "bins.json";
pub const REPORT_DIR: &str = "report";
