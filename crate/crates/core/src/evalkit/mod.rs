//! Experiment metrics and statistics.
//!
//! [`compute_stage_metrics`] turns one stage's trial log into action and
//! navigation counts; [`sus_score`] scores a usability questionnaire;
//! [`shapiro_wilk`] and [`wilcoxon_signed_rank`] are the normality check and
//! paired test used by [`compare_systems`].

mod compare;
mod metrics;
mod normal;
mod shapiro;
mod sus;
mod wilcoxon;

pub use compare::{
    compare_systems, CompareError, CompareOptions, Comparison, Metric, MetricTable, Report, StageRow, SusRecord,
};
pub use metrics::{compute_stage_metrics, EventKind, MetricsError, PlacementKind, StageMetrics, System, TrialEvent};
pub use normal::ppnd;
pub use shapiro::{shapiro_wilk, ShapiroWilk};
pub use sus::{sus_score, SusError, SusResponse};
pub use wilcoxon::{wilcoxon_signed_rank, Alternative, Wilcoxon, WilcoxonMethod, EXACT_LIMIT};

/// Errors shared by the statistical tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum StatsError {
    #[error("sample too small: need at least {min}, got {got}")]
    SampleTooSmall { min: usize, got: usize },
    #[error("sample too large: at most {max}, got {got}")]
    SampleTooLarge { max: usize, got: usize },
    #[error("degenerate sample (zero spread or all differences zero)")]
    DegenerateSample,
    #[error("paired samples differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("sample contains non-finite values")]
    NonFinite,
}
