use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use super::{
    compute_stage_metrics, shapiro_wilk, sus_score, wilcoxon_signed_rank, Alternative, MetricsError, ShapiroWilk,
    StageMetrics, SusResponse, System, TrialEvent, Wilcoxon,
};

/// A participant's questionnaire for one system.
#[derive(Debug, Clone, PartialEq)]
pub struct SusRecord {
    pub participant: String,
    pub system: System,
    pub response: SusResponse,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareOptions {
    pub alternative: Alternative,
    /// Significance threshold.
    pub alpha: f64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self { alternative: Alternative::TwoSided, alpha: 0.05 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Metric {
    ActionNumber,
    NavigationNumber,
    ActionTime,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::ActionNumber, Metric::NavigationNumber, Metric::ActionTime];

    pub fn key(&self) -> &'static str {
        match self {
            Metric::ActionNumber => "action_number",
            Metric::NavigationNumber => "navigation_number",
            Metric::ActionTime => "action_time",
        }
    }

    pub fn title(&self) -> &'static str {
        match self {
            Metric::ActionNumber => "Action Number",
            Metric::NavigationNumber => "Navigation Number",
            Metric::ActionTime => "Action Time (s)",
        }
    }

    fn of(&self, m: &StageMetrics) -> f64 {
        match self {
            Metric::ActionNumber => m.actions_before_nav as f64,
            Metric::NavigationNumber => m.navigation_count as f64,
            Metric::ActionTime => m.action_time,
        }
    }
}

/// Paired baseline-vs-MR comparison of one quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub n: usize,
    pub mean_baseline: f64,
    pub mean_mr: f64,
    /// Normality of the paired differences; `None` when not computable.
    pub normality: Option<ShapiroWilk>,
    /// `None` when fewer than two pairs or all differences are zero.
    pub test: Option<Wilcoxon>,
    pub significant: Option<bool>,
}

impl Comparison {
    fn from_pairs(baseline: &[f64], mr: &[f64], means: (f64, f64), opts: &CompareOptions) -> Self {
        let diffs: Vec<f64> = baseline.iter().zip(mr).map(|(a, b)| a - b).collect();
        let normality = shapiro_wilk(&diffs).ok();
        let test = if baseline.len() >= 2 { wilcoxon_signed_rank(baseline, mr, opts.alternative).ok() } else { None };
        Comparison {
            n: baseline.len(),
            mean_baseline: means.0,
            mean_mr: means.1,
            normality,
            significant: test.map(|t| t.p_value < opts.alpha),
            test,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageRow {
    /// `None` for the overall row.
    pub stage: Option<u8>,
    pub comparison: Comparison,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricTable {
    pub metric: Metric,
    pub rows: Vec<StageRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub participants: Vec<String>,
    pub stages: Vec<u8>,
    pub tables: Vec<MetricTable>,
    pub sus_overall: Option<Comparison>,
    /// One comparison per questionnaire item, in question order.
    pub sus_questions: Vec<Comparison>,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CompareError {
    #[error("no trial events")]
    NoData,
    #[error("participant {participant} system {system} stage {stage}: {source}")]
    Metrics { participant: String, system: System, stage: u8, source: MetricsError },
    #[error("participant {0} is not present for both systems on the same stages")]
    Pairing(String),
    #[error("participant {0} has SUS answers for only one system, or duplicates")]
    SusPairing(String),
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Compares the baseline and MR systems per stage and overall, and on SUS.
///
/// Per-stage means average over participants; the overall mean averages over
/// every (participant, stage) value. The overall test pairs each
/// participant's stage-averaged values.
pub fn compare_systems(
    events: &[TrialEvent],
    sus: &[SusRecord],
    opts: &CompareOptions,
) -> Result<Report, CompareError> {
    if events.is_empty() {
        return Err(CompareError::NoData);
    }
    let mut groups: BTreeMap<(&str, System, u8), Vec<TrialEvent>> = BTreeMap::new();
    for e in events {
        groups.entry((e.participant.as_str(), e.system, e.stage)).or_default().push(e.clone());
    }
    let mut metrics: BTreeMap<(&str, System, u8), StageMetrics> = BTreeMap::new();
    for (key, evs) in &groups {
        let m = compute_stage_metrics(evs).map_err(|source| CompareError::Metrics {
            participant: key.0.into(),
            system: key.1,
            stage: key.2,
            source,
        })?;
        metrics.insert(*key, m);
    }

    let participants: BTreeSet<&str> = metrics.keys().map(|k| k.0).collect();
    let stages: BTreeSet<u8> = metrics.keys().map(|k| k.2).collect();
    for p in &participants {
        for s in &stages {
            let b = metrics.contains_key(&(*p, System::Baseline2D, *s));
            let m = metrics.contains_key(&(*p, System::Mr, *s));
            if b != m || !b {
                return Err(CompareError::Pairing((*p).into()));
            }
        }
    }

    let value = |p: &str, sys: System, s: u8, metric: Metric| metric.of(&metrics[&(p, sys, s)]);
    let mut tables = Vec::new();
    for metric in Metric::ALL {
        let mut rows = Vec::new();
        let mut all_b = Vec::new();
        let mut all_m = Vec::new();
        for &s in &stages {
            let b: Vec<f64> = participants.iter().map(|p| value(p, System::Baseline2D, s, metric)).collect();
            let m: Vec<f64> = participants.iter().map(|p| value(p, System::Mr, s, metric)).collect();
            all_b.extend_from_slice(&b);
            all_m.extend_from_slice(&m);
            rows.push(StageRow {
                stage: Some(s),
                comparison: Comparison::from_pairs(&b, &m, (mean(&b), mean(&m)), opts),
            });
        }
        let per_participant = |sys: System| -> Vec<f64> {
            participants
                .iter()
                .map(|p| stages.iter().map(|&s| value(p, sys, s, metric)).sum::<f64>() / stages.len() as f64)
                .collect()
        };
        let overall = Comparison::from_pairs(
            &per_participant(System::Baseline2D),
            &per_participant(System::Mr),
            (mean(&all_b), mean(&all_m)),
            opts,
        );
        rows.push(StageRow { stage: None, comparison: overall });
        tables.push(MetricTable { metric, rows });
    }

    let (sus_overall, sus_questions) = compare_sus(sus, opts)?;

    Ok(Report {
        participants: participants.iter().map(|p| String::from(*p)).collect(),
        stages: stages.into_iter().collect(),
        tables,
        sus_overall,
        sus_questions,
        alpha: opts.alpha,
    })
}

fn compare_sus(
    sus: &[SusRecord],
    opts: &CompareOptions,
) -> Result<(Option<Comparison>, Vec<Comparison>), CompareError> {
    if sus.is_empty() {
        return Ok((None, Vec::new()));
    }
    let mut by: BTreeMap<&str, (Option<&SusResponse>, Option<&SusResponse>)> = BTreeMap::new();
    for r in sus {
        let slot = by.entry(r.participant.as_str()).or_default();
        let target = match r.system {
            System::Baseline2D => &mut slot.0,
            System::Mr => &mut slot.1,
        };
        if target.replace(&r.response).is_some() {
            return Err(CompareError::SusPairing(r.participant.clone()));
        }
    }
    let mut pairs = Vec::new();
    for (p, (b, m)) in &by {
        match (b, m) {
            (Some(b), Some(m)) => pairs.push((*b, *m)),
            _ => return Err(CompareError::SusPairing((*p).into())),
        }
    }
    let b: Vec<f64> = pairs.iter().map(|(b, _)| sus_score(b)).collect();
    let m: Vec<f64> = pairs.iter().map(|(_, m)| sus_score(m)).collect();
    let overall = Comparison::from_pairs(&b, &m, (mean(&b), mean(&m)), opts);
    let questions = (0..10)
        .map(|q| {
            let b: Vec<f64> = pairs.iter().map(|(b, _)| b.ratings()[q] as f64).collect();
            let m: Vec<f64> = pairs.iter().map(|(_, m)| m.ratings()[q] as f64).collect();
            Comparison::from_pairs(&b, &m, (mean(&b), mean(&m)), opts)
        })
        .collect();
    Ok((Some(overall), questions))
}
