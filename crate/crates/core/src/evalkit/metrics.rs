use alloc::string::String;
use core::fmt;
use core::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum System {
    Baseline2D,
    Mr,
}

impl System {
    pub fn as_str(&self) -> &'static str {
        match self {
            System::Baseline2D => "2d",
            System::Mr => "mr",
        }
    }
}

impl FromStr for System {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "2d" => Ok(System::Baseline2D),
            "mr" => Ok(System::Mr),
            _ => Err(MetricsError::UnknownSystem),
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlacementKind {
    Add,
    Move,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    PhaseBegin(PlacementKind),
    PhaseCommit(PlacementKind),
    Select,
    NavSuccess,
    NavFail,
}

impl EventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventKind::PhaseBegin(PlacementKind::Add) => "add_begin",
            EventKind::PhaseBegin(PlacementKind::Move) => "move_begin",
            EventKind::PhaseCommit(PlacementKind::Add) => "add_commit",
            EventKind::PhaseCommit(PlacementKind::Move) => "move_commit",
            EventKind::Select => "select",
            EventKind::NavSuccess => "nav_success",
            EventKind::NavFail => "nav_fail",
        }
    }
}

impl FromStr for EventKind {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "add_begin" => EventKind::PhaseBegin(PlacementKind::Add),
            "move_begin" => EventKind::PhaseBegin(PlacementKind::Move),
            "add_commit" => EventKind::PhaseCommit(PlacementKind::Add),
            "move_commit" => EventKind::PhaseCommit(PlacementKind::Move),
            "select" => EventKind::Select,
            "nav_success" => EventKind::NavSuccess,
            "nav_fail" => EventKind::NavFail,
            _ => return Err(MetricsError::UnknownKind),
        })
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One experiment log record.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialEvent {
    /// Seconds since session start.
    pub t: f64,
    pub participant: String,
    pub system: System,
    pub stage: u8,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageMetrics {
    /// Placements committed before the successful navigation.
    pub actions_before_nav: u32,
    /// Goals dispatched during the stage.
    pub navigation_count: u32,
    /// Seconds spent inside add/move placement phases that were committed.
    pub action_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("no events")]
    Empty,
    #[error("events from more than one participant, system or stage")]
    Mixed,
    #[error("event {0} goes back in time")]
    TimeReversal(usize),
    #[error("event {0} is out of order")]
    IllegalOrder(usize),
    #[error("event {0} follows the stage's successful navigation")]
    AfterSuccess(usize),
    #[error("stage never ended with a successful navigation")]
    IncompleteStage,
    #[error("stage completed without any committed placement")]
    NoPlacement,
    #[error("unknown system label")]
    UnknownSystem,
    #[error("unknown event kind")]
    UnknownKind,
}

/// Metrics for one participant, system and stage. The sequence must be
/// legal: commits close an open phase of the same kind, navigation results
/// answer a pending select, and the stage ends with `nav_success`. A new
/// `*_begin` or a `select` while a phase is open aborts that phase.
pub fn compute_stage_metrics(events: &[TrialEvent]) -> Result<StageMetrics, MetricsError> {
    let first = events.first().ok_or(MetricsError::Empty)?;
    let mut open: Option<(PlacementKind, f64)> = None;
    let mut pending_select = false;
    let mut done = false;
    let mut last_t = f64::NEG_INFINITY;
    let mut m = StageMetrics { actions_before_nav: 0, navigation_count: 0, action_time: 0.0 };

    for (i, e) in events.iter().enumerate() {
        if e.participant != first.participant || e.system != first.system || e.stage != first.stage {
            return Err(MetricsError::Mixed);
        }
        if !(e.t >= last_t) {
            return Err(MetricsError::TimeReversal(i));
        }
        last_t = e.t;
        if done {
            return Err(MetricsError::AfterSuccess(i));
        }
        match e.kind {
            EventKind::PhaseBegin(k) => open = Some((k, e.t)),
            EventKind::PhaseCommit(k) => match open.take() {
                Some((ok, t0)) if ok == k => {
                    m.actions_before_nav += 1;
                    m.action_time += e.t - t0;
                }
                _ => return Err(MetricsError::IllegalOrder(i)),
            },
            EventKind::Select => {
                open = None;
                pending_select = true;
                m.navigation_count += 1;
            }
            EventKind::NavSuccess | EventKind::NavFail => {
                if !pending_select {
                    return Err(MetricsError::IllegalOrder(i));
                }
                pending_select = false;
                done = e.kind == EventKind::NavSuccess;
            }
        }
    }
    if !done {
        return Err(MetricsError::IncompleteStage);
    }
    if m.actions_before_nav == 0 {
        return Err(MetricsError::NoPlacement);
    }
    Ok(m)
}
