//! Trial event logging and stage scoring for study sessions.

use std::time::Instant;

use beacon_nav_core::beacon::{Effect, Footprint, Mode};
use beacon_nav_core::evalkit::{EventKind, PlacementKind, System, TrialEvent};
use beacon_nav_core::navsim::{check_stage, NavStatus, RobotState, Stage, StageCheck};

use super::events::ExperimentView;
use crate::formats::{EventLogWriter, FormatError};

pub(crate) struct Experiment {
    participant: String,
    system: System,
    writer: EventLogWriter,
    started: Instant,
    stages: Vec<Stage>,
    current: usize,
    awaiting_result: bool,
    footprint: Footprint,
}

/// Outcome of a finished navigation for the current stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct StageOutcome {
    pub stage: u8,
    pub check: StageCheck,
    pub success: bool,
}

impl Experiment {
    pub fn new(
        participant: String,
        system: System,
        writer: EventLogWriter,
        stages: Vec<Stage>,
        footprint: Footprint,
    ) -> Self {
        Self {
            participant,
            system,
            writer,
            started: Instant::now(),
            stages,
            current: 0,
            awaiting_result: false,
            footprint,
        }
    }

    pub fn current_stage(&self) -> Option<&Stage> {
        self.stages.get(self.current)
    }

    pub fn view(&self) -> ExperimentView {
        ExperimentView {
            participant: self.participant.clone(),
            system: self.system.as_str().into(),
            current_stage: self.current_stage().map(|s| s.id),
            completed: self.stages[..self.current].iter().map(|s| s.id).collect(),
        }
    }

    fn record(&mut self, kind: EventKind) -> Result<(), FormatError> {
        let Some(stage) = self.current_stage() else { return Ok(()) };
        let event = TrialEvent {
            t: self.started.elapsed().as_secs_f64(),
            participant: self.participant.clone(),
            system: self.system,
            stage: stage.id,
            kind,
        };
        self.writer.append(&event)
    }

    /// Logs placement and dispatch effects caused by one command in `mode`.
    pub fn on_effects(&mut self, mode: Mode, effects: &[Effect]) -> Result<(), FormatError> {
        for effect in effects {
            match effect {
                Effect::BeaconCreated(_) => self.record(EventKind::PhaseBegin(PlacementKind::Add))?,
                Effect::Highlight(_, true) if mode == Mode::Move => {
                    self.record(EventKind::PhaseBegin(PlacementKind::Move))?
                }
                Effect::BeaconCommitted(_) => {
                    let kind = if mode == Mode::Add { PlacementKind::Add } else { PlacementKind::Move };
                    self.record(EventKind::PhaseCommit(kind))?
                }
                Effect::GoalDispatched(..) => {
                    if self.current_stage().is_some() {
                        self.awaiting_result = true;
                    }
                    self.record(EventKind::Select)?
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Scores a finished navigation against the current stage. Success needs
    /// the navigator to succeed with the footprint inside the area and the
    /// heading within tolerance; only then does the session advance.
    pub fn on_nav_finished(
        &mut self,
        status: NavStatus,
        robot: &RobotState,
    ) -> Result<Option<StageOutcome>, FormatError> {
        if !self.awaiting_result {
            return Ok(None);
        }
        let Some(stage) = self.current_stage().copied() else { return Ok(None) };
        self.awaiting_result = false;
        let check = check_stage(&stage, robot, &self.footprint);
        let success = status == NavStatus::Succeeded && check.passed();
        self.record(if success { EventKind::NavSuccess } else { EventKind::NavFail })?;
        if success {
            self.current += 1;
        }
        Ok(Some(StageOutcome { stage: stage.id, check, success }))
    }
}
