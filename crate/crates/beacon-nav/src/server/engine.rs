//! The serialized command stream: sole owner of the session, the database and
//! the experiment log.

use axum::http::StatusCode;
use beacon_nav_core::beacon::{BeaconError, BeaconId, Effect, Mode, Phase, PointerEvent, Session};
use beacon_nav_core::navsim::{NavGoal, NavStatus, RobotState, Stage};
use tokio::sync::{broadcast, mpsc, oneshot, watch};
use tokio_util::sync::CancellationToken;

use super::events::{BeaconView, CommandReply, OutboundEvent, StateSnapshot};
use super::experiment::Experiment;
use crate::bridge::GoalSender;
use crate::sim::goal_from_pose;
use crate::store::{BeaconRecord, Database};

/// Latest robot pose and navigation status, as published by whichever side
/// drives the robot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotSnapshot {
    pub robot: RobotState,
    pub status: NavStatus,
    pub t: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum ApiError {
    #[error("unknown beacon {0}")]
    UnknownBeacon(BeaconId),
    #[error("{0}")]
    BadRequest(String),
    #[error("storage failure: {0}")]
    Storage(String),
    #[error("server is shutting down")]
    Unavailable,
}

impl ApiError {
    pub fn status(&self) -> StatusCode {
        match self {
            ApiError::UnknownBeacon(_) => StatusCode::NOT_FOUND,
            ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::Storage(_) => StatusCode::INTERNAL_SERVER_ERROR,
            ApiError::Unavailable => StatusCode::SERVICE_UNAVAILABLE,
        }
    }
}

impl From<BeaconError> for ApiError {
    fn from(e: BeaconError) -> Self {
        match e {
            BeaconError::UnknownBeacon(id) => ApiError::UnknownBeacon(id),
            other => ApiError::BadRequest(other.to_string()),
        }
    }
}

pub(crate) type Reply<T> = oneshot::Sender<Result<T, ApiError>>;

pub(crate) enum Command {
    SetMode(Mode, Reply<CommandReply>),
    Pointer(PointerEvent, Reply<CommandReply>),
    State(oneshot::Sender<StateSnapshot>),
    NavFinished { status: NavStatus, robot: RobotState },
}

/// Where dispatched goals go.
pub(crate) enum GoalOut {
    Simulator(mpsc::UnboundedSender<NavGoal>),
    Bridge(GoalSender),
}

pub(crate) struct Engine {
    pub session: Session,
    pub db: Database,
    pub events: broadcast::Sender<OutboundEvent>,
    pub goals: GoalOut,
    pub robot: watch::Receiver<RobotSnapshot>,
    pub stages: Vec<Stage>,
    pub experiment: Option<Experiment>,
}

fn fresh_id() -> BeaconId {
    BeaconId::from_u128(uuid::Uuid::new_v4().as_u128())
}

impl Engine {
    pub async fn run(mut self, mut commands: mpsc::Receiver<Command>, cancel: CancellationToken) {
        loop {
            let command = tokio::select! {
                _ = cancel.cancelled() => break,
                command = commands.recv() => match command {
                    Some(c) => c,
                    None => break,
                },
            };
            self.handle(command);
        }
        self.shutdown();
    }

    fn handle(&mut self, command: Command) {
        match command {
            Command::SetMode(mode, reply) => {
                let before = self.highlighted();
                let effects = self.session.set_mode(mode);
                let mut result = self.apply(mode, &effects, before);
                if let Ok(events) = &mut result {
                    let e = OutboundEvent::ModeChanged { mode };
                    let _ = self.events.send(e.clone());
                    events.push(e);
                }
                let _ = reply.send(result.map(|events| CommandReply { mode, events }));
            }
            Command::Pointer(event, reply) => {
                let before = self.highlighted();
                let mode = self.session.mode();
                let mut ids = fresh_id;
                let result = self
                    .session
                    .handle_pointer(&event, &mut ids)
                    .map_err(ApiError::from)
                    .and_then(|effects| self.apply(mode, &effects, before));
                let _ = reply.send(result.map(|events| CommandReply { mode, events }));
            }
            Command::State(reply) => {
                let _ = reply.send(self.snapshot());
            }
            Command::NavFinished { status, robot } => self.nav_finished(status, robot),
        }
    }

    fn highlighted(&self) -> Option<BeaconId> {
        match self.session.phase() {
            Phase::LocationSetting { id, prior: Some(_) } | Phase::DirectionSetting { id, prior: Some(_) } => Some(id),
            _ => None,
        }
    }

    /// Persists, dispatches and broadcasts the effects of one command.
    fn apply(
        &mut self,
        mode: Mode,
        effects: &[Effect],
        highlighted_before: Option<BeaconId>,
    ) -> Result<Vec<OutboundEvent>, ApiError> {
        let mut out = Vec::new();
        let mut failure = None;
        for effect in effects {
            let event = match *effect {
                Effect::BeaconCreated(beacon) => OutboundEvent::BeaconUpsert { beacon, transient: true },
                Effect::BeaconTransientPose(id, pose) => {
                    let Some(mut beacon) = self.session.beacon(&id).copied() else { continue };
                    beacon.pose = pose;
                    OutboundEvent::BeaconUpsert { beacon, transient: self.session.is_transient(&id) }
                }
                Effect::BeaconCommitted(beacon) => {
                    if let Err(e) = self.db.upsert(BeaconRecord::from_beacon(&beacon)) {
                        failure.get_or_insert(ApiError::Storage(e.to_string()));
                    }
                    OutboundEvent::BeaconUpsert { beacon, transient: false }
                }
                Effect::BeaconDeleted(id) => {
                    if self.db.contains(&id) {
                        if let Err(e) = self.db.delete(&id) {
                            failure.get_or_insert(ApiError::Storage(e.to_string()));
                        }
                    }
                    OutboundEvent::BeaconRemoved { id }
                }
                Effect::GoalDispatched(id, pose) => {
                    match &self.goals {
                        GoalOut::Simulator(tx) => {
                            let _ = tx.send(goal_from_pose(&pose));
                        }
                        GoalOut::Bridge(tx) => {
                            tx.send(pose);
                        }
                    }
                    OutboundEvent::GoalDispatched { id, pose }
                }
                Effect::Highlight(id, on) => OutboundEvent::Highlight { id, on },
            };
            let _ = self.events.send(event.clone());
            out.push(event);
        }
        if let Some(id) = highlighted_before.filter(|id| self.highlighted() != Some(*id)) {
            if self.session.beacon(&id).is_some() {
                let event = OutboundEvent::Highlight { id, on: false };
                let _ = self.events.send(event.clone());
                out.push(event);
            }
        }
        if let Some(exp) = self.experiment.as_mut() {
            if let Err(e) = exp.on_effects(mode, effects) {
                tracing::error!("experiment log: {e}");
                failure.get_or_insert(ApiError::Storage(e.to_string()));
            }
        }
        match failure {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }

    fn nav_finished(&mut self, status: NavStatus, robot: RobotState) {
        let Some(exp) = self.experiment.as_mut() else { return };
        match exp.on_nav_finished(status, &robot) {
            Ok(Some(outcome)) => {
                tracing::info!(
                    "stage {} {}: inside={} heading_ok={}",
                    outcome.stage,
                    if outcome.success { "completed" } else { "failed" },
                    outcome.check.inside,
                    outcome.check.heading_ok
                );
                let _ = self.events.send(OutboundEvent::StageResult {
                    stage: outcome.stage,
                    inside: outcome.check.inside,
                    heading_ok: outcome.check.heading_ok,
                });
            }
            Ok(None) => {}
            Err(e) => tracing::error!("experiment log: {e}"),
        }
    }

    fn snapshot(&self) -> StateSnapshot {
        let robot = *self.robot.borrow();
        let highlighted = self.highlighted();
        StateSnapshot {
            mode: self.session.mode(),
            phase: self.session.phase().into(),
            beacons: self
                .session
                .beacons()
                .values()
                .map(|b| BeaconView {
                    beacon: *b,
                    transient: self.session.is_transient(&b.id),
                    highlighted: highlighted == Some(b.id),
                })
                .collect(),
            robot: robot.robot,
            nav_status: robot.status,
            stages: self.stages.clone(),
            anchor: *self.session.anchor().pose(),
            footprint: self.session.footprint(),
            experiment: self.experiment.as_ref().map(Experiment::view),
        }
    }

    /// Drops any placement in progress and flushes the database.
    fn shutdown(&mut self) {
        let before = self.highlighted();
        let mode = self.session.mode();
        let effects = self.session.abort();
        if let Err(e) = self.apply(mode, &effects, before) {
            tracing::error!("during shutdown: {e}");
        }
        if let Err(e) = self.db.save() {
            tracing::error!("saving beacon database: {e}");
        }
    }
}
