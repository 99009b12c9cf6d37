//! Wire shapes of the operator API and event stream.

use beacon_nav_core::beacon::{Beacon, BeaconId, Footprint, Hit, Mode, Phase, PointerEvent, PointerKind};
use beacon_nav_core::geometry::Pose;
use beacon_nav_core::navsim::{NavStatus, RobotState, Stage};
use serde::{Deserialize, Serialize};

/// Pushed to `/events` subscribers, one JSON object per line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum OutboundEvent {
    RobotPose { robot: RobotState, t: f64 },
    BeaconUpsert { beacon: Beacon, transient: bool },
    BeaconRemoved { id: BeaconId },
    Highlight { id: BeaconId, on: bool },
    GoalDispatched { id: BeaconId, pose: Pose },
    NavStatusChanged { status: NavStatus },
    StageResult { stage: u8, inside: bool, heading_ok: bool },
    ModeChanged { mode: Mode },
}

/// Pointer hit as sent by the console: `"floor"` or `{"beacon": "<id>"}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HitBody {
    Floor,
    Beacon(BeaconId),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointerBody {
    pub kind: PointerKind,
    pub x: f64,
    pub y: f64,
    pub hit: HitBody,
}

impl PointerBody {
    pub fn to_event(self) -> PointerEvent {
        let hit = match self.hit {
            HitBody::Floor => Hit::Floor,
            HitBody::Beacon(id) => Hit::Beacon(id),
        };
        PointerEvent::new(self.kind, self.x, self.y, hit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeBody {
    pub mode: Mode,
}

/// Reply to a mode or pointer command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommandReply {
    pub mode: Mode,
    pub events: Vec<OutboundEvent>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeaconView {
    #[serde(flatten)]
    pub beacon: Beacon,
    /// In a placement phase and not yet committed.
    pub transient: bool,
    /// Picked up for moving.
    pub highlighted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhaseView {
    Idle,
    LocationSetting { beacon: BeaconId },
    DirectionSetting { beacon: BeaconId },
}

impl From<Phase> for PhaseView {
    fn from(p: Phase) -> Self {
        match p {
            Phase::Idle => PhaseView::Idle,
            Phase::LocationSetting { id, .. } => PhaseView::LocationSetting { beacon: id },
            Phase::DirectionSetting { id, .. } => PhaseView::DirectionSetting { beacon: id },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentView {
    pub participant: String,
    pub system: String,
    /// `None` once every stage is complete.
    pub current_stage: Option<u8>,
    pub completed: Vec<u8>,
}

/// Snapshot served by `GET /state`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSnapshot {
    pub mode: Mode,
    pub phase: PhaseView,
    pub beacons: Vec<BeaconView>,
    pub robot: RobotState,
    pub nav_status: NavStatus,
    pub stages: Vec<Stage>,
    pub anchor: Pose,
    pub footprint: Footprint,
    pub experiment: Option<ExperimentView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
}
