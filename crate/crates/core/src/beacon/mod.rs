//! Beacon lifecycle: modes, two-phase placement and effect emission.
//!
//! A [`Session`] consumes mode changes and pointer events one at a time and
//! returns the [`Effect`]s each command caused. Effects are the only output;
//! persistence, dispatch and broadcasting are driven from them elsewhere.

mod id;
mod session;

pub use id::{BeaconId, IdSource, ParseBeaconIdError, SequentialIds};
pub use session::{face_toward, replay, Session};

use crate::geometry::{Pose, Vec2};

/// Box dimensions of a beacon, meters. Mirrors the robot's body.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Footprint {
    pub length: f64,
    pub width: f64,
    pub height: f64,
}

impl Footprint {
    pub fn new(length: f64, width: f64, height: f64) -> Result<Self, BeaconError> {
        if !(length > 0.0 && width > 0.0 && height > 0.0)
            || !(length.is_finite() && width.is_finite() && height.is_finite())
        {
            return Err(BeaconError::InvalidFootprint);
        }
        Ok(Self { length, width, height })
    }
}

impl Default for Footprint {
    fn default() -> Self {
        Self { length: 0.39, width: 0.24, height: 0.26 }
    }
}

/// A persistent navigation target on the floor.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Beacon {
    pub id: BeaconId,
    /// Anchor-relative pose in the robot map frame; `z == 0`, yaw only.
    pub pose: Pose,
    pub footprint: Footprint,
}

impl Beacon {
    pub fn floor_position(&self) -> Vec2 {
        self.pose.position.xy()
    }

    pub fn yaw(&self) -> f64 {
        self.pose.yaw().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Mode {
    Off,
    Add,
    Move,
    Select,
    Delete,
}

impl Mode {
    pub const ALL: [Mode; 5] = [Mode::Off, Mode::Add, Mode::Move, Mode::Select, Mode::Delete];
}

/// Transient placement state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Phase {
    Idle,
    /// Beacon follows the pointer. `prior` is the committed pose to restore
    /// on abort (Move only).
    LocationSetting {
        id: BeaconId,
        prior: Option<Pose>,
    },
    /// Beacon faces the pointer until the confirming click.
    DirectionSetting {
        id: BeaconId,
        prior: Option<Pose>,
    },
}

impl Phase {
    pub fn beacon(&self) -> Option<BeaconId> {
        match *self {
            Phase::Idle => None,
            Phase::LocationSetting { id, .. } | Phase::DirectionSetting { id, .. } => Some(id),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PointerKind {
    Down,
    Drag,
    Up,
    Click,
}

impl PointerKind {
    pub const ALL: [PointerKind; 4] = [PointerKind::Down, PointerKind::Drag, PointerKind::Up, PointerKind::Click];
}

/// What the pointer ray hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hit {
    Floor,
    Beacon(BeaconId),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerEvent {
    pub kind: PointerKind,
    /// Anchor-relative floor point, meters.
    pub floor_point: Vec2,
    pub hit: Hit,
}

impl PointerEvent {
    pub fn new(kind: PointerKind, x: f64, y: f64, hit: Hit) -> Self {
        Self { kind, floor_point: Vec2::new(x, y), hit }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Effect {
    BeaconCreated(Beacon),
    BeaconTransientPose(BeaconId, Pose),
    BeaconCommitted(Beacon),
    BeaconDeleted(BeaconId),
    /// Goal pose already expressed in the robot map frame.
    GoalDispatched(BeaconId, Pose),
    Highlight(BeaconId, bool),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum BeaconError {
    #[error("unknown beacon {0}")]
    UnknownBeacon(BeaconId),
    #[error("pointer position must be finite")]
    NonFinitePointer,
    #[error("footprint dimensions must be positive and finite")]
    InvalidFootprint,
    #[error("duplicate beacon {0}")]
    DuplicateBeacon(BeaconId),
    #[error("beacon pose must lie on the floor with a yaw-only orientation")]
    OffFloorPose,
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
}
