use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::{Beacon, BeaconError, BeaconId, Effect, Footprint, Hit, IdSource, Mode, Phase, PointerEvent, PointerKind};
use crate::geometry::{anchor_to_map, AnchorPose, Frame, Pose, Vec2, Vec3};
use crate::math::{abs, atan2};

const COINCIDENT: f64 = 1e-9;

/// Heading that makes a beacon at `from` face `to`, or `None` when the two
/// points coincide (callers keep the previous heading).
pub fn face_toward(from: Vec2, to: Vec2) -> Option<f64> {
    let dx = to.x - from.x;
    let dy = to.y - from.y;
    if abs(dx) <= COINCIDENT && abs(dy) <= COINCIDENT {
        return None;
    }
    Some(atan2(dy, dx))
}

/// Rebuilds a beacon set from an effect log.
pub fn replay<'a, I>(effects: I) -> BTreeMap<BeaconId, Beacon>
where
    I: IntoIterator<Item = &'a Effect>,
{
    let mut beacons = BTreeMap::new();
    for effect in effects {
        match effect {
            Effect::BeaconCreated(b) | Effect::BeaconCommitted(b) => {
                beacons.insert(b.id, *b);
            }
            Effect::BeaconTransientPose(id, pose) => {
                if let Some(b) = beacons.get_mut(id) {
                    b.pose = *pose;
                }
            }
            Effect::BeaconDeleted(id) => {
                beacons.remove(id);
            }
            Effect::GoalDispatched(..) | Effect::Highlight(..) => {}
        }
    }
    beacons
}

/// Server-side interaction state: one active mode, at most one beacon in a
/// transient placement phase, and the beacon set.
#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    mode: Mode,
    phase: Phase,
    beacons: BTreeMap<BeaconId, Beacon>,
    anchor: AnchorPose,
    footprint: Footprint,
}

impl Session {
    pub fn new(anchor: AnchorPose, footprint: Footprint) -> Self {
        Self { mode: Mode::Off, phase: Phase::Idle, beacons: BTreeMap::new(), anchor, footprint }
    }

    /// Builds a session in an arbitrary mode and phase, e.g. from a snapshot.
    /// The phase's beacon must be present in `beacons`.
    pub fn from_parts(
        mode: Mode,
        phase: Phase,
        beacons: impl IntoIterator<Item = Beacon>,
        anchor: AnchorPose,
        footprint: Footprint,
    ) -> Result<Self, BeaconError> {
        let beacons: BTreeMap<_, _> = beacons.into_iter().map(|b| (b.id, b)).collect();
        if let Some(id) = phase.beacon() {
            if !beacons.contains_key(&id) {
                return Err(BeaconError::UnknownBeacon(id));
            }
        }
        Ok(Self { mode, phase, beacons, anchor, footprint })
    }

    /// Instantiates previously committed beacons (e.g. loaded from storage).
    pub fn restore(&mut self, beacons: impl IntoIterator<Item = Beacon>) -> Result<(), BeaconError> {
        for b in beacons {
            if !is_floor_pose(&b.pose) {
                return Err(BeaconError::OffFloorPose);
            }
            if self.beacons.contains_key(&b.id) {
                return Err(BeaconError::DuplicateBeacon(b.id));
            }
            self.beacons.insert(b.id, b);
        }
        Ok(())
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn anchor(&self) -> &AnchorPose {
        &self.anchor
    }

    pub fn footprint(&self) -> Footprint {
        self.footprint
    }

    pub fn beacons(&self) -> &BTreeMap<BeaconId, Beacon> {
        &self.beacons
    }

    pub fn beacon(&self, id: &BeaconId) -> Option<&Beacon> {
        self.beacons.get(id)
    }

    /// True while `id` is being placed and not yet committed.
    pub fn is_transient(&self, id: &BeaconId) -> bool {
        self.phase.beacon().as_ref() == Some(id)
    }

    /// Switches mode, aborting any placement in progress first.
    pub fn set_mode(&mut self, mode: Mode) -> Vec<Effect> {
        let effects = self.abort();
        self.mode = mode;
        effects
    }

    /// Aborts a transient placement: an uncommitted new beacon is removed,
    /// a moved beacon returns to its prior pose.
    pub fn abort(&mut self) -> Vec<Effect> {
        let phase = core::mem::replace(&mut self.phase, Phase::Idle);
        match phase {
            Phase::Idle => Vec::new(),
            Phase::LocationSetting { id, prior } | Phase::DirectionSetting { id, prior } => match prior {
                None => {
                    self.beacons.remove(&id);
                    vec![Effect::BeaconDeleted(id)]
                }
                Some(pose) => {
                    if let Some(b) = self.beacons.get_mut(&id) {
                        b.pose = pose;
                    }
                    vec![Effect::BeaconTransientPose(id, pose)]
                }
            },
        }
    }

    /// Applies one pointer event. Cells of the (mode, phase, event) table that
    /// have no transition are no-ops with no effects.
    pub fn handle_pointer(&mut self, event: &PointerEvent, ids: &mut dyn IdSource) -> Result<Vec<Effect>, BeaconError> {
        if !event.floor_point.is_finite() {
            return Err(BeaconError::NonFinitePointer);
        }
        if let Hit::Beacon(id) = event.hit {
            if !self.beacons.contains_key(&id) {
                return Err(BeaconError::UnknownBeacon(id));
            }
        }
        let p = event.floor_point;

        let effects = match (self.mode, self.phase, event.kind, event.hit) {
            (Mode::Add, Phase::Idle, PointerKind::Down, Hit::Floor) => {
                let id = fresh_id(ids, &self.beacons);
                let beacon = Beacon { id, pose: Pose::planar(p.x, p.y, 0.0), footprint: self.footprint };
                self.beacons.insert(id, beacon);
                self.phase = Phase::LocationSetting { id, prior: None };
                vec![Effect::BeaconCreated(beacon)]
            }
            (Mode::Add | Mode::Move, Phase::LocationSetting { id, .. }, PointerKind::Drag, _) => {
                let b = self.beacon_mut(id)?;
                b.pose.position = Vec3::new(p.x, p.y, 0.0);
                vec![Effect::BeaconTransientPose(id, b.pose)]
            }
            (Mode::Add | Mode::Move, Phase::LocationSetting { id, prior }, PointerKind::Up, _) => {
                self.phase = Phase::DirectionSetting { id, prior };
                Vec::new()
            }
            (Mode::Add | Mode::Move, Phase::DirectionSetting { id, .. }, PointerKind::Drag, _) => {
                let b = self.beacon_mut(id)?;
                if let Some(yaw) = face_toward(b.pose.position.xy(), p) {
                    b.pose = Pose::planar(b.pose.position.x, b.pose.position.y, yaw);
                }
                vec![Effect::BeaconTransientPose(id, b.pose)]
            }
            (Mode::Add | Mode::Move, Phase::DirectionSetting { id, .. }, PointerKind::Click, _) => {
                let b = *self.beacon_mut(id)?;
                debug_assert!(is_floor_pose(&b.pose));
                self.phase = Phase::Idle;
                vec![Effect::BeaconCommitted(b)]
            }
            (Mode::Move, Phase::Idle, PointerKind::Down, Hit::Beacon(id)) => {
                let prior = self.beacon_mut(id)?.pose;
                self.phase = Phase::LocationSetting { id, prior: Some(prior) };
                vec![Effect::Highlight(id, true)]
            }
            (Mode::Select, Phase::Idle, PointerKind::Click, Hit::Beacon(id)) => {
                let pose = self.beacon_mut(id)?.pose;
                let goal = anchor_to_map(&pose, &self.anchor)?;
                vec![Effect::GoalDispatched(id, goal)]
            }
            (Mode::Delete, Phase::Idle, PointerKind::Click, Hit::Beacon(id)) => {
                self.beacons.remove(&id);
                vec![Effect::BeaconDeleted(id)]
            }
            _ => Vec::new(),
        };
        Ok(effects)
    }

    fn beacon_mut(&mut self, id: BeaconId) -> Result<&mut Beacon, BeaconError> {
        self.beacons.get_mut(&id).ok_or(BeaconError::UnknownBeacon(id))
    }
}

fn fresh_id(ids: &mut dyn IdSource, taken: &BTreeMap<BeaconId, Beacon>) -> BeaconId {
    loop {
        let id = ids.next_id();
        if !taken.contains_key(&id) {
            return id;
        }
    }
}

pub(crate) fn is_floor_pose(pose: &Pose) -> bool {
    pose.frame == Frame::RobotMap && abs(pose.position.z) <= 1e-9 && pose.yaw().is_ok()
}
