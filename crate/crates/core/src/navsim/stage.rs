use crate::beacon::Footprint;
use crate::geometry::Vec2;
use crate::math::{abs, cos, sin, wrap_angle, PI};

use super::RobotState;

/// Heading tolerance used when a stage does not specify one (15°).
pub const DEFAULT_HEADING_TOLERANCE: f64 = 15.0 * PI / 180.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum StageError {
    #[error("stage size must be positive")]
    BadSize,
    #[error("heading tolerance must be positive")]
    BadTolerance,
    #[error("stage values must be finite")]
    NonFinite,
}

/// Rectangular target area with a required final heading.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Stage {
    pub id: u8,
    pub center: Vec2,
    pub width: f64,
    pub height: f64,
    /// Orientation of the area rectangle.
    pub yaw: f64,
    pub target_yaw: f64,
    pub yaw_tolerance: f64,
}

impl Stage {
    pub fn new(
        id: u8,
        center: Vec2,
        width: f64,
        height: f64,
        yaw: f64,
        target_yaw: f64,
        yaw_tolerance: f64,
    ) -> Result<Self, StageError> {
        let vals = [center.x, center.y, width, height, yaw, target_yaw, yaw_tolerance];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(StageError::NonFinite);
        }
        if !(width > 0.0 && height > 0.0) {
            return Err(StageError::BadSize);
        }
        if !(yaw_tolerance > 0.0) {
            return Err(StageError::BadTolerance);
        }
        Ok(Self { id, center, width, height, yaw, target_yaw, yaw_tolerance })
    }

    /// Whether map point `p` lies in the closed area rectangle.
    pub fn contains(&self, p: Vec2) -> bool {
        let (dx, dy) = (p.x - self.center.x, p.y - self.center.y);
        let (c, s) = (cos(self.yaw), sin(self.yaw));
        let lx = c * dx + s * dy;
        let ly = -s * dx + c * dy;
        abs(lx) <= 0.5 * self.width && abs(ly) <= 0.5 * self.height
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StageCheck {
    pub inside: bool,
    pub heading_ok: bool,
}

impl StageCheck {
    pub fn passed(&self) -> bool {
        self.inside && self.heading_ok
    }
}

/// Corners of the robot's footprint rectangle (length along the heading).
pub fn footprint_corners(robot: &RobotState, footprint: &Footprint) -> [Vec2; 4] {
    let (hl, hw) = (0.5 * footprint.length, 0.5 * footprint.width);
    let (c, s) = (cos(robot.yaw), sin(robot.yaw));
    [(hl, hw), (hl, -hw), (-hl, -hw), (-hl, hw)]
        .map(|(a, b)| Vec2::new(robot.x + c * a - s * b, robot.y + s * a + c * b))
}

/// The footprint is inside iff all four corners are inside the (convex) area.
pub fn check_stage(stage: &Stage, robot: &RobotState, footprint: &Footprint) -> StageCheck {
    let inside = footprint_corners(robot, footprint).iter().all(|p| stage.contains(*p));
    let heading_ok = abs(wrap_angle(robot.yaw - stage.target_yaw)) <= stage.yaw_tolerance;
    StageCheck { inside, heading_ok }
}
