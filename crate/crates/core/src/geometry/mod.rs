//! Poses, quaternions and frame conversion.
//!
//! The robot map frame is right-handed: +x forward, +y left, +z up. The
//! viewer frame is left-handed: +x right, +y up, +z forward. Positions map as
//! `viewer(x, y, z) = robot(-y, z, x)`.

mod frames;
mod quat;

pub use frames::{anchor_to_map, robot_to_viewer_pos, robot_to_viewer_quat, viewer_to_robot_pos, viewer_to_robot_quat};
pub use quat::{quat_from_yaw, yaw_from_quat, Quat};

use crate::math::sqrt;

/// Tolerance used when accepting a caller-supplied quaternion as unit.
pub const UNIT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("quaternion is not unit length")]
    NonUnitQuaternion,
    #[error("frame mismatch: expected {expected:?}, found {found:?}")]
    FrameMismatch { expected: Frame, found: Frame },
    #[error("quaternion is not a pure rotation about the vertical axis")]
    NotYawOnly,
}

/// Position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn norm(&self) -> f64 {
        sqrt(self.dot(self))
    }

    pub fn dot(&self, o: &Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(&self, o: &Vec3) -> Vec3 {
        Vec3::new(self.y * o.z - self.z * o.y, self.z * o.x - self.x * o.z, self.x * o.y - self.y * o.x)
    }

    pub fn scale(&self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn add(&self, o: &Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    pub fn sub(&self, o: &Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    pub fn xy(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }
}

/// Point on the floor plane, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(&self, o: &Vec2) -> f64 {
        crate::math::hypot(o.x - self.x, o.y - self.y)
    }
}

/// Which convention a [`Pose`] is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Frame {
    /// Right-handed robot map frame.
    RobotMap,
    /// Left-handed viewer frame.
    Viewer,
}

/// Rigid pose tagged with its frame convention.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Pose {
    pub position: Vec3,
    pub orientation: Quat,
    pub frame: Frame,
}

impl Pose {
    pub const fn identity(frame: Frame) -> Self {
        Self { position: Vec3::ZERO, orientation: Quat::IDENTITY, frame }
    }

    pub fn new(position: Vec3, orientation: Quat, frame: Frame) -> Self {
        Self { position, orientation, frame }
    }

    /// Floor pose in the map frame: `(x, y, 0)` with heading `yaw`.
    pub fn planar(x: f64, y: f64, yaw: f64) -> Self {
        Self::new(Vec3::new(x, y, 0.0), quat_from_yaw(yaw), Frame::RobotMap)
    }

    /// Rigid-transform composition `self ∘ other`.
    pub fn compose(&self, other: &Pose) -> Result<Pose, GeometryError> {
        if self.frame != other.frame {
            return Err(GeometryError::FrameMismatch { expected: self.frame, found: other.frame });
        }
        let position = self.position.add(&self.orientation.rotate(&other.position));
        let orientation = self.orientation.mul(&other.orientation).normalized_or_identity();
        Ok(Pose::new(position, orientation, self.frame))
    }

    pub fn inverse(&self) -> Pose {
        let inv = self.orientation.conjugate();
        let position = inv.rotate(&self.position).scale(-1.0);
        Pose::new(position, inv, self.frame)
    }

    /// Converts to the robot map frame, converting handedness if needed.
    pub fn to_robot(&self) -> Result<Pose, GeometryError> {
        match self.frame {
            Frame::RobotMap => Ok(*self),
            Frame::Viewer => Ok(Pose::new(
                viewer_to_robot_pos(self.position)?,
                viewer_to_robot_quat(self.orientation)?,
                Frame::RobotMap,
            )),
        }
    }

    /// Converts to the viewer frame, converting handedness if needed.
    pub fn to_viewer(&self) -> Result<Pose, GeometryError> {
        match self.frame {
            Frame::Viewer => Ok(*self),
            Frame::RobotMap => Ok(Pose::new(
                robot_to_viewer_pos(self.position)?,
                robot_to_viewer_quat(self.orientation)?,
                Frame::Viewer,
            )),
        }
    }

    /// Heading about the map vertical; fails for tilted orientations.
    pub fn yaw(&self) -> Result<f64, GeometryError> {
        yaw_from_quat(self.orientation)
    }
}

/// Free-function form of [`Pose::compose`].
pub fn compose(a: &Pose, b: &Pose) -> Result<Pose, GeometryError> {
    a.compose(b)
}

/// Free-function form of [`Pose::inverse`].
pub fn invert(a: &Pose) -> Pose {
    a.inverse()
}

/// Pose of the co-localization anchor, expressed in the robot map frame.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AnchorPose(Pose);

impl AnchorPose {
    /// Anchor placed at the map origin.
    pub const MAP_ORIGIN: AnchorPose = AnchorPose(Pose::identity(Frame::RobotMap));

    pub fn new(pose: Pose) -> Result<Self, GeometryError> {
        if pose.frame != Frame::RobotMap {
            return Err(GeometryError::FrameMismatch { expected: Frame::RobotMap, found: pose.frame });
        }
        if !pose.position.is_finite() {
            return Err(GeometryError::InvalidArgument("anchor position must be finite"));
        }
        let orientation =
            Quat::new_unit(pose.orientation.x, pose.orientation.y, pose.orientation.z, pose.orientation.w)?;
        Ok(Self(Pose { orientation, ..pose }))
    }

    pub fn pose(&self) -> &Pose {
        &self.0
    }
}

impl Default for AnchorPose {
    fn default() -> Self {
        Self::MAP_ORIGIN
    }
}
