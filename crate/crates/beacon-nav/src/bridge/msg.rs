//! Fixed-layout message payloads carried inside frames.

use beacon_nav_core::geometry::{Frame as PoseFrame, Pose, Quat, Vec3, UNIT_TOLERANCE};

pub const TOPIC_GOAL_POSE: &str = "goal_pose";
pub const TOPIC_ROBOT_POSE: &str = "robot_pose";
pub const TOPIC_LOG: &str = "log";

/// Encoded size of a pose: seven little-endian f64 values.
pub const POSE_MSG_LEN: usize = 56;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MsgError {
    #[error("pose payload is {0} bytes, expected {POSE_MSG_LEN}")]
    PoseLength(usize),
    #[error("pose must be in the robot map frame")]
    ViewerFrame,
    #[error("pose quaternion norm {0} is not 1")]
    NonUnitQuaternion(f64),
    #[error("pose has a non-finite field")]
    NonFinite,
    #[error("log payload is not valid UTF-8")]
    LogNotUtf8,
}

/// Serializes `x, y, z, qx, qy, qz, qw` in that order.
pub fn encode_pose_msg(pose: &Pose) -> Result<[u8; POSE_MSG_LEN], MsgError> {
    if pose.frame != PoseFrame::RobotMap {
        return Err(MsgError::ViewerFrame);
    }
    let (p, q) = (pose.position, pose.orientation);
    let mut out = [0u8; POSE_MSG_LEN];
    for (chunk, v) in out.chunks_exact_mut(8).zip([p.x, p.y, p.z, q.x, q.y, q.z, q.w]) {
        chunk.copy_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

/// Inverse of [`encode_pose_msg`]; values are taken bit-for-bit.
pub fn decode_pose_msg(bytes: &[u8]) -> Result<Pose, MsgError> {
    if bytes.len() != POSE_MSG_LEN {
        return Err(MsgError::PoseLength(bytes.len()));
    }
    let mut v = [0f64; 7];
    for (slot, chunk) in v.iter_mut().zip(bytes.chunks_exact(8)) {
        *slot = f64::from_le_bytes(chunk.try_into().expect("8-byte chunk"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(MsgError::NonFinite);
    }
    let q = Quat { x: v[3], y: v[4], z: v[5], w: v[6] };
    if (q.norm() - 1.0).abs() > UNIT_TOLERANCE {
        return Err(MsgError::NonUnitQuaternion(q.norm()));
    }
    Ok(Pose::new(Vec3::new(v[0], v[1], v[2]), q, PoseFrame::RobotMap))
}

pub fn decode_log_msg(bytes: &[u8]) -> Result<String, MsgError> {
    String::from_utf8(bytes.to_vec()).map_err(|_| MsgError::LogNotUtf8)
}
