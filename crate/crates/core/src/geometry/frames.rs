use super::{AnchorPose, Frame, GeometryError, Pose, Quat, Vec3};

fn check_finite(v: &Vec3) -> Result<(), GeometryError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(GeometryError::InvalidArgument("position components must be finite"))
    }
}

/// Viewer (left-handed) position to robot map (right-handed) position.
pub fn viewer_to_robot_pos(v: Vec3) -> Result<Vec3, GeometryError> {
    check_finite(&v)?;
    Ok(Vec3::new(v.z, -v.x, v.y))
}

/// Robot map position to viewer position.
pub fn robot_to_viewer_pos(v: Vec3) -> Result<Vec3, GeometryError> {
    check_finite(&v)?;
    Ok(Vec3::new(-v.y, v.z, v.x))
}

// The axis map P has det -1, so conjugating a rotation by it maps the
// rotation axis n to P·n and flips the angle: the vector part becomes -P·u
// while w is kept.

/// Viewer orientation to robot map orientation.
pub fn viewer_to_robot_quat(q: Quat) -> Result<Quat, GeometryError> {
    let q = Quat::new_unit(q.x, q.y, q.z, q.w)?;
    // -Pᵀ·(x, y, z) = -(z, -x, y)
    Ok(Quat { x: -q.z, y: q.x, z: -q.y, w: q.w }.canonical())
}

/// Robot map orientation to viewer orientation.
pub fn robot_to_viewer_quat(q: Quat) -> Result<Quat, GeometryError> {
    let q = Quat::new_unit(q.x, q.y, q.z, q.w)?;
    // -P·(x, y, z) = -(-y, z, x)
    Ok(Quat { x: q.y, y: -q.z, z: -q.x, w: q.w }.canonical())
}

/// Expresses an anchor-relative pose in the robot map frame.
pub fn anchor_to_map(local: &Pose, anchor: &AnchorPose) -> Result<Pose, GeometryError> {
    if local.frame != Frame::RobotMap {
        return Err(GeometryError::FrameMismatch { expected: Frame::RobotMap, found: local.frame });
    }
    let mut out = anchor.pose().compose(local)?;
    out.orientation = out.orientation.canonical();
    Ok(out)
}
