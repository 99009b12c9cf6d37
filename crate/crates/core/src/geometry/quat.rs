use super::{GeometryError, Vec3, UNIT_TOLERANCE};
use crate::math::{abs, atan2, cos, sin, sqrt, wrap_angle};

/// Unit quaternion, vector part `(x, y, z)` and scalar part `w`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Quat {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub w: f64,
}

impl Quat {
    pub const IDENTITY: Quat = Quat { x: 0.0, y: 0.0, z: 0.0, w: 1.0 };

    /// Accepts a quaternion within [`UNIT_TOLERANCE`] of unit norm and
    /// renormalizes it.
    pub fn new_unit(x: f64, y: f64, z: f64, w: f64) -> Result<Quat, GeometryError> {
        let q = Quat { x, y, z, w };
        if !(x.is_finite() && y.is_finite() && z.is_finite() && w.is_finite()) {
            return Err(GeometryError::InvalidArgument("quaternion components must be finite"));
        }
        if abs(q.norm() - 1.0) > UNIT_TOLERANCE {
            return Err(GeometryError::NonUnitQuaternion);
        }
        Ok(q.scaled(1.0 / q.norm()))
    }

    /// Normalizes an arbitrary non-zero quaternion.
    pub fn normalize(x: f64, y: f64, z: f64, w: f64) -> Result<Quat, GeometryError> {
        let q = Quat { x, y, z, w };
        let n = q.norm();
        if !n.is_finite() || n == 0.0 {
            return Err(GeometryError::InvalidArgument("cannot normalize a zero or non-finite quaternion"));
        }
        Ok(q.scaled(1.0 / n))
    }

    pub fn norm(&self) -> f64 {
        sqrt(self.x * self.x + self.y * self.y + self.z * self.z + self.w * self.w)
    }

    pub(crate) fn normalized_or_identity(&self) -> Quat {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            Quat::IDENTITY
        } else {
            self.scaled(1.0 / n)
        }
    }

    fn scaled(&self, s: f64) -> Quat {
        Quat { x: self.x * s, y: self.y * s, z: self.z * s, w: self.w * s }
    }

    pub fn conjugate(&self) -> Quat {
        Quat { x: -self.x, y: -self.y, z: -self.z, w: self.w }
    }

    /// Hamilton product `self * o`.
    pub fn mul(&self, o: &Quat) -> Quat {
        Quat {
            w: self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            x: self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            y: self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            z: self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        }
    }

    /// Rotates `v` by this quaternion.
    pub fn rotate(&self, v: &Vec3) -> Vec3 {
        // v' = v + 2w(u × v) + 2 u × (u × v)
        let u = Vec3::new(self.x, self.y, self.z);
        let t = u.cross(v).scale(2.0);
        v.add(&t.scale(self.w)).add(&u.cross(&t))
    }

    /// Sign-normalized representative with `w >= 0`.
    pub fn canonical(&self) -> Quat {
        if self.w < 0.0 {
            self.scaled(-1.0)
        } else {
            *self
        }
    }

    /// Row-major 3×3 rotation matrix.
    pub fn to_rotation_matrix(&self) -> [[f64; 3]; 3] {
        let Quat { x, y, z, w } = *self;
        [
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - z * w), 2.0 * (x * z + y * w)],
            [2.0 * (x * y + z * w), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - x * w)],
            [2.0 * (x * z - y * w), 2.0 * (y * z + x * w), 1.0 - 2.0 * (x * x + y * y)],
        ]
    }
}

impl Default for Quat {
    fn default() -> Self {
        Quat::IDENTITY
    }
}

/// Rotation of `yaw` radians about the map +z axis, zero along +x.
pub fn quat_from_yaw(yaw: f64) -> Quat {
    let half = 0.5 * wrap_angle(yaw);
    Quat { x: 0.0, y: 0.0, z: sin(half), w: cos(half) }.canonical()
}

/// Heading of a yaw-only quaternion, in `(-π, π]`.
pub fn yaw_from_quat(q: Quat) -> Result<f64, GeometryError> {
    let q = Quat::new_unit(q.x, q.y, q.z, q.w)?;
    if abs(q.x) > UNIT_TOLERANCE || abs(q.y) > UNIT_TOLERANCE {
        return Err(GeometryError::NotYawOnly);
    }
    Ok(wrap_angle(2.0 * atan2(q.z, q.w)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::PI;

    #[test]
    fn yaw_zero_is_identity() {
        assert_eq!(quat_from_yaw(0.0), Quat::IDENTITY);
    }

    #[test]
    fn quarter_turn_half_angle() {
        let q = quat_from_yaw(PI / 2.0);
        let h = core::f64::consts::FRAC_1_SQRT_2;
        assert!(abs(q.z - h) < 1e-15 && abs(q.w - h) < 1e-15);
        assert!(abs(yaw_from_quat(q).unwrap() - PI / 2.0) < 1e-15);
    }

    #[test]
    fn half_turn_keeps_positive_branch() {
        let y = yaw_from_quat(quat_from_yaw(PI)).unwrap();
        assert!(abs(y - PI) < 1e-12);
        let y = yaw_from_quat(quat_from_yaw(-PI + 1e-9)).unwrap();
        assert!(abs(y - (-PI + 1e-9)) < 1e-12);
    }

    #[test]
    fn tilted_quaternion_has_no_yaw() {
        let q = Quat::normalize(0.1, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(yaw_from_quat(q), Err(GeometryError::NotYawOnly));
    }

    #[test]
    fn rejects_non_unit() {
        assert_eq!(Quat::new_unit(0.0, 0.0, 0.0, 0.5), Err(GeometryError::NonUnitQuaternion));
        assert!(Quat::new_unit(f64::NAN, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn rotate_matches_matrix() {
        let q = Quat::normalize(0.3, -0.2, 0.5, 0.7).unwrap();
        let v = Vec3::new(1.0, -2.0, 0.5);
        let m = q.to_rotation_matrix();
        let r = q.rotate(&v);
        let e = [
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        ];
        assert!(abs(r.x - e[0]) < 1e-12 && abs(r.y - e[1]) < 1e-12 && abs(r.z - e[2]) < 1e-12);
    }
}
