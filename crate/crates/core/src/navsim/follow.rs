use alloc::vec::Vec;

use super::{path_length, plan, OccupancyGrid};
use crate::geometry::Vec2;
use crate::math::{abs, atan2, clamp, cos, hypot, sin, wrap_angle, PI};

/// Unicycle robot state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RobotState {
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
    pub v: f64,
    pub w: f64,
}

impl RobotState {
    pub fn at(x: f64, y: f64, yaw: f64) -> Self {
        Self { x, y, yaw, v: 0.0, w: 0.0 }
    }

    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NavGoal {
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FailReason {
    NoPath,
    Timeout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", tag = "status", content = "reason"))]
pub enum NavStatus {
    Idle,
    Following,
    RotatingToGoal,
    Succeeded,
    Failed(FailReason),
}

impl NavStatus {
    pub fn is_terminal(&self) -> bool {
        matches!(self, NavStatus::Succeeded | NavStatus::Failed(_))
    }
}

/// Controller limits, gains and tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NavConfig {
    pub v_max: f64,
    pub w_max: f64,
    pub k_v: f64,
    pub k_w: f64,
    pub waypoint_tolerance: f64,
    pub goal_position_tolerance: f64,
    pub goal_yaw_tolerance: f64,
    /// Drive forward only when the heading error is below this.
    pub drive_heading: f64,
    /// Seconds of navigation before giving up.
    pub timeout: f64,
}

impl Default for NavConfig {
    fn default() -> Self {
        Self {
            v_max: 0.5,
            w_max: 1.5,
            k_v: 1.0,
            k_w: 2.0,
            waypoint_tolerance: 0.10,
            goal_position_tolerance: 0.05,
            goal_yaw_tolerance: 5.0 * PI / 180.0,
            drive_heading: 30.0 * PI / 180.0,
            timeout: 120.0,
        }
    }
}

/// Path follower for one goal at a time.
#[derive(Debug, Clone)]
pub struct Navigator {
    config: NavConfig,
    goal: Option<NavGoal>,
    waypoints: Vec<Vec2>,
    next: usize,
    elapsed: f64,
    status: NavStatus,
}

impl Navigator {
    pub fn new(config: NavConfig) -> Self {
        Self { config, goal: None, waypoints: Vec::new(), next: 0, elapsed: 0.0, status: NavStatus::Idle }
    }

    pub fn config(&self) -> &NavConfig {
        &self.config
    }

    pub fn status(&self) -> NavStatus {
        self.status
    }

    pub fn goal(&self) -> Option<NavGoal> {
        self.goal
    }

    pub fn waypoints(&self) -> &[Vec2] {
        &self.waypoints
    }

    pub fn elapsed(&self) -> f64 {
        self.elapsed
    }

    /// Plans on `grid` (already inflated) and starts following. A goal that
    /// cannot be reached fails immediately with [`FailReason::NoPath`].
    pub fn dispatch(&mut self, goal: NavGoal, grid: &OccupancyGrid, robot: &RobotState) -> NavStatus {
        self.goal = Some(goal);
        self.elapsed = 0.0;
        self.waypoints.clear();
        self.next = 0;
        let target = Vec2::new(goal.x, goal.y);
        match plan(grid, robot.position(), target) {
            Ok(mut path) => {
                if let Some(last) = path.last_mut() {
                    *last = target;
                }
                self.next = usize::from(path.len() > 1);
                self.waypoints = path;
                self.status = NavStatus::Following;
            }
            Err(_) => self.status = NavStatus::Failed(FailReason::NoPath),
        }
        self.status
    }

    /// Drops the active goal.
    pub fn cancel(&mut self) {
        self.goal = None;
        self.waypoints.clear();
        self.status = NavStatus::Idle;
    }

    fn at_goal(&self, robot: &RobotState, goal: &NavGoal) -> bool {
        hypot(goal.x - robot.x, goal.y - robot.y) < self.config.goal_position_tolerance
            && abs(wrap_angle(goal.yaw - robot.yaw)) < self.config.goal_yaw_tolerance
    }

    /// Advances the controller and kinematics by `dt` seconds.
    pub fn tick(&mut self, robot: RobotState, dt: f64) -> (RobotState, NavStatus) {
        let stopped = RobotState { v: 0.0, w: 0.0, ..robot };
        let goal = match (self.status, self.goal) {
            (NavStatus::Following | NavStatus::RotatingToGoal, Some(goal)) => goal,
            _ => return (stopped, self.status),
        };
        if !(dt > 0.0) {
            return (stopped, self.status);
        }
        let c = self.config;
        let on_last = self.next + 1 >= self.waypoints.len();
        if on_last && self.at_goal(&robot, &goal) {
            self.status = NavStatus::Succeeded;
            return (stopped, self.status);
        }
        self.elapsed += dt;
        if self.elapsed > c.timeout {
            self.status = NavStatus::Failed(FailReason::Timeout);
            return (stopped, self.status);
        }

        let (mut v, mut w) = (0.0, 0.0);
        if self.status == NavStatus::Following {
            loop {
                let target = self.waypoints[self.next];
                let last = self.next + 1 >= self.waypoints.len();
                let dist = hypot(target.x - robot.x, target.y - robot.y);
                let tol = if last { c.goal_position_tolerance } else { c.waypoint_tolerance };
                if dist < tol {
                    if last {
                        self.status = NavStatus::RotatingToGoal;
                        break;
                    }
                    self.next += 1;
                    continue;
                }
                let heading_err = wrap_angle(atan2(target.y - robot.y, target.x - robot.x) - robot.yaw);
                w = clamp(c.k_w * heading_err, -c.w_max, c.w_max);
                if abs(heading_err) < c.drive_heading {
                    // speed follows the distance still to travel along the path
                    let remaining = dist + path_length(&self.waypoints[self.next..]);
                    v = clamp(c.k_v * remaining, 0.0, c.v_max);
                }
                break;
            }
        }
        if self.status == NavStatus::RotatingToGoal {
            let yaw_err = wrap_angle(goal.yaw - robot.yaw);
            w = clamp(c.k_w * yaw_err, -c.w_max, c.w_max);
            v = 0.0;
        }

        let next = RobotState {
            x: robot.x + v * cos(robot.yaw) * dt,
            y: robot.y + v * sin(robot.yaw) * dt,
            yaw: wrap_angle(robot.yaw + w * dt),
            v,
            w,
        };
        (next, self.status)
    }
}
