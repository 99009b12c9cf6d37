//! Fixed-step simulated robot shared by the server's built-in simulator and
//! the stand-alone robot process.

use beacon_nav_core::beacon::Footprint;
use beacon_nav_core::geometry::Pose;
use beacon_nav_core::navsim::{GridError, NavConfig, NavGoal, NavStatus, Navigator, OccupancyGrid, RobotState};

#[derive(Debug, Clone)]
pub struct SimRobot {
    grid: OccupancyGrid,
    navigator: Navigator,
    robot: RobotState,
    dt: f64,
    t: f64,
}

impl SimRobot {
    /// `map` is inflated by the footprint's circumscribed radius for planning.
    pub fn new(
        map: &OccupancyGrid,
        footprint: &Footprint,
        nav: NavConfig,
        start: RobotState,
        dt: f64,
    ) -> Result<Self, GridError> {
        let grid = map.inflate(OccupancyGrid::circumscribed_radius(footprint.length, footprint.width))?;
        Ok(Self { grid, navigator: Navigator::new(nav), robot: start, dt, t: 0.0 })
    }

    pub fn robot(&self) -> RobotState {
        self.robot
    }

    pub fn status(&self) -> NavStatus {
        self.navigator.status()
    }

    /// Simulated seconds since start.
    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn planning_grid(&self) -> &OccupancyGrid {
        &self.grid
    }

    pub fn dispatch(&mut self, goal: NavGoal) -> NavStatus {
        self.robot.v = 0.0;
        self.robot.w = 0.0;
        self.navigator.dispatch(goal, &self.grid, &self.robot)
    }

    /// Advances one step. Returns the new status if it changed.
    pub fn step(&mut self) -> Option<NavStatus> {
        let before = self.navigator.status();
        self.t += self.dt;
        if matches!(before, NavStatus::Following | NavStatus::RotatingToGoal) {
            let (robot, status) = self.navigator.tick(self.robot, self.dt);
            self.robot = robot;
            (status != before).then_some(status)
        } else {
            self.robot.v = 0.0;
            self.robot.w = 0.0;
            None
        }
    }
}

/// Goal in the simulator's terms; non-yaw orientations fall back to the
/// heading of the rotated x axis.
pub fn goal_from_pose(pose: &Pose) -> NavGoal {
    let yaw = pose.yaw().unwrap_or_else(|_| {
        let q = pose.orientation;
        (2.0 * (q.w * q.z + q.x * q.y)).atan2(1.0 - 2.0 * (q.y * q.y + q.z * q.z))
    });
    NavGoal { x: pose.position.x, y: pose.position.y, yaw }
}

/// Text form of a status used on the bridge log topic: `status <name> [reason]`.
pub fn status_log_line(status: NavStatus) -> String {
    let v = serde_json::to_value(status).expect("status serializes");
    let name = v["status"].as_str().unwrap_or_default().to_string();
    match v.get("reason").and_then(|r| r.as_str()) {
        Some(reason) => format!("status {name} {reason}"),
        None => format!("status {name}"),
    }
}

/// Inverse of [`status_log_line`]; `None` for other log lines.
pub fn parse_status_log(line: &str) -> Option<NavStatus> {
    let mut parts = line.split_whitespace();
    if parts.next()? != "status" {
        return None;
    }
    let name = parts.next()?;
    let value = match parts.next() {
        Some(reason) => serde_json::json!({ "status": name, "reason": reason }),
        None => serde_json::json!({ "status": name }),
    };
    serde_json::from_value(value).ok()
}
