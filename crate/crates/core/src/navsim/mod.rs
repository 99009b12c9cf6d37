//! Differential-drive robot simulation on an occupancy grid.
//!
//! Planning is 8-connected A* over an inflated grid; following is a
//! rotate-then-drive controller on unicycle kinematics. [`check_stage`]
//! decides whether a final pose counts as inside an experiment area.

mod follow;
mod grid;
mod plan;
mod stage;

pub use follow::{FailReason, NavConfig, NavGoal, NavStatus, Navigator, RobotState};
pub use grid::{GridError, OccupancyGrid};
pub use plan::{path_length, plan, PlanError};
pub use stage::{check_stage, footprint_corners, Stage, StageCheck, StageError, DEFAULT_HEADING_TOLERANCE};
