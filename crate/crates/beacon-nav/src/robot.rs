//! Stand-alone simulated robot that connects to the bridge as the robot-side
//! peer: it navigates to received goals and publishes its pose and status.

use std::net::SocketAddr;
use std::time::Duration;

use beacon_nav_core::geometry::Pose;
use tokio_util::sync::CancellationToken;

use crate::bridge::{LinkError, RobotLink};
use crate::sim::{status_log_line, SimRobot};

const FINAL_POSE_GAP: Duration = Duration::from_millis(30);

#[derive(Debug, Clone, Copy)]
pub struct RobotConfig {
    pub endpoint: SocketAddr,
    /// Simulation steps per second.
    pub tick_hz: f64,
    /// Pose messages per second.
    pub pose_hz: f64,
    pub reconnect_delay: Duration,
}

/// Runs until `cancel` fires, reconnecting whenever the link drops.
pub async fn run_robot(mut sim: SimRobot, config: RobotConfig, cancel: CancellationToken) {
    while !cancel.is_cancelled() {
        match RobotLink::connect(config.endpoint).await {
            Ok(link) => {
                tracing::info!("connected to {}", config.endpoint);
                if let Err(e) = drive(&mut sim, link, &config, &cancel).await {
                    tracing::warn!("link to {} lost: {e}", config.endpoint);
                }
            }
            Err(e) => tracing::debug!("connect to {} failed: {e}", config.endpoint),
        }
        tokio::select! {
            _ = cancel.cancelled() => break,
            _ = tokio::time::sleep(config.reconnect_delay) => {}
        }
    }
}

async fn drive(
    sim: &mut SimRobot,
    mut link: RobotLink,
    config: &RobotConfig,
    cancel: &CancellationToken,
) -> Result<(), LinkError> {
    let mut ticker = tokio::time::interval(Duration::from_secs_f64(1.0 / config.tick_hz));
    ticker.set_missed_tick_behavior(tokio::time::MissedTickBehavior::Delay);
    let pose_every = (config.tick_hz / config.pose_hz).round().max(1.0) as u64;
    let mut ticks = 0u64;
    loop {
        tokio::select! {
            _ = cancel.cancelled() => return Ok(()),
            goal = link.next_goal() => {
                let Some(goal) = goal? else { return Ok(()) };
                let status = sim.dispatch(crate::sim::goal_from_pose(&goal));
                link.send_log(&status_log_line(status)).await?;
            }
            _ = ticker.tick() => {
                ticks += 1;
                let changed = sim.step();
                if ticks.is_multiple_of(pose_every) {
                    let r = sim.robot();
                    link.send_pose(&Pose::planar(r.x, r.y, r.yaw)).await?;
                }
                if let Some(status) = changed {
                    if status.is_terminal() {
                        // the endpoint rate-limits poses; make sure the final one gets through
                        tokio::time::sleep(FINAL_POSE_GAP).await;
                    }
                    let r = sim.robot();
                    link.send_pose(&Pose::planar(r.x, r.y, r.yaw)).await?;
                    link.send_log(&status_log_line(status)).await?;
                }
            }
        }
    }
}
