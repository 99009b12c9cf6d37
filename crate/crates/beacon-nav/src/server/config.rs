use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::PathBuf;

use beacon_nav_core::beacon::Footprint;
use beacon_nav_core::evalkit::System;
use beacon_nav_core::geometry::AnchorPose;
use beacon_nav_core::navsim::{NavConfig, RobotState};

use crate::bridge::DEFAULT_PORT;

pub const MIN_TICK_HZ: f64 = 5.0;
pub const MAX_TICK_HZ: f64 = 100.0;

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub participant: String,
    pub system: System,
    /// Trial events are appended here, one JSON object per line.
    pub event_log: PathBuf,
}

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub map_path: PathBuf,
    pub stages_path: PathBuf,
    pub db_path: PathBuf,
    pub bind_ip: IpAddr,
    /// Port 0 picks a free port.
    pub http_port: u16,
    pub bridge_port: u16,
    pub tick_hz: f64,
    pub anchor: AnchorPose,
    pub footprint: Footprint,
    pub experiment: Option<ExperimentConfig>,
    /// Send goals over the bridge to a robot peer instead of the built-in simulator.
    pub external_robot: bool,
    pub robot_start: RobotState,
    /// Simulated seconds per wall-clock second.
    pub sim_speed: f64,
    pub nav: NavConfig,
}

impl ServerConfig {
    pub fn new(map_path: impl Into<PathBuf>, stages_path: impl Into<PathBuf>, db_path: impl Into<PathBuf>) -> Self {
        Self {
            map_path: map_path.into(),
            stages_path: stages_path.into(),
            db_path: db_path.into(),
            bind_ip: IpAddr::V4(Ipv4Addr::LOCALHOST),
            http_port: 8080,
            bridge_port: DEFAULT_PORT,
            tick_hz: 20.0,
            anchor: AnchorPose::MAP_ORIGIN,
            footprint: Footprint::default(),
            experiment: None,
            external_robot: false,
            robot_start: RobotState::default(),
            sim_speed: 1.0,
            nav: NavConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.http_port != 0 && self.http_port == self.bridge_port {
            return Err(ConfigError::SamePort(self.http_port));
        }
        if !(MIN_TICK_HZ..=MAX_TICK_HZ).contains(&self.tick_hz) {
            return Err(ConfigError::TickRate(self.tick_hz));
        }
        if !(self.sim_speed > 0.0 && self.sim_speed.is_finite()) {
            return Err(ConfigError::SimSpeed(self.sim_speed));
        }
        let r = self.robot_start;
        if ![r.x, r.y, r.yaw].iter().all(|v| v.is_finite()) {
            return Err(ConfigError::RobotStart);
        }
        if let Some(exp) = &self.experiment {
            if exp.participant.trim().is_empty() {
                return Err(ConfigError::Participant);
            }
        }
        Ok(())
    }

    pub fn http_addr(&self) -> SocketAddr {
        SocketAddr::new(self.bind_ip, self.http_port)
    }

    pub fn bridge_addr(&self) -> SocketAddr {
        SocketAddr::new(self.bind_ip, self.bridge_port)
    }

    /// Simulated seconds advanced per tick.
    pub fn dt(&self) -> f64 {
        self.sim_speed / self.tick_hz
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("HTTP and bridge ports must differ (both are {0})")]
    SamePort(u16),
    #[error("tick rate {0} Hz is outside [{MIN_TICK_HZ}, {MAX_TICK_HZ}]")]
    TickRate(f64),
    #[error("simulation speed {0} must be positive and finite")]
    SimSpeed(f64),
    #[error("robot start pose must be finite")]
    RobotStart,
    #[error("experiment mode needs a participant id")]
    Participant,
}
