//! Composition root: wires the session engine, database, simulator or robot
//! bridge, and the operator HTTP API.
//!
//! Tasks and the channels between them:
//!
//! * the engine owns the session, database and experiment log and processes
//!   [`engine::Command`]s one at a time;
//! * the robot side (built-in simulator, or the bridge relay when an external
//!   robot is used) publishes [`RobotSnapshot`]s and reports finished
//!   navigations back to the engine;
//! * the HTTP server turns requests into commands and streams
//!   [`OutboundEvent`]s from a broadcast channel.

mod config;
mod engine;
mod events;
mod experiment;
mod http;

use std::net::SocketAddr;
use std::time::{Duration, Instant};

use beacon_nav_core::beacon::{BeaconError, Session};
use beacon_nav_core::navsim::{GridError, NavGoal, NavStatus, RobotState};
use tokio::net::TcpListener;
use tokio::sync::{broadcast, mpsc, watch};
use tokio::task::JoinHandle;
use tokio_util::sync::CancellationToken;

pub use config::{ConfigError, ExperimentConfig, ServerConfig, MAX_TICK_HZ, MIN_TICK_HZ};
pub use engine::{ApiError, RobotSnapshot};
pub use events::{
    BeaconView, CommandReply, ErrorBody, ExperimentView, HitBody, ModeBody, OutboundEvent, PhaseView, PointerBody,
    StateSnapshot,
};

use crate::bridge::{goal_queue, Endpoint, EndpointConfig, InboundSink, PoseSample};
use crate::formats::{self, EventLogWriter, FormatError};
use crate::sim::{parse_status_log, SimRobot};
use crate::store::{Database, StoreError};
use engine::{Command, Engine, GoalOut};
use experiment::Experiment;

const EVENT_BUFFER: usize = 1024;
const COMMAND_BUFFER: usize = 256;

#[derive(Debug, thiserror::Error)]
pub enum StartError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("map: {0}")]
    Map(FormatError),
    #[error("stages: {0}")]
    Stages(FormatError),
    #[error("experiment mode needs at least one stage")]
    NoStages,
    #[error("beacon database: {0}")]
    Store(#[from] StoreError),
    #[error("stored beacons: {0}")]
    Restore(#[from] BeaconError),
    #[error("map: {0}")]
    Grid(#[from] GridError),
    #[error("event log: {0}")]
    EventLog(FormatError),
    #[error("cannot listen for {what} on {addr}: {source}")]
    Bind { what: &'static str, addr: SocketAddr, source: std::io::Error },
}

impl StartError {
    /// Process exit code: 2 for configuration and input problems, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            StartError::Bind { .. } => 3,
            _ => 2,
        }
    }
}

/// Handle to a started server.
pub struct RunningServer {
    http_addr: SocketAddr,
    bridge_addr: SocketAddr,
    cancel: CancellationToken,
    tasks: Vec<JoinHandle<()>>,
}

impl RunningServer {
    pub fn http_addr(&self) -> SocketAddr {
        self.http_addr
    }

    pub fn bridge_addr(&self) -> SocketAddr {
        self.bridge_addr
    }

    /// Token that stops the server when cancelled.
    pub fn cancel_token(&self) -> CancellationToken {
        self.cancel.clone()
    }

    /// Stops all tasks and waits for the engine to flush its state.
    pub async fn shutdown(self) {
        self.cancel.cancel();
        self.join().await;
    }

    /// Waits until the server stops.
    pub async fn join(self) {
        for task in self.tasks {
            let _ = task.await;
        }
    }
}

/// Loads inputs, binds both ports and spawns all tasks.
pub async fn start(config: ServerConfig) -> Result<RunningServer, StartError> {
    config.validate()?;
    let map = formats::load_map(&config.map_path).map_err(StartError::Map)?;
    let stages = formats::load_stages(&config.stages_path).map_err(StartError::Stages)?;
    let db = Database::load(&config.db_path)?;
    let mut session = Session::new(config.anchor, config.footprint);
    session.restore(db.records().iter().map(|r| r.to_beacon(config.footprint)))?;
    tracing::info!("restored {} beacons from {}", db.len(), config.db_path.display());

    let experiment = match &config.experiment {
        Some(exp) => {
            if stages.is_empty() {
                return Err(StartError::NoStages);
            }
            let writer = EventLogWriter::create(&exp.event_log).map_err(StartError::EventLog)?;
            Some(Experiment::new(exp.participant.clone(), exp.system, writer, stages.clone(), config.footprint))
        }
        None => None,
    };
    let sim = if config.external_robot {
        None
    } else {
        Some(SimRobot::new(&map, &config.footprint, config.nav, config.robot_start, config.dt())?)
    };

    let http_listener = TcpListener::bind(config.http_addr()).await.map_err(|source| StartError::Bind {
        what: "HTTP",
        addr: config.http_addr(),
        source,
    })?;
    let endpoint = Endpoint::bind(config.bridge_addr(), EndpointConfig::default())
        .await
        .map_err(|source| StartError::Bind { what: "robot bridge", addr: config.bridge_addr(), source })?;
    let http_addr = http_listener.local_addr().expect("bound socket has an address");
    let bridge_addr = endpoint.local_addr().expect("bound socket has an address");

    let cancel = CancellationToken::new();
    let (events, _) = broadcast::channel(EVENT_BUFFER);
    let (command_tx, command_rx) = mpsc::channel(COMMAND_BUFFER);
    let (snapshot_tx, snapshot_rx) =
        watch::channel(RobotSnapshot { robot: config.robot_start, status: NavStatus::Idle, t: 0.0 });
    let (goal_sender, goal_rx) = goal_queue();
    let (sink, pose_rx, log_rx) = InboundSink::channel(EVENT_BUFFER);
    let mut tasks = Vec::new();

    tasks.push(tokio::spawn(endpoint.run(sink, goal_rx, cancel.clone())));

    let goals = match sim {
        Some(sim) => {
            let (tx, rx) = mpsc::unbounded_channel();
            let period = Duration::from_secs_f64(1.0 / config.tick_hz);
            let link = RobotLinkChannels {
                snapshot: snapshot_tx,
                events: events.clone(),
                engine: command_tx.clone(),
                cancel: cancel.clone(),
            };
            tasks.push(tokio::spawn(run_simulator(sim, period, rx, link)));
            drop((pose_rx, log_rx));
            GoalOut::Simulator(tx)
        }
        None => {
            let link = RobotLinkChannels {
                snapshot: snapshot_tx,
                events: events.clone(),
                engine: command_tx.clone(),
                cancel: cancel.clone(),
            };
            tasks.push(tokio::spawn(run_relay(pose_rx, log_rx, link)));
            GoalOut::Bridge(goal_sender)
        }
    };

    let engine = Engine { session, db, events: events.clone(), goals, robot: snapshot_rx, stages, experiment };
    tasks.push(tokio::spawn(engine.run(command_rx, cancel.clone())));

    let app = http::router(http::AppState { commands: command_tx, events, cancel: cancel.clone() });
    let http_cancel = cancel.clone();
    tasks.push(tokio::spawn(async move {
        let result =
            axum::serve(http_listener, app).with_graceful_shutdown(http_cancel.clone().cancelled_owned()).await;
        if let Err(e) = result {
            tracing::error!("HTTP server stopped: {e}");
            http_cancel.cancel();
        }
    }));

    tracing::info!("operator API on http://{http_addr}, robot bridge on {bridge_addr}");
    Ok(RunningServer { http_addr, bridge_addr, cancel, tasks })
}

/// Runs until interrupted (Ctrl-C or SIGTERM), then shuts down cleanly.
pub async fn serve(config: ServerConfig) -> Result<(), StartError> {
    let server = start(config).await?;
    let cancel = server.cancel_token();
    tokio::select! {
        _ = shutdown_signal() => tracing::info!("shutting down"),
        _ = cancel.cancelled() => {}
    }
    server.shutdown().await;
    Ok(())
}

async fn shutdown_signal() {
    #[cfg(unix)]
    {
        use tokio::signal::unix::{signal, SignalKind};
        let mut term = signal(SignalKind::terminate()).expect("SIGTERM handler");
        tokio::select! {
            _ = tokio::signal::ctrl_c() => {}
            _ = term.recv() => {}
        }
    }
    #[cfg(not(unix))]
    {
        let _ = tokio::signal::ctrl_c().await;
    }
}

struct RobotLinkChannels {
    snapshot: watch::Sender<RobotSnapshot>,
    events: broadcast::Sender<OutboundEvent>,
    engine: mpsc::Sender<Command>,
    cancel: CancellationToken,
}

impl RobotLinkChannels {
    async fn status_changed(&self, status: NavStatus, robot: RobotState) {
        let _ = self.events.send(OutboundEvent::NavStatusChanged { status });
        if status.is_terminal() {
            let _ = self.engine.send(Command::NavFinished { status, robot }).await;
        }
    }
}

async fn run_simulator(
    mut sim: SimRobot,
    period: Duration,
    mut goals: mpsc::UnboundedReceiver<NavGoal>,
    link: RobotLinkChannels,
) {
    let mut ticker = tokio::time::interval(period);
    ticker.set_missed_tick_behavior(tokio::time::MissedTickBehavior::Delay);
    loop {
        tokio::select! {
            _ = link.cancel.cancelled() => break,
            goal = goals.recv() => {
                let Some(goal) = goal else { break };
                let status = sim.dispatch(goal);
                link.snapshot.send_replace(RobotSnapshot { robot: sim.robot(), status, t: sim.time() });
                link.status_changed(status, sim.robot()).await;
            }
            _ = ticker.tick() => {
                let changed = sim.step();
                let robot = sim.robot();
                link.snapshot.send_replace(RobotSnapshot { robot, status: sim.status(), t: sim.time() });
                let _ = link.events.send(OutboundEvent::RobotPose { robot, t: sim.time() });
                if let Some(status) = changed {
                    link.status_changed(status, robot).await;
                }
            }
        }
    }
}

/// Mirrors an external robot: poses from the bridge become snapshots and
/// events, `status …` log lines become navigation status changes.
async fn run_relay(
    mut poses: broadcast::Receiver<PoseSample>,
    mut logs: mpsc::Receiver<String>,
    link: RobotLinkChannels,
) {
    let started = Instant::now();
    loop {
        tokio::select! {
            _ = link.cancel.cancelled() => break,
            sample = poses.recv() => match sample {
                Ok(sample) => {
                    let goal = crate::sim::goal_from_pose(&sample.pose);
                    let robot = RobotState::at(goal.x, goal.y, goal.yaw);
                    let t = sample.received.duration_since(started).as_secs_f64();
                    link.snapshot.send_modify(|s| {
                        s.robot = robot;
                        s.t = t;
                    });
                    let _ = link.events.send(OutboundEvent::RobotPose { robot, t });
                }
                Err(broadcast::error::RecvError::Lagged(_)) => {}
                Err(broadcast::error::RecvError::Closed) => break,
            },
            line = logs.recv() => {
                let Some(line) = line else { break };
                match parse_status_log(&line) {
                    Some(status) => {
                        link.snapshot.send_modify(|s| s.status = status);
                        let robot = link.snapshot.borrow().robot;
                        link.status_changed(status, robot).await;
                    }
                    None => tracing::info!("robot: {line}"),
                }
            }
        }
    }
}
