//! TCP endpoint serving a single robot-side peer.
//!
//! Goals flow out through a depth-one queue where a newer goal replaces an
//! undelivered older one. Robot poses and log lines flow in through bounded
//! channels; poses are rate limited and slow readers lose the oldest ones.

use std::net::SocketAddr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use beacon_nav_core::geometry::Pose;
use futures::{SinkExt, StreamExt};
use tokio::net::{TcpListener, TcpStream};
use tokio::sync::{broadcast, mpsc, watch};
use tokio::task::JoinHandle;
use tokio_util::codec::Framed;
use tokio_util::sync::CancellationToken;

use super::frame::{Frame, FrameCodec, FrameError};
use super::msg::{self, MsgError, TOPIC_GOAL_POSE, TOPIC_LOG, TOPIC_ROBOT_POSE};

/// A goal waiting for delivery, numbered in dispatch order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueuedGoal {
    pub seq: u64,
    pub pose: Pose,
}

/// Producer side of the newest-goal-wins queue.
#[derive(Debug)]
pub struct GoalSender {
    tx: watch::Sender<Option<QueuedGoal>>,
    next_seq: AtomicU64,
}

impl GoalSender {
    /// Queues `pose`, replacing any goal that has not been delivered yet.
    pub fn send(&self, pose: Pose) -> u64 {
        let seq = self.next_seq.fetch_add(1, Ordering::Relaxed) + 1;
        self.tx.send_replace(Some(QueuedGoal { seq, pose }));
        seq
    }

    pub fn subscribe(&self) -> watch::Receiver<Option<QueuedGoal>> {
        self.tx.subscribe()
    }
}

pub fn goal_queue() -> (GoalSender, watch::Receiver<Option<QueuedGoal>>) {
    let (tx, rx) = watch::channel(None);
    (GoalSender { tx, next_seq: AtomicU64::new(0) }, rx)
}

/// A robot pose as it arrived on the wire.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseSample {
    pub pose: Pose,
    pub received: Instant,
}

/// Where inbound robot traffic goes.
#[derive(Debug, Clone)]
pub struct InboundSink {
    pub poses: broadcast::Sender<PoseSample>,
    pub logs: mpsc::Sender<String>,
}

impl InboundSink {
    /// Creates a sink with the given buffer depth and returns its receivers.
    pub fn channel(depth: usize) -> (Self, broadcast::Receiver<PoseSample>, mpsc::Receiver<String>) {
        let (poses, pose_rx) = broadcast::channel(depth);
        let (logs, log_rx) = mpsc::channel(depth);
        (Self { poses, logs }, pose_rx, log_rx)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EndpointConfig {
    /// Upper bound on forwarded robot poses per second.
    pub max_pose_rate_hz: f64,
    /// A goal write that stalls longer than this drops the connection.
    pub write_timeout: Duration,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        Self { max_pose_rate_hz: 50.0, write_timeout: Duration::from_secs(5) }
    }
}

#[derive(Debug, thiserror::Error)]
enum ConnError {
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("topic {topic}: {source}")]
    Payload { topic: String, source: MsgError },
    #[error("goal write timed out")]
    WriteTimeout,
}

pub struct Endpoint {
    listener: TcpListener,
    config: EndpointConfig,
}

impl Endpoint {
    pub async fn bind(addr: SocketAddr, config: EndpointConfig) -> std::io::Result<Self> {
        Ok(Self { listener: TcpListener::bind(addr).await?, config })
    }

    pub fn local_addr(&self) -> std::io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    /// Accepts robot connections until `cancel` fires. While one peer is
    /// connected, further connections are closed immediately.
    pub async fn run(self, sink: InboundSink, goals: watch::Receiver<Option<QueuedGoal>>, cancel: CancellationToken) {
        let delivered = Arc::new(AtomicU64::new(0));
        let mut active: Option<JoinHandle<()>> = None;
        loop {
            let accepted = tokio::select! {
                _ = cancel.cancelled() => break,
                accepted = self.listener.accept() => accepted,
            };
            let (stream, peer) = match accepted {
                Ok(pair) => pair,
                Err(e) => {
                    tracing::warn!("bridge accept failed: {e}");
                    tokio::time::sleep(Duration::from_millis(50)).await;
                    continue;
                }
            };
            if active.as_ref().is_some_and(|h| !h.is_finished()) {
                tracing::warn!("refusing second robot connection from {peer}");
                drop(stream);
                continue;
            }
            tracing::info!("robot connected from {peer}");
            let conn = Connection {
                sink: sink.clone(),
                goals: goals.clone(),
                delivered: delivered.clone(),
                config: self.config,
                cancel: cancel.clone(),
            };
            active = Some(tokio::spawn(async move {
                match conn.serve(stream).await {
                    Ok(()) => tracing::info!("robot {peer} disconnected"),
                    Err(e) => tracing::warn!("dropping robot {peer}: {e}"),
                }
            }));
        }
        if let Some(handle) = active {
            let _ = handle.await;
        }
    }
}

/// Binds `addr` and runs the endpoint until `cancel` fires.
pub async fn endpoint_run(
    addr: SocketAddr,
    sink: InboundSink,
    goals: watch::Receiver<Option<QueuedGoal>>,
    cancel: CancellationToken,
) -> std::io::Result<()> {
    Endpoint::bind(addr, EndpointConfig::default()).await?.run(sink, goals, cancel).await;
    Ok(())
}

struct Connection {
    sink: InboundSink,
    goals: watch::Receiver<Option<QueuedGoal>>,
    delivered: Arc<AtomicU64>,
    config: EndpointConfig,
    cancel: CancellationToken,
}

impl Connection {
    async fn serve(mut self, stream: TcpStream) -> Result<(), ConnError> {
        let _ = stream.set_nodelay(true);
        let mut framed = Framed::new(stream, FrameCodec);
        let min_gap = Duration::from_secs_f64(1.0 / self.config.max_pose_rate_hz);
        let mut last_pose: Option<Instant> = None;
        let mut goals_open = true;
        loop {
            let pending = *self.goals.borrow_and_update();
            if let Some(goal) = pending.filter(|g| g.seq > self.delivered.load(Ordering::Acquire)) {
                let payload = msg::encode_pose_msg(&goal.pose)
                    .map_err(|source| ConnError::Payload { topic: TOPIC_GOAL_POSE.into(), source })?;
                let send = framed.send(Frame::new(TOPIC_GOAL_POSE, payload));
                tokio::time::timeout(self.config.write_timeout, send).await.map_err(|_| ConnError::WriteTimeout)??;
                self.delivered.fetch_max(goal.seq, Ordering::AcqRel);
            }
            tokio::select! {
                _ = self.cancel.cancelled() => return Ok(()),
                changed = self.goals.changed(), if goals_open => {
                    goals_open = changed.is_ok();
                }
                frame = framed.next() => match frame {
                    None => return Ok(()),
                    Some(frame) => self.route(frame?, min_gap, &mut last_pose)?,
                },
            }
        }
    }

    fn route(&self, frame: Frame, min_gap: Duration, last_pose: &mut Option<Instant>) -> Result<(), ConnError> {
        match frame.topic.as_str() {
            TOPIC_ROBOT_POSE => {
                let pose = msg::decode_pose_msg(&frame.payload)
                    .map_err(|source| ConnError::Payload { topic: frame.topic.clone(), source })?;
                let now = Instant::now();
                if last_pose.is_some_and(|t| now.duration_since(t) < min_gap) {
                    return Ok(());
                }
                *last_pose = Some(now);
                let _ = self.sink.poses.send(PoseSample { pose, received: now });
            }
            TOPIC_LOG => {
                let text = msg::decode_log_msg(&frame.payload)
                    .map_err(|source| ConnError::Payload { topic: frame.topic.clone(), source })?;
                if self.sink.logs.try_send(text).is_err() {
                    tracing::warn!("robot log buffer full, dropping line");
                }
            }
            other => tracing::debug!("ignoring frame on topic {other:?}"),
        }
        Ok(())
    }
}
