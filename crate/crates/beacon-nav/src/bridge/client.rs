//! Robot-side peer of the endpoint, used by the stand-alone robot process and tests.

use std::net::SocketAddr;

use beacon_nav_core::geometry::Pose;
use futures::{SinkExt, StreamExt};
use tokio::net::TcpStream;
use tokio_util::codec::Framed;

use super::frame::{Frame, FrameCodec, FrameError};
use super::msg::{self, MsgError, TOPIC_GOAL_POSE, TOPIC_LOG, TOPIC_ROBOT_POSE};

#[derive(Debug, thiserror::Error)]
pub enum LinkError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Msg(#[from] MsgError),
}

pub struct RobotLink {
    framed: Framed<TcpStream, FrameCodec>,
}

impl RobotLink {
    pub async fn connect(addr: SocketAddr) -> Result<Self, LinkError> {
        let stream = TcpStream::connect(addr).await?;
        stream.set_nodelay(true)?;
        Ok(Self { framed: Framed::new(stream, FrameCodec) })
    }

    pub async fn send_pose(&mut self, pose: &Pose) -> Result<(), LinkError> {
        let payload = msg::encode_pose_msg(pose)?;
        Ok(self.framed.send(Frame::new(TOPIC_ROBOT_POSE, payload)).await?)
    }

    pub async fn send_log(&mut self, text: &str) -> Result<(), LinkError> {
        Ok(self.framed.send(Frame::new(TOPIC_LOG, text.as_bytes())).await?)
    }

    pub async fn send_frame(&mut self, frame: Frame) -> Result<(), LinkError> {
        Ok(self.framed.send(frame).await?)
    }

    /// Next frame from the endpoint, or `None` once the connection closes.
    pub async fn next_frame(&mut self) -> Result<Option<Frame>, LinkError> {
        Ok(self.framed.next().await.transpose()?)
    }

    /// Waits for the next goal, skipping other topics.
    pub async fn next_goal(&mut self) -> Result<Option<Pose>, LinkError> {
        while let Some(frame) = self.next_frame().await? {
            if frame.topic == TOPIC_GOAL_POSE {
                return Ok(Some(msg::decode_pose_msg(&frame.payload)?));
            }
        }
        Ok(None)
    }
}
