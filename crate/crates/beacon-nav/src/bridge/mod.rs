//! Length-framed TCP link between the server and the robot side.
//!
//! Frames carry a UTF-8 topic and a byte payload. Three topics are used:
//! `goal_pose` (server to robot) and `robot_pose` (robot to server) with a
//! 56-byte pose payload, and `log` with UTF-8 text.

mod client;
mod endpoint;
mod frame;
mod msg;

pub use client::{LinkError, RobotLink};
pub use endpoint::{
    endpoint_run, goal_queue, Endpoint, EndpointConfig, GoalSender, InboundSink, PoseSample, QueuedGoal,
};
pub use frame::{
    decode_frame, encode_frame, Decoded, Frame, FrameCodec, FrameDecoder, FrameError, MAX_PAYLOAD_LEN, MAX_TOPIC_LEN,
};
pub use msg::{
    decode_log_msg, decode_pose_msg, encode_pose_msg, MsgError, POSE_MSG_LEN, TOPIC_GOAL_POSE, TOPIC_LOG,
    TOPIC_ROBOT_POSE,
};

/// Default TCP port of the endpoint.
pub const DEFAULT_PORT: u16 = 10000;
