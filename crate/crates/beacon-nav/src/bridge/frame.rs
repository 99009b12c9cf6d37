//! Wire framing: `[u32 LE topic_len][topic][u32 LE payload_len][payload]`.

use bytes::{Buf, BufMut, BytesMut};
use tokio_util::codec::{Decoder, Encoder};

pub const MAX_TOPIC_LEN: usize = 255;
pub const MAX_PAYLOAD_LEN: usize = 16 * 1024 * 1024;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub topic: String,
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn new(topic: impl Into<String>, payload: impl Into<Vec<u8>>) -> Self {
        Self { topic: topic.into(), payload: payload.into() }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FrameError {
    #[error("topic is {0} bytes, limit is {MAX_TOPIC_LEN}")]
    TopicTooLong(usize),
    #[error("payload is {0} bytes, limit is {MAX_PAYLOAD_LEN}")]
    PayloadTooLarge(usize),
    #[error("topic is not valid UTF-8")]
    TopicNotUtf8,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Result of decoding from the front of a buffer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decoded {
    /// A full frame and the number of bytes it occupied.
    Frame(Frame, usize),
    /// The buffer holds only a prefix of a frame; nothing was consumed.
    NeedMore,
}

pub fn encode_frame(topic: &str, payload: &[u8]) -> Result<Vec<u8>, FrameError> {
    let mut out = BytesMut::new();
    encode_into(topic, payload, &mut out)?;
    Ok(out.to_vec())
}

fn encode_into(topic: &str, payload: &[u8], out: &mut BytesMut) -> Result<(), FrameError> {
    if topic.len() > MAX_TOPIC_LEN {
        return Err(FrameError::TopicTooLong(topic.len()));
    }
    if payload.len() > MAX_PAYLOAD_LEN {
        return Err(FrameError::PayloadTooLarge(payload.len()));
    }
    out.reserve(8 + topic.len() + payload.len());
    out.put_u32_le(topic.len() as u32);
    out.put_slice(topic.as_bytes());
    out.put_u32_le(payload.len() as u32);
    out.put_slice(payload);
    Ok(())
}

fn read_len(buf: &[u8], at: usize) -> Option<usize> {
    buf.get(at..at + 4).map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as usize)
}

/// Decodes one frame from the front of `buf`. Length limits are checked as
/// soon as each length field is available, so an oversized declaration is
/// rejected without waiting for its body.
pub fn decode_frame(buf: &[u8]) -> Result<Decoded, FrameError> {
    let Some(topic_len) = read_len(buf, 0) else { return Ok(Decoded::NeedMore) };
    if topic_len > MAX_TOPIC_LEN {
        return Err(FrameError::TopicTooLong(topic_len));
    }
    let Some(payload_len) = read_len(buf, 4 + topic_len) else { return Ok(Decoded::NeedMore) };
    if payload_len > MAX_PAYLOAD_LEN {
        return Err(FrameError::PayloadTooLarge(payload_len));
    }
    let start = 8 + topic_len;
    let end = start + payload_len;
    if buf.len() < end {
        return Ok(Decoded::NeedMore);
    }
    let topic = std::str::from_utf8(&buf[4..4 + topic_len]).map_err(|_| FrameError::TopicNotUtf8)?;
    Ok(Decoded::Frame(Frame::new(topic, &buf[start..end]), end))
}

/// Streaming decoder that keeps partial input between calls.
#[derive(Debug, Default)]
pub struct FrameDecoder {
    buf: BytesMut,
}

impl FrameDecoder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, bytes: &[u8]) {
        self.buf.extend_from_slice(bytes);
    }

    /// Bytes held for an incomplete frame.
    pub fn buffered(&self) -> usize {
        self.buf.len()
    }

    pub fn next_frame(&mut self) -> Result<Option<Frame>, FrameError> {
        match decode_frame(&self.buf)? {
            Decoded::Frame(frame, used) => {
                self.buf.advance(used);
                Ok(Some(frame))
            }
            Decoded::NeedMore => Ok(None),
        }
    }
}

/// Codec for use with `tokio_util::codec::Framed`.
#[derive(Debug, Default, Clone, Copy)]
pub struct FrameCodec;

impl Decoder for FrameCodec {
    type Item = Frame;
    type Error = FrameError;

    fn decode(&mut self, src: &mut BytesMut) -> Result<Option<Frame>, FrameError> {
        match decode_frame(src)? {
            Decoded::Frame(frame, used) => {
                src.advance(used);
                Ok(Some(frame))
            }
            Decoded::NeedMore => Ok(None),
        }
    }
}

impl Encoder<Frame> for FrameCodec {
    type Error = FrameError;

    fn encode(&mut self, frame: Frame, dst: &mut BytesMut) -> Result<(), FrameError> {
        encode_into(&frame.topic, &frame.payload, dst)
    }
}
