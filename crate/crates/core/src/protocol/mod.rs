//! Length-prefixed wire protocol exposing episodes to external trainers.
//!
//! Every message is a 4-byte big-endian length (tag + body), a one-byte tag
//! and a body. Control bodies are JSON. Replies that carry an observation use
//! a frame body:
//!
//! ```text
//! u32 BE   metadata length
//! bytes    metadata JSON ({"checksum", "reward", "done", "step", "info"})
//! u8       compression flag (0 = raw)
//! bytes    84*84*3 RGB, row-major
//! ```
//!
//! | tag | client sends                          | server replies              |
//! |-----|---------------------------------------|-----------------------------|
//! | 1   | hello `{"version"}`                   | hello `{"version","engine"}`|
//! | 2   | reset `{"env","seed","config"?}`      | reset, frame body           |
//! | 3   | step `{"action"}`                     | step, frame body            |
//! | 4   | ground-truth `{}`                     | ground-truth, frame body    |
//! | 5   | info `{"env"?}`                       | info JSON                   |
//! | 7   | bye `{}`                              | bye `{}`, then close        |
//!
//! Failures are answered with tag 6 `{"message"}`; the session stays open
//! unless the envelope itself was unreadable.

mod client;
mod server;

use std::io::{self, Read, Write};

use serde_json::Value;
use thiserror::Error;

use crate::engine::Info;
use crate::render::{fnv1a64, Frame, FRAME_BYTES};

pub use client::{Client, ClientError, Observation};
pub use server::{serve_stream, Server, ServerHandle};

pub const PROTOCOL_VERSION: u32 = 1;
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Largest accepted envelope, tag included.
pub const MAX_MESSAGE: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Tag {
    Hello = 1,
    Reset = 2,
    Step = 3,
    GroundTruth = 4,
    Info = 5,
    Error = 6,
    Bye = 7,
}

impl Tag {
    pub fn from_byte(b: u8) -> Option<Tag> {
        Some(match b {
            1 => Tag::Hello,
            2 => Tag::Reset,
            3 => Tag::Step,
            4 => Tag::GroundTruth,
            5 => Tag::Info,
            6 => Tag::Error,
            7 => Tag::Bye,
            _ => return None,
        })
    }
}

/// One envelope with its raw tag byte, which may be unknown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub tag: u8,
    pub body: Vec<u8>,
}

impl Message {
    pub fn new(tag: Tag, body: Vec<u8>) -> Self {
        Self { tag: tag as u8, body }
    }

    pub fn json(tag: Tag, value: &Value) -> Self {
        Self::new(tag, serde_json::to_vec(value).expect("JSON values serialize"))
    }

    pub fn error(message: impl Into<String>) -> Self {
        Self::json(Tag::Error, &serde_json::json!({ "message": message.into() }))
    }

    pub fn kind(&self) -> Option<Tag> {
        Tag::from_byte(self.tag)
    }

    pub fn body_json(&self) -> Result<Value, ProtocolError> {
        if self.body.is_empty() {
            return Ok(Value::Object(Default::default()));
        }
        serde_json::from_slice(&self.body).map_err(|e| ProtocolError::Malformed(e.to_string()))
    }
}

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("connection closed")]
    Closed,
    #[error("message of {0} bytes exceeds the limit")]
    TooLarge(usize),
    #[error("empty envelope")]
    Empty,
    #[error("malformed body: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn write_message(w: &mut impl Write, msg: &Message) -> io::Result<()> {
    let len = (msg.body.len() + 1) as u32;
    w.write_all(&len.to_be_bytes())?;
    w.write_all(&[msg.tag])?;
    w.write_all(&msg.body)?;
    w.flush()
}

/// Reads one envelope. A clean end of stream before the length prefix is
/// reported as [`ProtocolError::Closed`].
pub fn read_message(r: &mut impl Read) -> Result<Message, ProtocolError> {
    let mut len = [0u8; 4];
    match r.read_exact(&mut len) {
        Ok(()) => {}
        Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => return Err(ProtocolError::Closed),
        Err(e) => return Err(e.into()),
    }
    let len = u32::from_be_bytes(len) as usize;
    if len == 0 {
        return Err(ProtocolError::Empty);
    }
    if len > MAX_MESSAGE {
        return Err(ProtocolError::TooLarge(len));
    }
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    let body = buf.split_off(1);
    Ok(Message { tag: buf[0], body })
}

/// Metadata sent alongside every frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameMeta {
    pub checksum: u64,
    pub reward: f64,
    pub done: bool,
    pub step: u64,
    pub info: Info,
}

pub fn encode_frame(meta: &FrameMeta, frame: &Frame) -> Vec<u8> {
    let json = serde_json::to_vec(&serde_json::json!({
        "checksum": format!("{:016x}", meta.checksum),
        "reward": meta.reward,
        "done": meta.done,
        "step": meta.step,
        "info": meta.info,
    }))
    .expect("JSON values serialize");
    let mut out = Vec::with_capacity(5 + json.len() + FRAME_BYTES);
    out.extend_from_slice(&(json.len() as u32).to_be_bytes());
    out.extend_from_slice(&json);
    out.push(0);
    out.extend_from_slice(frame.as_bytes());
    out
}

/// Decodes a frame body and checks the transmitted checksum.
pub fn decode_frame(body: &[u8]) -> Result<(FrameMeta, Frame), ProtocolError> {
    let bad = |m: &str| ProtocolError::Malformed(m.to_string());
    if body.len() < 4 {
        return Err(bad("frame body too short"));
    }
    let n = u32::from_be_bytes(body[..4].try_into().expect("4 bytes")) as usize;
    let rest = &body[4..];
    if rest.len() != n + 1 + FRAME_BYTES {
        return Err(bad("frame body has the wrong length"));
    }
    let v: Value = serde_json::from_slice(&rest[..n]).map_err(|e| ProtocolError::Malformed(e.to_string()))?;
    if rest[n] != 0 {
        return Err(bad("compressed frames are not supported"));
    }
    let pixels = &rest[n + 1..];
    let checksum = v["checksum"]
        .as_str()
        .and_then(|s| u64::from_str_radix(s, 16).ok())
        .ok_or_else(|| bad("missing checksum"))?;
    if fnv1a64(pixels) != checksum {
        return Err(bad("frame checksum mismatch"));
    }
    let info: Info = serde_json::from_value(v["info"].clone()).map_err(|e| ProtocolError::Malformed(e.to_string()))?;
    let meta = FrameMeta {
        checksum,
        reward: v["reward"].as_f64().ok_or_else(|| bad("missing reward"))?,
        done: v["done"].as_bool().ok_or_else(|| bad("missing done"))?,
        step: v["step"].as_u64().ok_or_else(|| bad("missing step"))?,
        info,
    };
    Ok((meta, Frame::from_bytes(pixels).expect("length checked")))
}
