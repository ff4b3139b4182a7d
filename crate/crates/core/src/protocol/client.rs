use std::io::{self, BufReader, BufWriter, Read, Write};
use std::net::{TcpStream, ToSocketAddrs};

use serde_json::{json, Value};
use thiserror::Error;

use super::{decode_frame, read_message, write_message, FrameMeta, Message, ProtocolError, Tag};
use super::PROTOCOL_VERSION;
use crate::action::Action;
use crate::config::{EnvConfig, EnvId};
use crate::engine::Info;
use crate::render::Frame;

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("server error: {0}")]
    Server(String),
    #[error("unexpected reply tag {0}")]
    UnexpectedReply(u8),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

impl From<io::Error> for ClientError {
    fn from(e: io::Error) -> Self {
        ClientError::Protocol(ProtocolError::Io(e))
    }
}

/// A decoded frame reply.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub frame: Frame,
    pub checksum: u64,
    pub reward: f64,
    pub done: bool,
    pub step: u64,
    pub info: Info,
}

impl From<(FrameMeta, Frame)> for Observation {
    fn from((m, frame): (FrameMeta, Frame)) -> Self {
        Observation { frame, checksum: m.checksum, reward: m.reward, done: m.done, step: m.step, info: m.info }
    }
}

/// Blocking protocol client over any byte stream.
pub struct Client<R: Read = BufReader<TcpStream>, W: Write = BufWriter<TcpStream>> {
    reader: R,
    writer: W,
    engine: String,
}

impl Client {
    /// Connects over TCP and performs the hello exchange.
    pub fn connect(addr: impl ToSocketAddrs) -> Result<Client, ClientError> {
        let stream = TcpStream::connect(addr)?;
        stream.set_nodelay(true)?;
        let read_half = stream.try_clone()?;
        Client::handshake(BufReader::new(read_half), BufWriter::new(stream))
    }
}

impl<R: Read, W: Write> Client<R, W> {
    pub fn handshake(reader: R, writer: W) -> Result<Self, ClientError> {
        let mut c = Client { reader, writer, engine: String::new() };
        let reply = c.request(Tag::Hello, &json!({ "version": PROTOCOL_VERSION }))?;
        c.engine = reply["engine"].as_str().unwrap_or_default().to_string();
        Ok(c)
    }

    /// Engine version reported in the hello reply.
    pub fn engine_version(&self) -> &str {
        &self.engine
    }

    /// Sends one raw envelope and returns the raw reply.
    pub fn exchange(&mut self, msg: &Message) -> Result<Message, ClientError> {
        write_message(&mut self.writer, msg)?;
        Ok(read_message(&mut self.reader)?)
    }

    fn call(&mut self, tag: Tag, body: &Value) -> Result<Message, ClientError> {
        let reply = self.exchange(&Message::json(tag, body))?;
        match reply.kind() {
            Some(Tag::Error) => {
                let v = reply.body_json()?;
                Err(ClientError::Server(v["message"].as_str().unwrap_or("unknown error").to_string()))
            }
            Some(t) if t == tag => Ok(reply),
            _ => Err(ClientError::UnexpectedReply(reply.tag)),
        }
    }

    fn request(&mut self, tag: Tag, body: &Value) -> Result<Value, ClientError> {
        Ok(self.call(tag, body)?.body_json()?)
    }

    fn frame(&mut self, tag: Tag, body: &Value) -> Result<Observation, ClientError> {
        let reply = self.call(tag, body)?;
        Ok(decode_frame(&reply.body)?.into())
    }

    pub fn reset(&mut self, env: EnvId, seed: u64, config: Option<&EnvConfig>) -> Result<Observation, ClientError> {
        let mut body = json!({ "env": env.name(), "seed": seed });
        if let Some(c) = config {
            body["config"] = c.to_value();
        }
        self.frame(Tag::Reset, &body)
    }

    pub fn step(&mut self, action: Action) -> Result<Observation, ClientError> {
        self.step_byte(action.to_byte())
    }

    pub fn step_byte(&mut self, action: u8) -> Result<Observation, ClientError> {
        self.frame(Tag::Step, &json!({ "action": action }))
    }

    pub fn ground_truth(&mut self) -> Result<Observation, ClientError> {
        self.frame(Tag::GroundTruth, &json!({}))
    }

    /// Live episode summary.
    pub fn info(&mut self) -> Result<Value, ClientError> {
        self.request(Tag::Info, &json!({}))
    }

    /// Defaults of an environment.
    pub fn env_info(&mut self, env: EnvId) -> Result<Value, ClientError> {
        self.request(Tag::Info, &json!({ "env": env.name() }))
    }

    pub fn bye(mut self) -> Result<(), ClientError> {
        self.request(Tag::Bye, &json!({}))?;
        Ok(())
    }
}
