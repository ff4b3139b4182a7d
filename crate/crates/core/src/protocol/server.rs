use std::io::{self, BufReader, BufWriter, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};

use serde_json::{json, Value};

use super::{encode_frame, read_message, write_message, FrameMeta, Message, ProtocolError, Tag};
use super::{ENGINE_VERSION, PROTOCOL_VERSION};
use crate::action::Action;
use crate::config::{EnvConfig, EnvId};
use crate::engine::{EpisodeState, Info};
use crate::error::EngineError;
use crate::render::Frame;

/// Per-connection state: at most one live episode.
#[derive(Debug, Default)]
struct Session {
    greeted: bool,
    episode: Option<EpisodeState>,
}

type Reply = Result<Message, String>;

impl Session {
    /// Answers one request. The flag asks the caller to close afterwards.
    fn handle(&mut self, msg: &Message) -> (Message, bool) {
        let reply = match msg.kind() {
            None => Err(format!("unknown message tag {}", msg.tag)),
            Some(Tag::Hello) => self.hello(msg),
            Some(Tag::Bye) => return (Message::json(Tag::Bye, &json!({})), true),
            Some(Tag::Error) => Err("clients may not send error messages".into()),
            Some(_) if !self.greeted => Err("hello required before other messages".into()),
            Some(Tag::Reset) => self.reset(msg),
            Some(Tag::Step) => self.step(msg),
            Some(Tag::GroundTruth) => self.ground_truth(),
            Some(Tag::Info) => self.info(msg),
        };
        (reply.unwrap_or_else(Message::error), false)
    }

    fn hello(&mut self, msg: &Message) -> Reply {
        let body = msg.body_json().map_err(|e| e.to_string())?;
        let requested = body.get("version").and_then(Value::as_u64).unwrap_or(PROTOCOL_VERSION as u64);
        if requested < PROTOCOL_VERSION as u64 {
            return Err(format!("protocol version {requested} unsupported; server speaks {PROTOCOL_VERSION}"));
        }
        self.greeted = true;
        Ok(Message::json(Tag::Hello, &json!({ "version": PROTOCOL_VERSION, "engine": ENGINE_VERSION })))
    }

    fn reset(&mut self, msg: &Message) -> Reply {
        let body = msg.body_json().map_err(|e| e.to_string())?;
        let env: EnvId = body["env"].as_str().ok_or("reset needs an `env` string")?.parse().map_err(err)?;
        let seed = body["seed"].as_u64().ok_or("reset needs an unsigned `seed`")?;
        let config = match body.get("config") {
            None | Some(Value::Null) => EnvConfig::defaults(env),
            Some(v) => EnvConfig::from_value(env, v).map_err(err)?,
        };
        self.episode = None;
        let (state, frame) = EpisodeState::reset(env, config, seed).map_err(err)?;
        let meta = meta(&frame, 0.0, false, 0, state.info());
        self.episode = Some(state);
        Ok(Message::new(Tag::Reset, encode_frame(&meta, &frame)))
    }

    fn step(&mut self, msg: &Message) -> Reply {
        let body = msg.body_json().map_err(|e| e.to_string())?;
        let state = self.episode.as_mut().ok_or("no active episode; reset first")?;
        let byte = body["action"].as_u64().filter(|&b| b <= u8::MAX as u64).ok_or("step needs an `action` byte")?;
        let action = Action::from_byte(byte as u8, state.action_space()).map_err(err)?;
        let r = state.step(action).map_err(err)?;
        let meta = meta(&r.observation, r.reward, r.done, state.steps(), r.info);
        Ok(Message::new(Tag::Step, encode_frame(&meta, &r.observation)))
    }

    fn ground_truth(&self) -> Reply {
        let state = self.episode.as_ref().ok_or("no active episode; reset first")?;
        let frame = state.render_ground_truth();
        let meta = meta(&frame, 0.0, state.is_done(), state.steps(), state.info());
        Ok(Message::new(Tag::GroundTruth, encode_frame(&meta, &frame)))
    }

    fn info(&self, msg: &Message) -> Reply {
        let body = msg.body_json().map_err(|e| e.to_string())?;
        let v = if let Some(name) = body.get("env").and_then(Value::as_str) {
            let env: EnvId = name.parse().map_err(err)?;
            json!({
                "env": env.name(),
                "action_space": env.action_space().name(),
                "config": EnvConfig::defaults(env).to_value(),
            })
        } else {
            let s = self.episode.as_ref().ok_or("no active episode; pass `env` for defaults")?;
            json!({
                "env": s.env().name(),
                "action_space": s.action_space().name(),
                "seed": s.seed(),
                "steps": s.steps(),
                "done": s.is_done(),
                "total_reward": s.total_reward(),
                "info": s.info(),
                "config": s.config().to_value(),
            })
        };
        Ok(Message::json(Tag::Info, &v))
    }
}

fn err(e: EngineError) -> String {
    e.to_string()
}

fn meta(frame: &Frame, reward: f64, done: bool, step: u64, info: Info) -> FrameMeta {
    FrameMeta { checksum: frame.checksum(), reward, done, step, info }
}

/// Serves one session over any byte stream until bye or end of input.
pub fn serve_stream(mut r: impl Read, mut w: impl Write) -> io::Result<()> {
    let mut session = Session::default();
    loop {
        let msg = match read_message(&mut r) {
            Ok(m) => m,
            Err(ProtocolError::Closed) => return Ok(()),
            Err(ProtocolError::Empty) => {
                write_message(&mut w, &Message::error("empty envelope"))?;
                continue;
            }
            Err(ProtocolError::Io(e)) => return Err(e),
            Err(e) => {
                // The stream position is lost; report and hang up.
                let _ = write_message(&mut w, &Message::error(e.to_string()));
                return Ok(());
            }
        };
        let (reply, close) = session.handle(&msg);
        write_message(&mut w, &reply)?;
        if close {
            return Ok(());
        }
    }
}

/// TCP listener with one thread per session.
#[derive(Debug)]
pub struct Server {
    listener: TcpListener,
    max_sessions: usize,
    active: Arc<AtomicUsize>,
    stop: Arc<AtomicBool>,
}

/// Stops a running [`Server`] from another thread.
#[derive(Debug, Clone)]
pub struct ServerHandle {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
}

impl ServerHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn shutdown(&self) {
        self.stop.store(true, Ordering::SeqCst);
        // Wake the accept loop.
        let _ = TcpStream::connect(self.addr);
    }
}

struct SlotGuard(Arc<AtomicUsize>);

impl Drop for SlotGuard {
    fn drop(&mut self) {
        self.0.fetch_sub(1, Ordering::SeqCst);
    }
}

impl Server {
    pub fn bind(addr: impl ToSocketAddrs, max_sessions: usize) -> io::Result<Server> {
        Ok(Server {
            listener: TcpListener::bind(addr)?,
            max_sessions: max_sessions.max(1),
            active: Arc::new(AtomicUsize::new(0)),
            stop: Arc::new(AtomicBool::new(false)),
        })
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    pub fn handle(&self) -> io::Result<ServerHandle> {
        Ok(ServerHandle { addr: self.local_addr()?, stop: self.stop.clone() })
    }

    /// Accepts connections until [`ServerHandle::shutdown`]. Sessions still
    /// open at shutdown run to completion on their own threads.
    pub fn run(self) -> io::Result<()> {
        for stream in self.listener.incoming() {
            if self.stop.load(Ordering::SeqCst) {
                break;
            }
            let stream = match stream {
                Ok(s) => s,
                Err(_) => continue,
            };
            if self.active.fetch_add(1, Ordering::SeqCst) >= self.max_sessions {
                self.active.fetch_sub(1, Ordering::SeqCst);
                let mut s = stream;
                let _ = write_message(&mut s, &Message::error("server busy: session limit reached"));
                continue;
            }
            let guard = SlotGuard(self.active.clone());
            thread::spawn(move || {
                let _guard = guard;
                let _ = stream.set_nodelay(true);
                let Ok(read_half) = stream.try_clone() else { return };
                let _ = serve_stream(BufReader::new(read_half), BufWriter::new(stream));
            });
        }
        Ok(())
    }

    /// Runs the accept loop on a background thread.
    pub fn spawn(self) -> io::Result<(ServerHandle, JoinHandle<io::Result<()>>)> {
        let handle = self.handle()?;
        Ok((handle, thread::spawn(move || self.run())))
    }
}
