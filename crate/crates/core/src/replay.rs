//! Episode recordings and their verification by re-simulation.
//!
//! Layout (all integers big-endian):
//!
//! ```text
//! magic        4 bytes  "MGRP"
//! version      u16      1
//! env id       u8 length + UTF-8 bytes
//! seed         u64
//! config       u32 length + JSON bytes (full parameter set)
//! initial      u64      checksum of the reset observation
//! count        u64      number of step records
//! records      count x 18 bytes:
//!                action u8, flags u8 (bit 0 = done),
//!                reward f64 bits u64, observation checksum u64
//! footer       steps u64, cumulative reward f64 bits u64, final checksum u64
//! ```

use std::path::Path;

use thiserror::Error;

use crate::action::Action;
use crate::config::{EnvConfig, EnvId};
use crate::engine::{EpisodeState, StepResult};
use crate::error::EngineError;
use crate::policy::Policy;
use crate::render::Frame;

pub const MAGIC: &[u8; 4] = b"MGRP";
pub const VERSION: u16 = 1;
const RECORD_BYTES: usize = 18;

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("not a replay file (bad magic)")]
    BadMagic,
    #[error("unsupported replay version {0} (expected {VERSION})")]
    UnsupportedVersion(u16),
    #[error("replay truncated at byte {0}")]
    Truncated(usize),
    #[error("{0} unexpected trailing bytes")]
    TrailingBytes(usize),
    #[error("malformed header: {0}")]
    Header(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub action: u8,
    pub done: bool,
    pub reward: f64,
    pub checksum: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Footer {
    pub steps: u64,
    pub total_reward: f64,
    pub final_checksum: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayLog {
    pub env: EnvId,
    pub seed: u64,
    pub config: EnvConfig,
    pub initial_checksum: u64,
    pub records: Vec<StepRecord>,
    pub footer: Footer,
}

/// Outcome of re-simulating a log.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Match { steps: u64, final_checksum: u64 },
    /// `step` is the 1-based step that diverged; 0 is the reset observation.
    Mismatch { step: u64, reason: String },
}

impl Verdict {
    pub fn is_match(&self) -> bool {
        matches!(self, Verdict::Match { .. })
    }
}

/// Collects step records while an episode runs.
#[derive(Debug, Clone)]
pub struct Recorder {
    env: EnvId,
    seed: u64,
    config: EnvConfig,
    initial_checksum: u64,
    records: Vec<StepRecord>,
    total_reward: f64,
    last_checksum: u64,
}

impl Recorder {
    pub fn new(state: &EpisodeState, initial: &Frame) -> Self {
        let checksum = initial.checksum();
        Self {
            env: state.env(),
            seed: state.seed(),
            config: state.config().clone(),
            initial_checksum: checksum,
            records: Vec::new(),
            total_reward: 0.0,
            last_checksum: checksum,
        }
    }

    pub fn record(&mut self, action: Action, result: &StepResult) {
        let checksum = result.observation.checksum();
        self.records.push(StepRecord { action: action.to_byte(), done: result.done, reward: result.reward, checksum });
        self.total_reward += result.reward;
        self.last_checksum = checksum;
    }

    pub fn finish(self) -> ReplayLog {
        let footer = Footer {
            steps: self.records.len() as u64,
            total_reward: self.total_reward,
            final_checksum: self.last_checksum,
        };
        ReplayLog {
            env: self.env,
            seed: self.seed,
            config: self.config,
            initial_checksum: self.initial_checksum,
            records: self.records,
            footer,
        }
    }
}

/// Runs `policy` for up to `max_steps` (or until done) and records it.
pub fn record_episode(
    env: EnvId,
    config: EnvConfig,
    seed: u64,
    policy: &mut dyn Policy,
    max_steps: u64,
) -> Result<ReplayLog, EngineError> {
    let (mut state, frame) = EpisodeState::reset(env, config, seed)?;
    let mut rec = Recorder::new(&state, &frame);
    while !state.is_done() && state.steps() < max_steps {
        let action = policy.act(&state);
        let result = state.step(action)?;
        rec.record(action, &result);
    }
    Ok(rec.finish())
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], ReplayError> {
        if self.data.len() - self.pos < n {
            return Err(ReplayError::Truncated(self.data.len()));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, ReplayError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, ReplayError> {
        Ok(u16::from_be_bytes(self.take(2)?.try_into().expect("2 bytes")))
    }

    fn u32(&mut self) -> Result<u32, ReplayError> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64, ReplayError> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

impl ReplayLog {
    pub fn encode(&self) -> Vec<u8> {
        let name = self.env.name().as_bytes();
        let config = self.config.to_json();
        let mut out = Vec::with_capacity(64 + config.len() + self.records.len() * RECORD_BYTES);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_be_bytes());
        out.push(name.len() as u8);
        out.extend_from_slice(name);
        out.extend_from_slice(&self.seed.to_be_bytes());
        out.extend_from_slice(&(config.len() as u32).to_be_bytes());
        out.extend_from_slice(config.as_bytes());
        out.extend_from_slice(&self.initial_checksum.to_be_bytes());
        out.extend_from_slice(&(self.records.len() as u64).to_be_bytes());
        for r in &self.records {
            out.push(r.action);
            out.push(r.done as u8);
            out.extend_from_slice(&r.reward.to_bits().to_be_bytes());
            out.extend_from_slice(&r.checksum.to_be_bytes());
        }
        out.extend_from_slice(&self.footer.steps.to_be_bytes());
        out.extend_from_slice(&self.footer.total_reward.to_bits().to_be_bytes());
        out.extend_from_slice(&self.footer.final_checksum.to_be_bytes());
        out
    }

    pub fn decode(data: &[u8]) -> Result<ReplayLog, ReplayError> {
        let mut r = Reader { data, pos: 0 };
        if data.len() < 4 || r.take(4)? != MAGIC {
            return Err(ReplayError::BadMagic);
        }
        let version = r.u16()?;
        if version != VERSION {
            return Err(ReplayError::UnsupportedVersion(version));
        }
        let len = r.u8()? as usize;
        let name = std::str::from_utf8(r.take(len)?).map_err(|e| ReplayError::Header(e.to_string()))?;
        let env: EnvId = name.parse()?;
        let seed = r.u64()?;
        let len = r.u32()? as usize;
        let text = std::str::from_utf8(r.take(len)?).map_err(|e| ReplayError::Header(e.to_string()))?;
        let config = EnvConfig::from_json(env, text)?;
        let initial_checksum = r.u64()?;
        let count = r.u64()?;
        let remaining = data.len() - r.pos;
        if (remaining as u64) < count.saturating_mul(RECORD_BYTES as u64) {
            return Err(ReplayError::Truncated(data.len()));
        }
        let mut records = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let action = r.u8()?;
            let flags = r.u8()?;
            if flags > 1 {
                return Err(ReplayError::Header(format!("invalid record flags {flags:#x}")));
            }
            let reward = f64::from_bits(r.u64()?);
            let checksum = r.u64()?;
            records.push(StepRecord { action, done: flags == 1, reward, checksum });
        }
        let footer = Footer { steps: r.u64()?, total_reward: f64::from_bits(r.u64()?), final_checksum: r.u64()? };
        if r.pos != data.len() {
            return Err(ReplayError::TrailingBytes(data.len() - r.pos));
        }
        Ok(ReplayLog { env, seed, config, initial_checksum, records, footer })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), ReplayError> {
        std::fs::write(path, self.encode())?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<ReplayLog, ReplayError> {
        Self::decode(&std::fs::read(path)?)
    }

    /// Re-simulates the log and reports the first divergence.
    pub fn verify(&self) -> Verdict {
        let mismatch = |step: u64, reason: String| Verdict::Mismatch { step, reason };
        let (mut state, frame) = match EpisodeState::reset(self.env, self.config.clone(), self.seed) {
            Ok(x) => x,
            Err(e) => return mismatch(0, e.to_string()),
        };
        if frame.checksum() != self.initial_checksum {
            return mismatch(0, "reset observation checksum differs".into());
        }
        let mut total = 0.0;
        let mut last = frame.checksum();
        for (i, rec) in self.records.iter().enumerate() {
            let step = i as u64 + 1;
            let result = Action::from_byte(rec.action, state.action_space()).and_then(|a| state.step(a));
            let result = match result {
                Ok(r) => r,
                Err(e) => return mismatch(step, e.to_string()),
            };
            let checksum = result.observation.checksum();
            if checksum != rec.checksum {
                return mismatch(step, format!("observation checksum {checksum:016x} != {:016x}", rec.checksum));
            }
            if result.reward.to_bits() != rec.reward.to_bits() {
                return mismatch(step, format!("reward {} != {}", result.reward, rec.reward));
            }
            if result.done != rec.done {
                return mismatch(step, format!("done {} != {}", result.done, rec.done));
            }
            total += result.reward;
            last = checksum;
        }
        let steps = self.records.len() as u64;
        if self.footer.steps != steps {
            return mismatch(steps, format!("footer step count {} != {steps}", self.footer.steps));
        }
        if self.footer.total_reward.to_bits() != total.to_bits() {
            return mismatch(steps, format!("footer reward {} != {total}", self.footer.total_reward));
        }
        if self.footer.final_checksum != last {
            return mismatch(steps, "footer checksum differs".into());
        }
        Verdict::Match { steps, final_checksum: last }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::RandomPolicy;

    fn sample() -> ReplayLog {
        let env = EnvId::MysteryPath;
        record_episode(env, EnvConfig::defaults(env), 3, &mut RandomPolicy::new(1), 40).unwrap()
    }

    #[test]
    fn round_trip_and_verify() {
        let log = sample();
        let bytes = log.encode();
        let back = ReplayLog::decode(&bytes).unwrap();
        assert_eq!(back, log);
        assert!(back.verify().is_match());
    }

    #[test]
    fn rejects_corruption() {
        let bytes = sample().encode();
        assert!(matches!(ReplayLog::decode(&bytes[..bytes.len() - 1]), Err(ReplayError::Truncated(_))));
        let mut v = bytes.clone();
        v[5] = 9;
        assert!(matches!(ReplayLog::decode(&v), Err(ReplayError::UnsupportedVersion(9))));
        let mut v = bytes.clone();
        v[0] = b'X';
        assert!(matches!(ReplayLog::decode(&v), Err(ReplayError::BadMagic)));
        let mut v = bytes;
        v.push(0);
        assert!(matches!(ReplayLog::decode(&v), Err(ReplayError::TrailingBytes(1))));
    }

    #[test]
    fn mutated_action_diverges_at_that_step() {
        let mut log = sample();
        // Continuous Mystery Path: a different action always moves the agent
        // somewhere else unless it is already falling or pinned at a border.
        let k = 0;
        log.records[k].action = if log.records[k].action == 4 { 5 } else { 4 };
        match log.verify() {
            Verdict::Mismatch { step, .. } => assert_eq!(step, k as u64 + 1),
            v => panic!("{v:?}"),
        }
    }
}
