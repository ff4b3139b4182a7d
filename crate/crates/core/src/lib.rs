//! Deterministic headless engine for the Memory Gym environments.
//!
//! Episodes are created with [`EpisodeState::reset`] and advanced one step
//! at a time. Every episode owns its random stream, so equal seeds and
//! configs give bit-identical frames on every platform.

pub mod action;
pub mod agent;
pub mod config;
pub mod engine;
pub mod error;
pub mod math;
pub mod mathcheck;
pub mod mortar_mayhem;
pub mod mystery_path;
pub mod policy;
pub mod protocol;
pub mod replay;
pub mod render;
pub mod rng;
pub mod searing_spotlights;

pub use action::{Action, ActionGrid, ActionMultiDiscrete, ActionSpace};
pub use config::{EnvConfig, EnvId, Family};
pub use engine::{EnvState, EpisodeState, Info, StepResult};
pub use error::{EngineError, Result};
pub use render::{Frame, View, FRAME_BYTES, FRAME_HEIGHT, FRAME_WIDTH};
pub use rng::Rng;
