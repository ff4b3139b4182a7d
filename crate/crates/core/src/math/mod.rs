//! Numeric kit for the training-side formulas: advantage estimation, PPO
//! losses, padding masks, sequence chunking, episodic-memory windows and
//! evaluation statistics. Everything is a pure function over slices.

mod batching;
mod gae;
mod loss;
mod memory;
mod stats;

pub use batching::{chunk_episode, masked_mean, ChunkedEpisode, Sequence};
pub use gae::{gae, normalize_advantages, Gae};
pub use loss::{
    bce_reconstruction, combined_loss, entropy_multidiscrete, ppo_clip_loss, value_loss, LossParts, LossWeights,
    TrainingBatch,
};
pub use memory::{memory_window, positional_encoding, strictly_lower_triangular, EpisodicMemory, MemoryWindow};
pub use stats::{iqm, stratified_bootstrap_ci};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MathError {
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("non-finite input in {0}")]
    NonFinite(&'static str),
    #[error("mask must contain at least one 1")]
    EmptyMask,
    #[error("mask values must be 0 or 1")]
    InvalidMask,
    #[error("probabilities do not sum to 1 (got {0})")]
    Unnormalized(f64),
    #[error("value outside [0, 1] in {0}")]
    OutOfUnitRange(&'static str),
    #[error("dimension must be even, got {0}")]
    OddDimension(usize),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type MathResult<T> = std::result::Result<T, MathError>;

pub(crate) fn check_len(what: &str, expected: usize, got: usize) -> MathResult<()> {
    if expected == got {
        Ok(())
    } else {
        Err(MathError::LengthMismatch(format!("{what}: expected {expected}, got {got}")))
    }
}

pub(crate) fn check_finite(what: &'static str, xs: &[f64]) -> MathResult<()> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(MathError::NonFinite(what))
    }
}
