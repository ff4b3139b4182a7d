//! Episode lifecycle: reset, step, done-latching and dispatch to the
//! environment families.

use std::collections::BTreeMap;

use crate::action::{Action, ActionSpace};
use crate::config::{EnvConfig, EnvId, Family};
use crate::error::{EngineError, Result};
use crate::mortar_mayhem::MortarMayhem;
use crate::mystery_path::{EndlessMysteryPath, MysteryPath};
use crate::render::{Frame, Scene, View};
use crate::searing_spotlights::SearingSpotlights;

/// Scalar diagnostics attached to every step.
pub type Info = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub observation: Frame,
    pub reward: f64,
    pub done: bool,
    pub info: Info,
}

/// Outcome of one simulation step before rendering.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct Transition {
    pub reward: f64,
    pub done: bool,
}

/// Behavior every environment family implements. Actions reaching `step`
/// already match the environment's action space.
pub(crate) trait Simulation: Scene {
    fn step(&mut self, action: Action) -> Transition;
    fn info(&self) -> Info;
    fn max_step_reward(&self) -> f64;
    fn vector_observation(&self) -> Option<Vec<f32>> {
        None
    }
}

/// Simulation state of one of the environment families.
#[derive(Debug, Clone)]
pub enum EnvState {
    MortarMayhem(MortarMayhem),
    MysteryPath(MysteryPath),
    EndlessMysteryPath(EndlessMysteryPath),
    SearingSpotlights(SearingSpotlights),
}

impl EnvState {
    fn sim(&self) -> &dyn Simulation {
        match self {
            EnvState::MortarMayhem(s) => s,
            EnvState::MysteryPath(s) => s,
            EnvState::EndlessMysteryPath(s) => s,
            EnvState::SearingSpotlights(s) => s,
        }
    }

    fn sim_mut(&mut self) -> &mut dyn Simulation {
        match self {
            EnvState::MortarMayhem(s) => s,
            EnvState::MysteryPath(s) => s,
            EnvState::EndlessMysteryPath(s) => s,
            EnvState::SearingSpotlights(s) => s,
        }
    }
}

/// A single episode. Owns its random stream; never shared.
#[derive(Debug, Clone)]
pub struct EpisodeState {
    env: EnvId,
    config: EnvConfig,
    seed: u64,
    steps: u64,
    done: bool,
    total_reward: f64,
    inner: EnvState,
}

impl EpisodeState {
    /// Starts a new episode and renders its first observation.
    pub fn reset(env: EnvId, config: EnvConfig, seed: u64) -> Result<(EpisodeState, Frame)> {
        config.validate(env)?;
        let inner = match (&config, env.family()) {
            (EnvConfig::MortarMayhem(c), Family::MortarMayhem) => {
                EnvState::MortarMayhem(MortarMayhem::finite(env, c, seed))
            }
            (EnvConfig::EndlessMortarMayhem(c), Family::EndlessMortarMayhem) => {
                EnvState::MortarMayhem(MortarMayhem::endless(c, seed))
            }
            (EnvConfig::MysteryPath(c), Family::MysteryPath) => {
                EnvState::MysteryPath(MysteryPath::new(env, c, seed)?)
            }
            (EnvConfig::EndlessMysteryPath(c), Family::EndlessMysteryPath) => {
                EnvState::EndlessMysteryPath(EndlessMysteryPath::new(c, seed)?)
            }
            (EnvConfig::SearingSpotlights(c), Family::SearingSpotlights) => {
                EnvState::SearingSpotlights(SearingSpotlights::finite(c, seed))
            }
            (EnvConfig::EndlessSearingSpotlights(c), Family::EndlessSearingSpotlights) => {
                EnvState::SearingSpotlights(SearingSpotlights::endless(c, seed))
            }
            _ => unreachable!("validate() rejects family mismatches"),
        };
        let state = EpisodeState { env, config, seed, steps: 0, done: false, total_reward: 0.0, inner };
        let frame = state.render_observation();
        Ok((state, frame))
    }

    /// Reset with the published defaults.
    pub fn reset_default(env: EnvId, seed: u64) -> Result<(EpisodeState, Frame)> {
        Self::reset(env, EnvConfig::defaults(env), seed)
    }

    /// Advances exactly one step.
    pub fn step(&mut self, action: impl Into<Action>) -> Result<StepResult> {
        let action = action.into();
        if self.done {
            return Err(EngineError::EpisodeFinished);
        }
        if action.space() != self.env.action_space() {
            return Err(EngineError::WrongActionType {
                env: self.env.name().into(),
                expected: self.env.action_space().name(),
            });
        }
        let t = self.inner.sim_mut().step(action);
        self.steps += 1;
        self.done = t.done;
        self.total_reward += t.reward;
        Ok(StepResult {
            observation: self.render_observation(),
            reward: t.reward,
            done: t.done,
            info: self.info(),
        })
    }

    pub fn render_observation(&self) -> Frame {
        self.inner.sim().render(View::Observation)
    }

    pub fn render_ground_truth(&self) -> Frame {
        self.inner.sim().render(View::GroundTruth)
    }

    /// Feature vector exposed alongside the pixels (Mortar Mayhem Act variants).
    pub fn vector_observation(&self) -> Option<Vec<f32>> {
        self.inner.sim().vector_observation()
    }

    pub fn info(&self) -> Info {
        let mut info = self.inner.sim().info();
        info.insert("step".into(), self.steps as f64);
        info
    }

    /// Largest reward a single step can emit under this episode's config.
    pub fn max_step_reward(&self) -> f64 {
        self.inner.sim().max_step_reward()
    }

    pub fn env(&self) -> EnvId {
        self.env
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn total_reward(&self) -> f64 {
        self.total_reward
    }

    pub fn action_space(&self) -> ActionSpace {
        self.env.action_space()
    }

    /// Full simulation state, for scripted agents and debugging.
    pub fn state(&self) -> &EnvState {
        &self.inner
    }
}
