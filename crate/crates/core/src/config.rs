//! Environment identifiers and reset parameters.
//!
//! Every parameter record mirrors the published default-parameter tables.
//! Keys are the table's parameter names lowercased with punctuation dropped
//! and spaces replaced by underscores (`"No. Commands*"` -> `no_commands`).
//! Parameters that are sampled on reset carry either a choice list
//! (`[10]` in the table, a JSON array here) or a closed range
//! (`(7.5-13.75)`, a two-element JSON array).

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::action::ActionSpace;
use crate::error::{EngineError, Result};
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EnvId {
    MortarMayhem,
    MortarMayhemGrid,
    MortarMayhemAct,
    MortarMayhemActGrid,
    EndlessMortarMayhem,
    MysteryPath,
    MysteryPathGrid,
    EndlessMysteryPath,
    SearingSpotlights,
    EndlessSearingSpotlights,
}

/// Parameter-record family shared by related environment ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    MortarMayhem,
    EndlessMortarMayhem,
    MysteryPath,
    EndlessMysteryPath,
    SearingSpotlights,
    EndlessSearingSpotlights,
}

impl EnvId {
    pub const ALL: [EnvId; 10] = [
        EnvId::MortarMayhem,
        EnvId::MortarMayhemGrid,
        EnvId::MortarMayhemAct,
        EnvId::MortarMayhemActGrid,
        EnvId::EndlessMortarMayhem,
        EnvId::MysteryPath,
        EnvId::MysteryPathGrid,
        EnvId::EndlessMysteryPath,
        EnvId::SearingSpotlights,
        EnvId::EndlessSearingSpotlights,
    ];

    /// The six base environments (finite and endless of each family).
    pub const BASE: [EnvId; 6] = [
        EnvId::MortarMayhem,
        EnvId::EndlessMortarMayhem,
        EnvId::MysteryPath,
        EnvId::EndlessMysteryPath,
        EnvId::SearingSpotlights,
        EnvId::EndlessSearingSpotlights,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EnvId::MortarMayhem => "MortarMayhem",
            EnvId::MortarMayhemGrid => "MortarMayhemGrid",
            EnvId::MortarMayhemAct => "MortarMayhemAct",
            EnvId::MortarMayhemActGrid => "MortarMayhemActGrid",
            EnvId::EndlessMortarMayhem => "EndlessMortarMayhem",
            EnvId::MysteryPath => "MysteryPath",
            EnvId::MysteryPathGrid => "MysteryPathGrid",
            EnvId::EndlessMysteryPath => "EndlessMysteryPath",
            EnvId::SearingSpotlights => "SearingSpotlights",
            EnvId::EndlessSearingSpotlights => "EndlessSearingSpotlights",
        }
    }

    pub fn family(self) -> Family {
        match self {
            EnvId::MortarMayhem
            | EnvId::MortarMayhemGrid
            | EnvId::MortarMayhemAct
            | EnvId::MortarMayhemActGrid => Family::MortarMayhem,
            EnvId::EndlessMortarMayhem => Family::EndlessMortarMayhem,
            EnvId::MysteryPath | EnvId::MysteryPathGrid => Family::MysteryPath,
            EnvId::EndlessMysteryPath => Family::EndlessMysteryPath,
            EnvId::SearingSpotlights => Family::SearingSpotlights,
            EnvId::EndlessSearingSpotlights => Family::EndlessSearingSpotlights,
        }
    }

    pub fn action_space(self) -> ActionSpace {
        if self.is_grid() {
            ActionSpace::Grid
        } else {
            ActionSpace::MultiDiscrete
        }
    }

    pub fn is_grid(self) -> bool {
        matches!(self, EnvId::MortarMayhemGrid | EnvId::MortarMayhemActGrid | EnvId::MysteryPathGrid)
    }

    pub fn is_endless(self) -> bool {
        matches!(
            self,
            EnvId::EndlessMortarMayhem | EnvId::EndlessMysteryPath | EnvId::EndlessSearingSpotlights
        )
    }
}

impl fmt::Display for EnvId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnvId {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self> {
        EnvId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| EngineError::UnknownEnv(s.to_string()))
    }
}

/// A closed real interval sampled uniformly on reset. Serialized as `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformRange(pub f64, pub f64);

impl UniformRange {
    pub fn low(self) -> f64 {
        self.0
    }

    pub fn high(self) -> f64 {
        self.1
    }

    pub fn sample(self, rng: &mut Rng) -> f64 {
        rng.uniform(self.0, self.1)
    }

    pub fn contains(self, v: f64) -> bool {
        v >= self.0 && v <= self.1
    }
}

fn sample_choice(rng: &mut Rng, choices: &[u32]) -> u32 {
    *rng.choose(choices)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MortarMayhemConfig {
    pub agent_scale: f64,
    pub agent_speed: f64,
    pub arena_size: u32,
    pub no_available_commands: u32,
    pub no_commands: Vec<u32>,
    pub command_show_duration: Vec<u32>,
    pub command_show_delay: Vec<u32>,
    pub execution_duration: Vec<u32>,
    pub execution_delay: Vec<u32>,
    pub show_visual_feedback: bool,
    pub reward_command_failure: f64,
    pub reward_command_success: f64,
    pub reward_episode_success: f64,
}

impl Default for MortarMayhemConfig {
    fn default() -> Self {
        Self {
            agent_scale: 0.25,
            agent_speed: 3.0,
            arena_size: 5,
            no_available_commands: 9,
            no_commands: vec![10],
            command_show_duration: vec![3],
            command_show_delay: vec![1],
            execution_duration: vec![6],
            execution_delay: vec![18],
            show_visual_feedback: true,
            reward_command_failure: 0.0,
            reward_command_success: 0.1,
            reward_episode_success: 0.0,
        }
    }
}

impl MortarMayhemConfig {
    /// Grid-locomotion overrides.
    pub fn grid() -> Self {
        Self {
            no_available_commands: 5,
            execution_duration: vec![2],
            execution_delay: vec![6],
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndlessMortarMayhemConfig {
    pub max_episode_length: i64,
    pub agent_scale: f64,
    pub agent_speed: f64,
    pub no_available_commands: u32,
    pub command_show_duration: Vec<u32>,
    pub command_show_delay: Vec<u32>,
    pub execution_duration: Vec<u32>,
    pub execution_delay: Vec<u32>,
    pub show_visual_feedback: bool,
    pub reward_command_failure: f64,
    pub reward_command_success: f64,
}

impl Default for EndlessMortarMayhemConfig {
    fn default() -> Self {
        Self {
            max_episode_length: -1,
            agent_scale: 0.25,
            agent_speed: 3.0,
            no_available_commands: 9,
            command_show_duration: vec![3],
            command_show_delay: vec![1],
            execution_duration: vec![6],
            execution_delay: vec![18],
            show_visual_feedback: true,
            reward_command_failure: 0.0,
            reward_command_success: 0.1,
        }
    }
}

/// Timing parameters drawn once per episode from the choice lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommandTiming {
    pub show_duration: u32,
    pub show_delay: u32,
    pub execution_duration: u32,
    pub execution_delay: u32,
}

impl CommandTiming {
    fn sample(
        rng: &mut Rng,
        show_duration: &[u32],
        show_delay: &[u32],
        execution_duration: &[u32],
        execution_delay: &[u32],
    ) -> Self {
        Self {
            show_duration: sample_choice(rng, show_duration),
            show_delay: sample_choice(rng, show_delay),
            execution_duration: sample_choice(rng, execution_duration),
            execution_delay: sample_choice(rng, execution_delay),
        }
    }
}

impl MortarMayhemConfig {
    /// Draws `(command count, timing)` for one episode.
    pub fn sample(&self, rng: &mut Rng) -> (u32, CommandTiming) {
        let n = sample_choice(rng, &self.no_commands);
        let timing = CommandTiming::sample(
            rng,
            &self.command_show_duration,
            &self.command_show_delay,
            &self.execution_duration,
            &self.execution_delay,
        );
        (n, timing)
    }
}

impl EndlessMortarMayhemConfig {
    pub fn sample(&self, rng: &mut Rng) -> CommandTiming {
        CommandTiming::sample(
            rng,
            &self.command_show_duration,
            &self.command_show_delay,
            &self.execution_duration,
            &self.execution_delay,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MysteryPathConfig {
    pub max_episode_length: i64,
    pub agent_scale: f64,
    pub agent_speed: f64,
    pub cardinal_origin_choice: Vec<u32>,
    pub show_origin: bool,
    pub show_goal: bool,
    pub show_visual_feedback: bool,
    pub reward_goal: f64,
    pub reward_fall_off: f64,
    pub reward_path_progress: f64,
    pub reward_step: f64,
}

impl Default for MysteryPathConfig {
    fn default() -> Self {
        Self {
            max_episode_length: 512,
            agent_scale: 0.25,
            agent_speed: 3.0,
            cardinal_origin_choice: vec![0, 1, 2, 3],
            show_origin: false,
            show_goal: false,
            show_visual_feedback: true,
            reward_goal: 1.0,
            reward_fall_off: 0.0,
            reward_path_progress: 0.1,
            reward_step: 0.0,
        }
    }
}

impl MysteryPathConfig {
    pub fn grid() -> Self {
        Self { max_episode_length: 128, reward_path_progress: 0.0, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndlessMysteryPathConfig {
    pub max_episode_length: i64,
    pub agent_scale: f64,
    pub agent_speed: f64,
    pub show_origin: bool,
    pub show_past_path: bool,
    pub show_background: bool,
    pub show_stamina: bool,
    pub show_visual_feedback: bool,
    pub camera_offset_scale: f64,
    pub stamina_level: u32,
    pub reward_fall_off: f64,
    pub reward_path_progress: f64,
    pub reward_step: f64,
}

impl Default for EndlessMysteryPathConfig {
    fn default() -> Self {
        Self {
            max_episode_length: -1,
            agent_scale: 0.25,
            agent_speed: 3.0,
            show_origin: false,
            show_past_path: true,
            show_background: false,
            show_stamina: false,
            show_visual_feedback: true,
            camera_offset_scale: 5.0,
            stamina_level: 20,
            reward_fall_off: 0.0,
            reward_path_progress: 0.1,
            reward_step: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearingSpotlightsConfig {
    pub max_episode_length: i64,
    pub agent_scale: f64,
    pub agent_speed: f64,
    pub agent_always_visible: bool,
    pub agent_health: u32,
    pub sample_agent_position: bool,
    pub use_exit: bool,
    pub exit_scale: f64,
    pub exit_visible: bool,
    pub number_of_coins: Vec<u32>,
    pub coin_scale: f64,
    pub coin_always_visible: bool,
    pub no_initial_spotlight_spawns: u32,
    pub no_spotlight_spawns: u32,
    pub spotlight_spawn_interval: u32,
    pub spotlight_spawn_decay: f64,
    pub spotlight_spawn_threshold: u32,
    pub spotlight_radius: UniformRange,
    pub spotlight_speed: UniformRange,
    pub spotlight_damage: u32,
    pub light_dim_off_duration: u32,
    pub light_threshold: u32,
    pub show_visual_feedback: bool,
    pub show_last_action: bool,
    pub show_last_positive_reward: bool,
    pub render_background_black: bool,
    pub hide_checkered_background: bool,
    pub reward_inside_spotlight: f64,
    pub reward_outside_spotlights: f64,
    pub reward_death: f64,
    pub reward_exit: f64,
    pub reward_coin: f64,
    pub reward_max_steps: f64,
}

impl Default for SearingSpotlightsConfig {
    fn default() -> Self {
        Self {
            max_episode_length: 256,
            agent_scale: 0.25,
            agent_speed: 3.0,
            agent_always_visible: false,
            agent_health: 5,
            sample_agent_position: true,
            use_exit: true,
            exit_scale: 0.5,
            exit_visible: false,
            number_of_coins: vec![1],
            coin_scale: 0.375,
            coin_always_visible: false,
            no_initial_spotlight_spawns: 4,
            no_spotlight_spawns: 30,
            spotlight_spawn_interval: 30,
            spotlight_spawn_decay: 0.95,
            spotlight_spawn_threshold: 10,
            spotlight_radius: UniformRange(7.5, 13.75),
            spotlight_speed: UniformRange(0.0025, 0.0075),
            spotlight_damage: 1,
            light_dim_off_duration: 6,
            light_threshold: 255,
            show_visual_feedback: true,
            show_last_action: true,
            show_last_positive_reward: true,
            render_background_black: false,
            hide_checkered_background: false,
            reward_inside_spotlight: 0.0,
            reward_outside_spotlights: 0.0,
            reward_death: 0.0,
            reward_exit: 1.0,
            reward_coin: 0.25,
            reward_max_steps: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndlessSearingSpotlightsConfig {
    pub max_episode_length: i64,
    pub agent_scale: f64,
    pub agent_speed: f64,
    pub agent_always_visible: bool,
    pub agent_health: u32,
    pub sample_agent_position: bool,
    pub coin_scale: f64,
    pub coin_show_duration: u32,
    pub coin_always_visible: bool,
    pub steps_per_coin: u32,
    pub no_initial_spotlight_spawns: u32,
    pub spotlight_spawn_interval: u32,
    pub spotlight_radius: UniformRange,
    pub spotlight_speed: UniformRange,
    pub spotlight_damage: u32,
    pub light_dim_off_duration: u32,
    pub light_threshold: u32,
    pub show_visual_feedback: bool,
    pub render_background_black: bool,
    pub hide_checkered_background: bool,
    pub show_last_action: bool,
    pub show_last_positive_reward: bool,
    pub reward_inside_spotlight: f64,
    pub reward_outside_spotlights: f64,
    pub reward_death: f64,
    pub reward_coin: f64,
}

impl Default for EndlessSearingSpotlightsConfig {
    fn default() -> Self {
        Self {
            max_episode_length: -1,
            agent_scale: 0.25,
            agent_speed: 3.0,
            agent_always_visible: false,
            agent_health: 10,
            sample_agent_position: true,
            coin_scale: 0.375,
            coin_show_duration: 6,
            coin_always_visible: false,
            steps_per_coin: 160,
            no_initial_spotlight_spawns: 3,
            spotlight_spawn_interval: 50,
            spotlight_radius: UniformRange(7.5, 13.75),
            spotlight_speed: UniformRange(0.0025, 0.0075),
            spotlight_damage: 1,
            light_dim_off_duration: 6,
            light_threshold: 255,
            show_visual_feedback: true,
            render_background_black: false,
            hide_checkered_background: false,
            show_last_action: true,
            show_last_positive_reward: true,
            reward_inside_spotlight: 0.0,
            reward_outside_spotlights: 0.0,
            reward_death: 0.0,
            reward_coin: 0.25,
        }
    }
}

/// Reset parameters for one environment.
#[derive(Debug, Clone, PartialEq)]
pub enum EnvConfig {
    MortarMayhem(MortarMayhemConfig),
    EndlessMortarMayhem(EndlessMortarMayhemConfig),
    MysteryPath(MysteryPathConfig),
    EndlessMysteryPath(EndlessMysteryPathConfig),
    SearingSpotlights(SearingSpotlightsConfig),
    EndlessSearingSpotlights(EndlessSearingSpotlightsConfig),
}

/// One row of a parameter table: display name, config key, formatted default.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterRow {
    pub name: &'static str,
    pub key: &'static str,
    pub value: String,
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn fmt_bool(v: bool) -> String {
    if v { "True" } else { "False" }.to_string()
}

fn fmt_choices(v: &[u32]) -> String {
    let items: Vec<String> = v.iter().map(|c| c.to_string()).collect();
    format!("[{}]", items.join(", "))
}

fn fmt_range(r: UniformRange) -> String {
    format!("({}-{})", r.0, r.1)
}

macro_rules! rows {
    ($($name:literal, $key:literal => $value:expr;)*) => {
        vec![$(ParameterRow { name: $name, key: $key, value: $value }),*]
    };
}

impl EnvConfig {
    /// Published defaults for `env`.
    pub fn defaults(env: EnvId) -> EnvConfig {
        match env {
            EnvId::MortarMayhem | EnvId::MortarMayhemAct => {
                EnvConfig::MortarMayhem(MortarMayhemConfig::default())
            }
            EnvId::MortarMayhemGrid | EnvId::MortarMayhemActGrid => {
                EnvConfig::MortarMayhem(MortarMayhemConfig::grid())
            }
            EnvId::EndlessMortarMayhem => {
                EnvConfig::EndlessMortarMayhem(EndlessMortarMayhemConfig::default())
            }
            EnvId::MysteryPath => EnvConfig::MysteryPath(MysteryPathConfig::default()),
            EnvId::MysteryPathGrid => EnvConfig::MysteryPath(MysteryPathConfig::grid()),
            EnvId::EndlessMysteryPath => {
                EnvConfig::EndlessMysteryPath(EndlessMysteryPathConfig::default())
            }
            EnvId::SearingSpotlights => {
                EnvConfig::SearingSpotlights(SearingSpotlightsConfig::default())
            }
            EnvId::EndlessSearingSpotlights => {
                EnvConfig::EndlessSearingSpotlights(EndlessSearingSpotlightsConfig::default())
            }
        }
    }

    pub fn family(&self) -> Family {
        match self {
            EnvConfig::MortarMayhem(_) => Family::MortarMayhem,
            EnvConfig::EndlessMortarMayhem(_) => Family::EndlessMortarMayhem,
            EnvConfig::MysteryPath(_) => Family::MysteryPath,
            EnvConfig::EndlessMysteryPath(_) => Family::EndlessMysteryPath,
            EnvConfig::SearingSpotlights(_) => Family::SearingSpotlights,
            EnvConfig::EndlessSearingSpotlights(_) => Family::EndlessSearingSpotlights,
        }
    }

    /// Parses a flat JSON object. Keys not present keep the defaults of
    /// `env`; keys the environment does not know are rejected.
    pub fn from_json(env: EnvId, text: &str) -> Result<EnvConfig> {
        let overrides: serde_json::Value = serde_json::from_str(text)?;
        Self::from_value(env, &overrides)
    }

    pub fn from_value(env: EnvId, overrides: &serde_json::Value) -> Result<EnvConfig> {
        let overrides = overrides.as_object().ok_or_else(|| EngineError::InvalidParameter {
            key: "<document>".into(),
            reason: "config must be a flat JSON object".into(),
        })?;
        let mut merged = Self::defaults(env).to_value();
        let target = merged.as_object_mut().expect("configs serialize to objects");
        for (key, value) in overrides {
            if !target.contains_key(key) {
                return Err(EngineError::UnknownConfigKey { env: env.name().into(), key: key.clone() });
            }
            target.insert(key.clone(), value.clone());
        }
        let config = match env.family() {
            Family::MortarMayhem => EnvConfig::MortarMayhem(serde_json::from_value(merged)?),
            Family::EndlessMortarMayhem => {
                EnvConfig::EndlessMortarMayhem(serde_json::from_value(merged)?)
            }
            Family::MysteryPath => EnvConfig::MysteryPath(serde_json::from_value(merged)?),
            Family::EndlessMysteryPath => {
                EnvConfig::EndlessMysteryPath(serde_json::from_value(merged)?)
            }
            Family::SearingSpotlights => {
                EnvConfig::SearingSpotlights(serde_json::from_value(merged)?)
            }
            Family::EndlessSearingSpotlights => {
                EnvConfig::EndlessSearingSpotlights(serde_json::from_value(merged)?)
            }
        };
        config.validate(env)?;
        Ok(config)
    }

    pub fn to_value(&self) -> serde_json::Value {
        let v = match self {
            EnvConfig::MortarMayhem(c) => serde_json::to_value(c),
            EnvConfig::EndlessMortarMayhem(c) => serde_json::to_value(c),
            EnvConfig::MysteryPath(c) => serde_json::to_value(c),
            EnvConfig::EndlessMysteryPath(c) => serde_json::to_value(c),
            EnvConfig::SearingSpotlights(c) => serde_json::to_value(c),
            EnvConfig::EndlessSearingSpotlights(c) => serde_json::to_value(c),
        };
        v.expect("config fields are plain data")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("config fields are plain data")
    }

    /// Checks that the record belongs to `env` and every value is inside its
    /// documented domain.
    pub fn validate(&self, env: EnvId) -> Result<()> {
        if self.family() != env.family() {
            return Err(EngineError::ConfigMismatch {
                env: env.name().into(),
                config: format!("{:?}", self.family()),
            });
        }
        let mut check = Checker::default();
        match self {
            EnvConfig::MortarMayhem(c) => {
                check.common(c.agent_scale, c.agent_speed);
                check.at_least("arena_size", c.arena_size, 3);
                check.available_commands(c.no_available_commands, env.is_grid());
                check.choices("no_commands", &c.no_commands, 1);
                check.choices("command_show_duration", &c.command_show_duration, 1);
                check.choices("command_show_delay", &c.command_show_delay, 0);
                check.choices("execution_duration", &c.execution_duration, 1);
                check.choices("execution_delay", &c.execution_delay, 0);
                check.finite("reward_command_failure", c.reward_command_failure);
                check.finite("reward_command_success", c.reward_command_success);
                check.finite("reward_episode_success", c.reward_episode_success);
            }
            EnvConfig::EndlessMortarMayhem(c) => {
                check.common(c.agent_scale, c.agent_speed);
                check.available_commands(c.no_available_commands, false);
                check.choices("command_show_duration", &c.command_show_duration, 1);
                check.choices("command_show_delay", &c.command_show_delay, 0);
                check.choices("execution_duration", &c.execution_duration, 1);
                check.choices("execution_delay", &c.execution_delay, 0);
                check.finite("reward_command_failure", c.reward_command_failure);
                check.finite("reward_command_success", c.reward_command_success);
            }
            EnvConfig::MysteryPath(c) => {
                check.common(c.agent_scale, c.agent_speed);
                check.choices("cardinal_origin_choice", &c.cardinal_origin_choice, 0);
                if c.cardinal_origin_choice.iter().any(|&s| s > 3) {
                    check.fail("cardinal_origin_choice", "sides are numbered 0..=3");
                }
                for (k, v) in [
                    ("reward_goal", c.reward_goal),
                    ("reward_fall_off", c.reward_fall_off),
                    ("reward_path_progress", c.reward_path_progress),
                    ("reward_step", c.reward_step),
                ] {
                    check.finite(k, v);
                }
            }
            EnvConfig::EndlessMysteryPath(c) => {
                check.common(c.agent_scale, c.agent_speed);
                if !(c.camera_offset_scale.is_finite() && c.camera_offset_scale >= 0.0) {
                    check.fail("camera_offset_scale", "must be finite and non-negative");
                }
                check.at_least("stamina_level", c.stamina_level, 1);
                for (k, v) in [
                    ("reward_fall_off", c.reward_fall_off),
                    ("reward_path_progress", c.reward_path_progress),
                    ("reward_step", c.reward_step),
                ] {
                    check.finite(k, v);
                }
            }
            EnvConfig::SearingSpotlights(c) => {
                check.common(c.agent_scale, c.agent_speed);
                check.at_least("agent_health", c.agent_health, 1);
                check.positive("exit_scale", c.exit_scale);
                check.choices("number_of_coins", &c.number_of_coins, 0);
                if c.number_of_coins.iter().any(|&n| n > MAX_COINS) {
                    check.fail("number_of_coins", "at most 10 coins fit the arena");
                }
                check.positive("coin_scale", c.coin_scale);
                check.at_least("spotlight_spawn_interval", c.spotlight_spawn_interval, 1);
                if !(c.spotlight_spawn_decay > 0.0 && c.spotlight_spawn_decay <= 1.0) {
                    check.fail("spotlight_spawn_decay", "must be in (0, 1]");
                }
                check.at_least("spotlight_spawn_threshold", c.spotlight_spawn_threshold, 1);
                check.range("spotlight_radius", c.spotlight_radius);
                check.range("spotlight_speed", c.spotlight_speed);
                check.light_threshold(c.light_threshold);
                for (k, v) in [
                    ("reward_inside_spotlight", c.reward_inside_spotlight),
                    ("reward_outside_spotlights", c.reward_outside_spotlights),
                    ("reward_death", c.reward_death),
                    ("reward_exit", c.reward_exit),
                    ("reward_coin", c.reward_coin),
                    ("reward_max_steps", c.reward_max_steps),
                ] {
                    check.finite(k, v);
                }
            }
            EnvConfig::EndlessSearingSpotlights(c) => {
                check.common(c.agent_scale, c.agent_speed);
                check.at_least("agent_health", c.agent_health, 1);
                check.positive("coin_scale", c.coin_scale);
                check.at_least("steps_per_coin", c.steps_per_coin, 1);
                check.at_least("spotlight_spawn_interval", c.spotlight_spawn_interval, 1);
                check.range("spotlight_radius", c.spotlight_radius);
                check.range("spotlight_speed", c.spotlight_speed);
                check.light_threshold(c.light_threshold);
                for (k, v) in [
                    ("reward_inside_spotlight", c.reward_inside_spotlight),
                    ("reward_outside_spotlights", c.reward_outside_spotlights),
                    ("reward_death", c.reward_death),
                    ("reward_coin", c.reward_coin),
                ] {
                    check.finite(k, v);
                }
            }
        }
        check.finish()
    }

    /// Parameter table in the published row order.
    pub fn parameter_rows(&self) -> Vec<ParameterRow> {
        match self {
            EnvConfig::MortarMayhem(c) => rows! {
                "Agent Scale", "agent_scale" => fmt_f64(c.agent_scale);
                "Agent Speed", "agent_speed" => fmt_f64(c.agent_speed);
                "Arena Size", "arena_size" => c.arena_size.to_string();
                "No. Available Commands", "no_available_commands" => c.no_available_commands.to_string();
                "No. Commands*", "no_commands" => fmt_choices(&c.no_commands);
                "Command Show Duration*", "command_show_duration" => fmt_choices(&c.command_show_duration);
                "Command Show Delay*", "command_show_delay" => fmt_choices(&c.command_show_delay);
                "Execution Duration*", "execution_duration" => fmt_choices(&c.execution_duration);
                "Execution Delay*", "execution_delay" => fmt_choices(&c.execution_delay);
                "Show Visual Feedback", "show_visual_feedback" => fmt_bool(c.show_visual_feedback);
                "Reward Command Failure", "reward_command_failure" => fmt_f64(c.reward_command_failure);
                "Reward Command Success", "reward_command_success" => fmt_f64(c.reward_command_success);
                "Reward Episode Success", "reward_episode_success" => fmt_f64(c.reward_episode_success);
            },
            EnvConfig::EndlessMortarMayhem(c) => rows! {
                "Max Episode Length", "max_episode_length" => c.max_episode_length.to_string();
                "Agent Scale", "agent_scale" => fmt_f64(c.agent_scale);
                "Agent Speed", "agent_speed" => fmt_f64(c.agent_speed);
                "No. Available Commands", "no_available_commands" => c.no_available_commands.to_string();
                "Command Show Duration*", "command_show_duration" => fmt_choices(&c.command_show_duration);
                "Command Show Delay*", "command_show_delay" => fmt_choices(&c.command_show_delay);
                "Execution Duration*", "execution_duration" => fmt_choices(&c.execution_duration);
                "Execution Delay*", "execution_delay" => fmt_choices(&c.execution_delay);
                "Show Visual Feedback", "show_visual_feedback" => fmt_bool(c.show_visual_feedback);
                "Reward Command Failure", "reward_command_failure" => fmt_f64(c.reward_command_failure);
                "Reward Command Success", "reward_command_success" => fmt_f64(c.reward_command_success);
            },
            EnvConfig::MysteryPath(c) => rows! {
                "Max Episode Length", "max_episode_length" => c.max_episode_length.to_string();
                "Agent Scale", "agent_scale" => fmt_f64(c.agent_scale);
                "Agent Speed", "agent_speed" => fmt_f64(c.agent_speed);
                "Cardinal Origin Choice*", "cardinal_origin_choice" => fmt_choices(&c.cardinal_origin_choice);
                "Show Origin", "show_origin" => fmt_bool(c.show_origin);
                "Show Goal", "show_goal" => fmt_bool(c.show_goal);
                "Show Visual Feedback", "show_visual_feedback" => fmt_bool(c.show_visual_feedback);
                "Reward Goal", "reward_goal" => fmt_f64(c.reward_goal);
                "Reward Fall Off", "reward_fall_off" => fmt_f64(c.reward_fall_off);
                "Reward Path Progress", "reward_path_progress" => fmt_f64(c.reward_path_progress);
                "Reward Step", "reward_step" => fmt_f64(c.reward_step);
            },
            EnvConfig::EndlessMysteryPath(c) => rows! {
                "Max Episode Length", "max_episode_length" => c.max_episode_length.to_string();
                "Agent Scale", "agent_scale" => fmt_f64(c.agent_scale);
                "Agent Speed", "agent_speed" => fmt_f64(c.agent_speed);
                "Show Origin", "show_origin" => fmt_bool(c.show_origin);
                "Show Past Path", "show_past_path" => fmt_bool(c.show_past_path);
                "Show Background", "show_background" => fmt_bool(c.show_background);
                "Show Stamina", "show_stamina" => fmt_bool(c.show_stamina);
                "Show Visual Feedback", "show_visual_feedback" => fmt_bool(c.show_visual_feedback);
                "Camera Offset Scale", "camera_offset_scale" => fmt_f64(c.camera_offset_scale);
                "Stamina Level", "stamina_level" => c.stamina_level.to_string();
                "Reward Fall Off", "reward_fall_off" => fmt_f64(c.reward_fall_off);
                "Reward Path Progress", "reward_path_progress" => fmt_f64(c.reward_path_progress);
                "Reward Step", "reward_step" => fmt_f64(c.reward_step);
            },
            EnvConfig::SearingSpotlights(c) => rows! {
                "Max Episode Length", "max_episode_length" => c.max_episode_length.to_string();
                "Agent Scale", "agent_scale" => fmt_f64(c.agent_scale);
                "Agent Speed", "agent_speed" => fmt_f64(c.agent_speed);
                "Agent Always Visible", "agent_always_visible" => fmt_bool(c.agent_always_visible);
                "Agent Health", "agent_health" => c.agent_health.to_string();
                "Sample Agent Position", "sample_agent_position" => fmt_bool(c.sample_agent_position);
                "Use Exit", "use_exit" => fmt_bool(c.use_exit);
                "Exit Scale", "exit_scale" => fmt_f64(c.exit_scale);
                "Exit Visible", "exit_visible" => fmt_bool(c.exit_visible);
                "Number of Coins*", "number_of_coins" => fmt_choices(&c.number_of_coins);
                "Coin Scale", "coin_scale" => fmt_f64(c.coin_scale);
                "Coin Always Visible", "coin_always_visible" => fmt_bool(c.coin_always_visible);
                "No. Initial Spotlight Spawns", "no_initial_spotlight_spawns" => c.no_initial_spotlight_spawns.to_string();
                "No. Spotlight Spawns", "no_spotlight_spawns" => c.no_spotlight_spawns.to_string();
                "Spotlight Spawn Interval", "spotlight_spawn_interval" => c.spotlight_spawn_interval.to_string();
                "Spotlight Spawn Decay", "spotlight_spawn_decay" => fmt_f64(c.spotlight_spawn_decay);
                "Spotlight Spawn Threshold", "spotlight_spawn_threshold" => c.spotlight_spawn_threshold.to_string();
                "Spotlight Radius*", "spotlight_radius" => fmt_range(c.spotlight_radius);
                "Spotlight Speed*", "spotlight_speed" => fmt_range(c.spotlight_speed);
                "Spotlight Damage", "spotlight_damage" => c.spotlight_damage.to_string();
                "Light Dim Off Duration", "light_dim_off_duration" => c.light_dim_off_duration.to_string();
                "Light Threshold", "light_threshold" => c.light_threshold.to_string();
                "Show Visual Feedback", "show_visual_feedback" => fmt_bool(c.show_visual_feedback);
                "Show Last Action", "show_last_action" => fmt_bool(c.show_last_action);
                "Show Last Positive Reward", "show_last_positive_reward" => fmt_bool(c.show_last_positive_reward);
                "Render Background Black", "render_background_black" => fmt_bool(c.render_background_black);
                "Hide Checkered Background", "hide_checkered_background" => fmt_bool(c.hide_checkered_background);
                "Reward Inside Spotlight", "reward_inside_spotlight" => fmt_f64(c.reward_inside_spotlight);
                "Reward Outside Spotlights", "reward_outside_spotlights" => fmt_f64(c.reward_outside_spotlights);
                "Reward Death", "reward_death" => fmt_f64(c.reward_death);
                "Reward Exit", "reward_exit" => fmt_f64(c.reward_exit);
                "Reward Coin", "reward_coin" => fmt_f64(c.reward_coin);
                "Reward Max Steps", "reward_max_steps" => fmt_f64(c.reward_max_steps);
            },
            EnvConfig::EndlessSearingSpotlights(c) => rows! {
                "Max Episode Length", "max_episode_length" => c.max_episode_length.to_string();
                "Agent Scale", "agent_scale" => fmt_f64(c.agent_scale);
                "Agent Speed", "agent_speed" => fmt_f64(c.agent_speed);
                "Agent Always Visible", "agent_always_visible" => fmt_bool(c.agent_always_visible);
                "Agent Health", "agent_health" => c.agent_health.to_string();
                "Sample Agent Position", "sample_agent_position" => fmt_bool(c.sample_agent_position);
                "Coin Scale", "coin_scale" => fmt_f64(c.coin_scale);
                "Coin Show Duration", "coin_show_duration" => c.coin_show_duration.to_string();
                "Coin Always Visible", "coin_always_visible" => fmt_bool(c.coin_always_visible);
                "Steps per Coin", "steps_per_coin" => c.steps_per_coin.to_string();
                "No. Initial Spotlight Spawns", "no_initial_spotlight_spawns" => c.no_initial_spotlight_spawns.to_string();
                "Spotlight Spawn Interval", "spotlight_spawn_interval" => c.spotlight_spawn_interval.to_string();
                "Spotlight Radius*", "spotlight_radius" => fmt_range(c.spotlight_radius);
                "Spotlight Speed*", "spotlight_speed" => fmt_range(c.spotlight_speed);
                "Spotlight Damage", "spotlight_damage" => c.spotlight_damage.to_string();
                "Light Dim Off Duration", "light_dim_off_duration" => c.light_dim_off_duration.to_string();
                "Light Threshold", "light_threshold" => c.light_threshold.to_string();
                "Show Visual Feedback", "show_visual_feedback" => fmt_bool(c.show_visual_feedback);
                "Render Background Black", "render_background_black" => fmt_bool(c.render_background_black);
                "Hide Checkered Background", "hide_checkered_background" => fmt_bool(c.hide_checkered_background);
                "Show Last Action", "show_last_action" => fmt_bool(c.show_last_action);
                "Show Last Positive Reward", "show_last_positive_reward" => fmt_bool(c.show_last_positive_reward);
                "Reward Inside Spotlight", "reward_inside_spotlight" => fmt_f64(c.reward_inside_spotlight);
                "Reward Outside Spotlights", "reward_outside_spotlights" => fmt_f64(c.reward_outside_spotlights);
                "Reward Death", "reward_death" => fmt_f64(c.reward_death);
                "Reward Coin", "reward_coin" => fmt_f64(c.reward_coin);
            },
        }
    }

    /// Human-readable parameter table, one `name  value` row per line.
    pub fn format_table(&self, env: EnvId) -> String {
        let mut out = format!("{}\n", env.name());
        for row in self.parameter_rows() {
            out.push_str(&format!("  {:<30}{}\n", row.name, row.value));
        }
        out
    }
}

/// Environments listed by `info` when none is named: the six base
/// environments plus the grid variants, in table order.
pub const INFO_ENVS: [EnvId; 8] = [
    EnvId::MortarMayhem,
    EnvId::MortarMayhemGrid,
    EnvId::MysteryPath,
    EnvId::MysteryPathGrid,
    EnvId::SearingSpotlights,
    EnvId::EndlessMortarMayhem,
    EnvId::EndlessMysteryPath,
    EnvId::EndlessSearingSpotlights,
];

/// Default parameter tables of `envs`, separated by blank lines.
pub fn info_document(envs: &[EnvId]) -> String {
    envs.iter().map(|&e| EnvConfig::defaults(e).format_table(e)).collect::<Vec<_>>().join("\n")
}

/// Upper bound on coins so rejection-sampled placement always succeeds.
pub const MAX_COINS: u32 = 10;

#[derive(Default)]
struct Checker {
    first: Option<EngineError>,
}

impl Checker {
    fn fail(&mut self, key: &str, reason: &str) {
        if self.first.is_none() {
            self.first = Some(EngineError::InvalidParameter { key: key.into(), reason: reason.into() });
        }
    }

    fn common(&mut self, scale: f64, speed: f64) {
        if !(scale > 0.0 && scale <= 1.0) {
            self.fail("agent_scale", "must be in (0, 1]");
        }
        if !(speed.is_finite() && speed > 0.0) {
            self.fail("agent_speed", "must be finite and positive");
        }
    }

    fn at_least(&mut self, key: &str, v: u32, min: u32) {
        if v < min {
            self.fail(key, &format!("must be at least {min}"));
        }
    }

    fn positive(&mut self, key: &str, v: f64) {
        if !(v.is_finite() && v > 0.0) {
            self.fail(key, "must be finite and positive");
        }
    }

    fn finite(&mut self, key: &str, v: f64) {
        if !v.is_finite() {
            self.fail(key, "must be finite");
        }
    }

    fn choices(&mut self, key: &str, v: &[u32], min: u32) {
        if v.is_empty() {
            self.fail(key, "choice list must not be empty");
        } else if v.iter().any(|&c| c < min) {
            self.fail(key, &format!("every choice must be at least {min}"));
        }
    }

    fn range(&mut self, key: &str, r: UniformRange) {
        if !(r.0.is_finite() && r.1.is_finite() && r.0 > 0.0 && r.0 <= r.1) {
            self.fail(key, "range must satisfy 0 < low <= high");
        }
    }

    fn available_commands(&mut self, n: u32, grid: bool) {
        match (n, grid) {
            (5, _) | (9, false) => {}
            (9, true) => self.fail("no_available_commands", "grid locomotion cannot reach diagonal tiles"),
            _ => self.fail("no_available_commands", "must be 5 or 9"),
        }
    }

    fn light_threshold(&mut self, v: u32) {
        if v > 255 {
            self.fail("light_threshold", "must be at most 255");
        }
    }

    fn finish(self) -> Result<()> {
        match self.first {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_names_roundtrip() {
        for env in EnvId::ALL {
            assert_eq!(env.name().parse::<EnvId>().unwrap(), env);
        }
        assert!("Pong".parse::<EnvId>().is_err());
    }

    #[test]
    fn defaults_validate() {
        for env in EnvId::ALL {
            EnvConfig::defaults(env).validate(env).unwrap();
        }
    }

    #[test]
    fn grid_overrides() {
        let EnvConfig::MortarMayhem(c) = EnvConfig::defaults(EnvId::MortarMayhemGrid) else {
            panic!()
        };
        assert_eq!((c.no_available_commands, c.execution_duration[0], c.execution_delay[0]), (5, 2, 6));
        let EnvConfig::MysteryPath(c) = EnvConfig::defaults(EnvId::MysteryPathGrid) else { panic!() };
        assert_eq!(c.max_episode_length, 128);
        assert_eq!(c.reward_path_progress, 0.0);
    }

    #[test]
    fn json_overrides_merge_onto_defaults() {
        let c = EnvConfig::from_json(EnvId::MortarMayhem, r#"{"no_commands": [3, 5]}"#).unwrap();
        let EnvConfig::MortarMayhem(c) = c else { panic!() };
        assert_eq!(c.no_commands, vec![3, 5]);
        assert_eq!(c.execution_delay, vec![18]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = EnvConfig::from_json(EnvId::MysteryPath, r#"{"agent_sped": 2}"#).unwrap_err();
        assert!(matches!(err, EngineError::UnknownConfigKey { .. }));
        // A key from another family is unknown too.
        let err = EnvConfig::from_json(EnvId::MysteryPath, r#"{"arena_size": 5}"#).unwrap_err();
        assert!(matches!(err, EngineError::UnknownConfigKey { .. }));
    }

    #[test]
    fn out_of_domain_values_are_rejected() {
        for (env, doc) in [
            (EnvId::MortarMayhem, r#"{"no_commands": []}"#),
            (EnvId::MortarMayhem, r#"{"execution_duration": [0]}"#),
            (EnvId::MortarMayhemGrid, r#"{"no_available_commands": 9}"#),
            (EnvId::MysteryPath, r#"{"cardinal_origin_choice": [4]}"#),
            (EnvId::SearingSpotlights, r#"{"spotlight_radius": [5.0, 1.0]}"#),
            (EnvId::SearingSpotlights, r#"{"agent_health": 0}"#),
            (EnvId::EndlessMysteryPath, r#"{"stamina_level": 0}"#),
        ] {
            assert!(
                matches!(EnvConfig::from_json(env, doc), Err(EngineError::InvalidParameter { .. })),
                "{env} accepted {doc}"
            );
        }
    }

    #[test]
    fn json_roundtrip_preserves_config() {
        for env in EnvId::ALL {
            let c = EnvConfig::defaults(env);
            assert_eq!(EnvConfig::from_json(env, &c.to_json()).unwrap(), c);
        }
    }

    #[test]
    fn keys_match_display_names() {
        for env in EnvId::ALL {
            let config = EnvConfig::defaults(env);
            let value = config.to_value();
            let keys: Vec<&String> = value.as_object().unwrap().keys().collect();
            let rows = config.parameter_rows();
            assert_eq!(keys.len(), rows.len(), "{env}");
            for row in rows {
                let derived: String = row
                    .name
                    .chars()
                    .filter(|c| c.is_alphanumeric() || *c == ' ')
                    .collect::<String>()
                    .to_lowercase()
                    .replace(' ', "_");
                assert_eq!(derived, row.key, "{env}");
                assert!(value.get(row.key).is_some(), "{env}: {}", row.key);
            }
        }
    }
}
