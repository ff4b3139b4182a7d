//! Mortar Mayhem: memorize a sequence of movement commands, then execute it.
//!
//! The finite variants show every command first (Clue Task) and then ask
//! for their execution (Act Task). The Act variants skip the Clue Task and
//! expose the sequence as a one-hot vector instead. The endless variant
//! alternates: round `k` shows command `k` once, then the agent executes
//! commands `1..=k` from wherever it stands on a torus-shaped arena.
//!
//! Timing: each command is executed for `execution_duration` steps; at the
//! start of the following step the agent's tile is evaluated and the
//! evaluation step is the first of `execution_delay` feedback steps, during
//! which the agent cannot move. Grid agents may still rotate whenever they
//! cannot move. With this convention a fully successful finite episode lasts
//! exactly [`mm_max_episode_length`] steps.

use serde::{Deserialize, Serialize};

use crate::action::{Action, ActionGrid};
use crate::agent::{wrap_torus, AgentState, Bounds, Vec2};
use crate::config::{CommandTiming, EndlessMortarMayhemConfig, EnvConfig, EnvId, MortarMayhemConfig};
use crate::engine::{Info, Simulation, Transition};
use crate::error::{EngineError, Result};
use crate::render::{draw_agent, palette, raster, Frame, Scene, View, FRAME_WIDTH};
use crate::rng::Rng;

/// Endless arena: 5x5 tiles stretched over the whole screen.
pub const ENDLESS_ARENA_TILES: i32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Command {
    Stay,
    North,
    NorthEast,
    East,
    SouthEast,
    South,
    SouthWest,
    West,
    NorthWest,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Stay,
        Command::North,
        Command::NorthEast,
        Command::East,
        Command::SouthEast,
        Command::South,
        Command::SouthWest,
        Command::West,
        Command::NorthWest,
    ];

    /// The restricted alphabet of grid variants: no diagonals.
    pub const CARDINAL: [Command; 5] =
        [Command::Stay, Command::North, Command::East, Command::South, Command::West];

    pub fn alphabet(available: u32) -> &'static [Command] {
        if available == 5 {
            &Self::CARDINAL
        } else {
            &Self::ALL
        }
    }

    /// Tile offset `(dx, dy)` in screen axes.
    pub fn offset(self) -> (i32, i32) {
        match self {
            Command::Stay => (0, 0),
            Command::North => (0, -1),
            Command::NorthEast => (1, -1),
            Command::East => (1, 0),
            Command::SouthEast => (1, 1),
            Command::South => (0, 1),
            Command::SouthWest => (-1, 1),
            Command::West => (-1, 0),
            Command::NorthWest => (-1, -1),
        }
    }

    pub fn is_diagonal(self) -> bool {
        let (dx, dy) = self.offset();
        dx != 0 && dy != 0
    }
}

/// Tile coordinates `(column, row)`.
pub type Tile = (i32, i32);

/// Draws `count` commands i.i.d. from the alphabet of size `available`.
///
/// With `bounds = Some((origin, arena_size))`, commands that would leave the
/// arena from `origin` are rejected and redrawn.
pub fn sample_commands(
    rng: &mut Rng,
    count: usize,
    available: u32,
    bounds: Option<(Tile, i32)>,
) -> Vec<Command> {
    let alphabet = Command::alphabet(available);
    (0..count)
        .map(|_| loop {
            let c = *rng.choose(alphabet);
            match bounds {
                Some(((x, y), size)) => {
                    let (dx, dy) = c.offset();
                    let (tx, ty) = (x + dx, y + dy);
                    if (0..size).contains(&tx) && (0..size).contains(&ty) {
                        break c;
                    }
                }
                None => break c,
            }
        })
        .collect()
}

/// Maximum length of a finite episode:
///
/// ```text
/// clue   = (show_duration + show_delay) * n
/// exec   = (execution_duration + execution_delay) * n
/// act    = exec - execution_delay + 1
/// max    = clue + act
/// ```
///
/// Act variants have no Clue Task, so their maximum is `act`.
pub fn mm_max_episode_length(env: EnvId, config: &EnvConfig) -> Result<u64> {
    let EnvConfig::MortarMayhem(c) = config else {
        return Err(EngineError::InvalidParameter {
            key: "max_episode_length".into(),
            reason: format!("{env} episodes are unbounded"),
        });
    };
    let pick = |v: &[u32]| v.iter().copied().max().unwrap_or(0) as u64;
    let n = pick(&c.no_commands);
    let timing = CommandTiming {
        show_duration: pick(&c.command_show_duration) as u32,
        show_delay: pick(&c.command_show_delay) as u32,
        execution_duration: pick(&c.execution_duration) as u32,
        execution_delay: pick(&c.execution_delay) as u32,
    };
    let act_only = matches!(env, EnvId::MortarMayhemAct | EnvId::MortarMayhemActGrid);
    Ok(episode_length_bound(n, timing, act_only))
}

/// Length of a fully successful episode for a concrete draw.
pub fn episode_length_bound(n: u64, t: CommandTiming, act_only: bool) -> u64 {
    let clue = (t.show_duration as u64 + t.show_delay as u64) * n;
    let execution = (t.execution_duration as u64 + t.execution_delay as u64) * n;
    let act = execution - t.execution_delay as u64 + 1;
    if act_only {
        act
    } else {
        clue + act
    }
}

/// Success test: the agent's tile equals the origin displaced by `command`.
/// `torus_size` wraps the target on the endless arena.
pub fn evaluate_execution(agent: Tile, origin: Tile, command: Command, torus_size: Option<i32>) -> bool {
    agent == target_tile(origin, command, torus_size)
}

pub fn target_tile(origin: Tile, command: Command, torus_size: Option<i32>) -> Tile {
    let (dx, dy) = command.offset();
    let (x, y) = (origin.0 + dx, origin.1 + dy);
    match torus_size {
        Some(n) => (x.rem_euclid(n), y.rem_euclid(n)),
        None => (x, y),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MmPhase {
    ShowCommand { index: usize, remaining: u32 },
    ShowDelay { index: usize, remaining: u32 },
    Execute { index: usize, remaining: u32 },
    EvalFeedback { index: usize, remaining: u32 },
    Finished,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feedback {
    pub target: Tile,
    pub agent: Tile,
    pub success: bool,
}

/// Tile layout in screen space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArenaGeometry {
    pub tiles: i32,
    pub tile_size: f64,
    pub offset: f64,
    pub torus: bool,
}

impl ArenaGeometry {
    /// Finite arena: `tiles x tiles` floor centered on screen with a
    /// one-tile border.
    fn finite(tiles: i32) -> Self {
        let tile_size = FRAME_WIDTH as f64 / (tiles + 2) as f64;
        Self { tiles, tile_size, offset: tile_size, torus: false }
    }

    fn endless() -> Self {
        Self {
            tiles: ENDLESS_ARENA_TILES,
            tile_size: FRAME_WIDTH as f64 / ENDLESS_ARENA_TILES as f64,
            offset: 0.0,
            torus: true,
        }
    }

    pub fn tile_center(&self, (x, y): Tile) -> Vec2 {
        Vec2::new(
            self.offset + (x as f64 + 0.5) * self.tile_size,
            self.offset + (y as f64 + 0.5) * self.tile_size,
        )
    }

    pub fn tile_of(&self, p: Vec2) -> Tile {
        let f = |v: f64| (((v - self.offset) / self.tile_size).floor() as i32).clamp(0, self.tiles - 1);
        (f(p.x), f(p.y))
    }

    pub fn center_tile(&self) -> Tile {
        (self.tiles / 2, self.tiles / 2)
    }

    fn extent(&self) -> f64 {
        self.tiles as f64 * self.tile_size
    }

    fn torus_size(&self) -> Option<i32> {
        self.torus.then_some(self.tiles)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct MmParams {
    endless: bool,
    act_only: bool,
    grid: bool,
    available: u32,
    timing: CommandTiming,
    show_visual_feedback: bool,
    reward_success: f64,
    reward_failure: f64,
    reward_episode_success: f64,
    /// `None` for unbounded episodes.
    max_episode_length: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct MortarMayhem {
    params: MmParams,
    geometry: ArenaGeometry,
    rng: Rng,
    agent: AgentState,
    commands: Vec<Command>,
    phase: MmPhase,
    origin: Tile,
    completed: u32,
    round: u32,
    feedback: Option<Feedback>,
    steps: u64,
}

impl MortarMayhem {
    pub fn finite(env: EnvId, c: &MortarMayhemConfig, seed: u64) -> Self {
        let mut rng = Rng::new(seed);
        let (n, timing) = c.sample(&mut rng);
        let geometry = ArenaGeometry::finite(c.arena_size as i32);
        let act_only = matches!(env, EnvId::MortarMayhemAct | EnvId::MortarMayhemActGrid);
        let params = MmParams {
            endless: false,
            act_only,
            grid: env.is_grid(),
            available: c.no_available_commands,
            timing,
            show_visual_feedback: c.show_visual_feedback,
            reward_success: c.reward_command_success,
            reward_failure: c.reward_command_failure,
            reward_episode_success: c.reward_episode_success,
            max_episode_length: None,
        };
        let center = geometry.center_tile();
        let commands = sample_commands(&mut rng, n as usize, c.no_available_commands, Some((center, geometry.tiles)));
        let agent = AgentState::new(geometry.tile_center(center), c.agent_speed, c.agent_scale * geometry.tile_size);
        let phase = if act_only {
            MmPhase::Execute { index: 0, remaining: timing.execution_duration }
        } else {
            MmPhase::ShowCommand { index: 0, remaining: timing.show_duration }
        };
        Self {
            params,
            geometry,
            rng,
            agent,
            commands,
            phase,
            origin: center,
            completed: 0,
            round: 0,
            feedback: None,
            steps: 0,
        }
    }

    pub fn endless(c: &EndlessMortarMayhemConfig, seed: u64) -> Self {
        let mut rng = Rng::new(seed);
        let timing = c.sample(&mut rng);
        let geometry = ArenaGeometry::endless();
        let params = MmParams {
            endless: true,
            act_only: false,
            grid: false,
            available: c.no_available_commands,
            timing,
            show_visual_feedback: c.show_visual_feedback,
            reward_success: c.reward_command_success,
            reward_failure: c.reward_command_failure,
            reward_episode_success: 0.0,
            max_episode_length: (c.max_episode_length > 0).then_some(c.max_episode_length as u64),
        };
        let center = geometry.center_tile();
        let commands = sample_commands(&mut rng, 1, c.no_available_commands, None);
        let agent = AgentState::new(geometry.tile_center(center), c.agent_speed, c.agent_scale * geometry.tile_size);
        Self {
            params,
            geometry,
            rng,
            agent,
            commands,
            phase: MmPhase::ShowCommand { index: 0, remaining: timing.show_duration },
            origin: center,
            completed: 0,
            round: 1,
            feedback: None,
            steps: 0,
        }
    }

    pub fn commands(&self) -> &[Command] {
        &self.commands
    }

    pub fn phase(&self) -> MmPhase {
        self.phase
    }

    pub fn agent(&self) -> &AgentState {
        &self.agent
    }

    pub fn geometry(&self) -> &ArenaGeometry {
        &self.geometry
    }

    pub fn timing(&self) -> CommandTiming {
        self.params.timing
    }

    pub fn is_endless(&self) -> bool {
        self.params.endless
    }

    pub fn is_grid(&self) -> bool {
        self.params.grid
    }

    pub fn origin(&self) -> Tile {
        self.origin
    }

    pub fn agent_tile(&self) -> Tile {
        self.geometry.tile_of(self.agent.position)
    }

    pub fn commands_completed(&self) -> u32 {
        self.completed
    }

    /// Current round of the endless variant (0 for finite variants).
    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn feedback(&self) -> Option<Feedback> {
        self.feedback
    }

    /// Target tile of the command currently being executed.
    pub fn current_target(&self) -> Option<Tile> {
        match self.phase {
            MmPhase::Execute { index, .. } => {
                Some(target_tile(self.origin, self.commands[index], self.geometry.torus_size()))
            }
            _ => None,
        }
    }

    /// Length of a fully successful episode for this episode's draw.
    pub fn max_episode_length(&self) -> Option<u64> {
        if self.params.endless {
            self.params.max_episode_length
        } else {
            Some(episode_length_bound(self.commands.len() as u64, self.params.timing, self.params.act_only))
        }
    }

    fn enter_execute(&mut self, index: usize) {
        if !self.params.endless {
            let center = self.geometry.center_tile();
            self.agent.position = self.geometry.tile_center(center);
            self.origin = center;
        } else {
            self.origin = self.agent_tile();
        }
        self.feedback = None;
        self.phase = MmPhase::Execute { index, remaining: self.params.timing.execution_duration };
    }

    /// Successor of a phase whose countdown reached zero.
    fn advance(&mut self) {
        let t = self.params.timing;
        match self.phase {
            MmPhase::ShowCommand { index, .. } => {
                self.phase = MmPhase::ShowDelay { index, remaining: t.show_delay };
            }
            MmPhase::ShowDelay { index, .. } => {
                if !self.params.endless && index + 1 < self.commands.len() {
                    self.phase = MmPhase::ShowCommand { index: index + 1, remaining: t.show_duration };
                } else {
                    self.enter_execute(0);
                }
            }
            MmPhase::EvalFeedback { index, .. } => {
                if !self.params.endless || index + 1 < self.round as usize {
                    self.enter_execute(index + 1);
                } else {
                    self.round += 1;
                    let next = sample_commands(&mut self.rng, 1, self.params.available, None);
                    self.commands.extend(next);
                    self.feedback = None;
                    self.phase = MmPhase::ShowCommand { index: self.commands.len() - 1, remaining: t.show_duration };
                }
            }
            MmPhase::Execute { .. } | MmPhase::Finished => {}
        }
    }

    /// Skips zero-length phases so the state always rests in a phase that
    /// consumes the next step.
    fn settle(&mut self) {
        loop {
            match self.phase {
                MmPhase::ShowCommand { remaining: 0, .. }
                | MmPhase::ShowDelay { remaining: 0, .. }
                | MmPhase::EvalFeedback { remaining: 0, .. } => self.advance(),
                _ => break,
            }
        }
    }

    fn evaluate(&mut self, index: usize) -> Transition {
        let target = target_tile(self.origin, self.commands[index], self.geometry.torus_size());
        let agent = self.agent_tile();
        if self.params.endless {
            // Keep the tile, drop the sub-tile offset.
            self.agent.position = self.geometry.tile_center(agent);
        }
        let success = agent == target;
        self.feedback = Some(Feedback { target, agent, success });
        let mut t = Transition::default();
        if success {
            self.completed += 1;
            t.reward += self.params.reward_success;
            if !self.params.endless && index + 1 == self.commands.len() {
                t.reward += self.params.reward_episode_success;
                t.done = true;
            }
        } else {
            t.reward += self.params.reward_failure;
            t.done = true;
        }
        if t.done {
            self.phase = MmPhase::Finished;
        } else {
            self.phase = MmPhase::EvalFeedback { index, remaining: self.params.timing.execution_delay };
            self.settle();
        }
        t
    }

    fn move_agent(&mut self, action: Action) {
        match action {
            Action::MultiDiscrete(a) => {
                let p = self.agent.apply_continuous(a);
                self.agent.position = if self.geometry.torus {
                    wrap_torus(p, self.geometry.extent())
                } else {
                    let arena = Bounds::new(
                        self.geometry.offset,
                        self.geometry.offset,
                        self.geometry.offset + self.geometry.extent(),
                        self.geometry.offset + self.geometry.extent(),
                    );
                    arena.shrink(self.agent.radius).clamp(p)
                };
            }
            Action::Grid(a) => {
                if self.agent.apply_grid_rotation(a) {
                    let (x, y) = self.agent_tile();
                    let (dx, dy) = self.agent.facing.step();
                    let next = (x + dx, y + dy);
                    let n = self.geometry.tiles;
                    if (0..n).contains(&next.0) && (0..n).contains(&next.1) {
                        self.agent.position = self.geometry.tile_center(next);
                    }
                }
            }
        }
    }

    fn render_command(&self, frame: &mut Frame, command: Command, half: i32, color: crate::render::Rgb) {
        let c = (FRAME_WIDTH / 2) as i32;
        if command == Command::Stay {
            raster::fill_disc(frame, c as f64, c as f64, half as f64 * 0.5, color);
        } else {
            raster::draw_arrow(frame, (c, c), command.offset(), half, color);
        }
    }

    fn fill_tile(&self, frame: &mut Frame, (x, y): Tile, color: crate::render::Rgb) {
        let g = &self.geometry;
        let x0 = g.offset + x as f64 * g.tile_size;
        let y0 = g.offset + y as f64 * g.tile_size;
        raster::fill_rect_f(frame, x0, y0, x0 + g.tile_size, y0 + g.tile_size, color);
    }
}

impl Simulation for MortarMayhem {
    fn step(&mut self, action: Action) -> Transition {
        self.steps += 1;
        let mut t = Transition::default();
        if let MmPhase::Execute { index, remaining: 0 } = self.phase {
            t = self.evaluate(index);
            if t.done {
                return t;
            }
        }
        match self.phase {
            MmPhase::Execute { index, remaining } => {
                self.move_agent(action);
                self.phase = MmPhase::Execute { index, remaining: remaining - 1 };
            }
            MmPhase::ShowCommand { remaining, .. }
            | MmPhase::ShowDelay { remaining, .. }
            | MmPhase::EvalFeedback { remaining, .. } => {
                if let Action::Grid(a) = action {
                    if a != ActionGrid::Forward {
                        self.agent.apply_grid_rotation(a);
                    }
                }
                let remaining = remaining - 1;
                self.phase = match self.phase {
                    MmPhase::ShowCommand { index, .. } => MmPhase::ShowCommand { index, remaining },
                    MmPhase::ShowDelay { index, .. } => MmPhase::ShowDelay { index, remaining },
                    MmPhase::EvalFeedback { index, .. } => MmPhase::EvalFeedback { index, remaining },
                    other => other,
                };
                self.settle();
            }
            MmPhase::Finished => {}
        }
        if let Some(max) = self.params.max_episode_length {
            if self.steps >= max {
                t.done = true;
                self.phase = MmPhase::Finished;
            }
        }
        t
    }

    fn info(&self) -> Info {
        let mut info = Info::new();
        info.insert("commands_completed".into(), self.completed as f64);
        info.insert("round".into(), self.round as f64);
        info
    }

    fn max_step_reward(&self) -> f64 {
        let success = self.params.reward_success + self.params.reward_episode_success.max(0.0);
        success.max(self.params.reward_failure).max(0.0)
    }

    fn vector_observation(&self) -> Option<Vec<f32>> {
        if !self.params.act_only {
            return None;
        }
        let alphabet = Command::alphabet(self.params.available);
        let mut v = vec![0.0f32; self.commands.len() * alphabet.len()];
        for (i, c) in self.commands.iter().enumerate() {
            let j = alphabet.iter().position(|a| a == c).expect("command drawn from alphabet");
            v[i * alphabet.len() + j] = 1.0;
        }
        Some(v)
    }
}

impl Scene for MortarMayhem {
    fn draw(&self, view: View, frame: &mut Frame) {
        let g = &self.geometry;
        if !g.torus {
            raster::fill_rect(frame, 0, 0, 84, 84, palette::ARENA_BORDER);
        }
        for ty in 0..g.tiles {
            for tx in 0..g.tiles {
                let color = if (tx + ty) % 2 == 0 { palette::TILE_LIGHT } else { palette::TILE_DARK };
                self.fill_tile(frame, (tx, ty), color);
            }
        }
        if let Some(fb) = self.feedback {
            if self.params.show_visual_feedback || view == View::GroundTruth {
                if fb.success {
                    self.fill_tile(frame, fb.target, palette::FEEDBACK_SUCCESS);
                } else {
                    self.fill_tile(frame, fb.agent, palette::FEEDBACK_FAILURE);
                }
            }
        }
        if view == View::GroundTruth {
            if let Some(target) = self.current_target() {
                let c = g.tile_center(target);
                raster::stroke_circle(frame, c.x, c.y, g.tile_size * 0.4, palette::TARGET);
                raster::stroke_circle(frame, c.x, c.y, g.tile_size * 0.4 - 1.0, palette::TARGET);
            }
        }
        let p = self.agent.position;
        if g.torus {
            let e = g.extent();
            for ox in [-e, 0.0, e] {
                for oy in [-e, 0.0, e] {
                    draw_agent(frame, Vec2::new(p.x + ox, p.y + oy), self.agent.radius, self.agent.facing);
                }
            }
        } else {
            draw_agent(frame, p, self.agent.radius, self.agent.facing);
        }
        match self.phase {
            MmPhase::ShowCommand { index, .. } => {
                self.render_command(frame, self.commands[index], 14, palette::COMMAND);
            }
            MmPhase::Execute { index, .. } if view == View::GroundTruth => {
                self.render_command(frame, self.commands[index], 6, palette::COMMAND);
            }
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::ActionMultiDiscrete;
    use crate::engine::EpisodeState;

    fn timing(sd: u32, sdel: u32, ed: u32, edel: u32) -> CommandTiming {
        CommandTiming { show_duration: sd, show_delay: sdel, execution_duration: ed, execution_delay: edel }
    }

    #[test]
    fn max_length_defaults() {
        // Hand evaluation: clue (3+1)*10 = 40, exec (6+18)*10 = 240,
        // act 240-18+1 = 223, max 263.
        let mm = mm_max_episode_length(EnvId::MortarMayhem, &EnvConfig::defaults(EnvId::MortarMayhem)).unwrap();
        assert_eq!(mm, 263);
        // clue 40, exec (2+6)*10 = 80, act 75, max 115.
        let grid =
            mm_max_episode_length(EnvId::MortarMayhemGrid, &EnvConfig::defaults(EnvId::MortarMayhemGrid)).unwrap();
        assert_eq!(grid, 115);
        // clue 1, exec 1, act 2, max 3.
        assert_eq!(episode_length_bound(1, timing(1, 0, 1, 0), false), 3);
    }

    #[test]
    fn max_length_rejects_endless() {
        let env = EnvId::EndlessMortarMayhem;
        assert!(mm_max_episode_length(env, &EnvConfig::defaults(env)).is_err());
    }

    #[test]
    fn sampled_sequences() {
        let mut rng = Rng::new(11);
        let cmds = sample_commands(&mut rng, 10, 9, Some(((2, 2), 5)));
        assert_eq!(cmds.len(), 10);
        let cmds = sample_commands(&mut rng, 500, 5, None);
        assert!(cmds.iter().all(|c| !c.is_diagonal()));
        let a = sample_commands(&mut Rng::new(3), 20, 9, None);
        let b = sample_commands(&mut Rng::new(3), 20, 9, None);
        assert_eq!(a, b);
    }

    #[test]
    fn boundary_commands_are_redrawn() {
        let mut rng = Rng::new(5);
        // From the top-left corner only Stay, East, SouthEast and South stay inside.
        let cmds = sample_commands(&mut rng, 300, 9, Some(((0, 0), 3)));
        for c in cmds {
            assert!(matches!(c, Command::Stay | Command::East | Command::SouthEast | Command::South));
        }
    }

    #[test]
    fn evaluation_cases() {
        assert!(evaluate_execution((2, 2), (2, 2), Command::Stay, None));
        assert!(!evaluate_execution((2, 2), (2, 2), Command::North, None));
        assert!(evaluate_execution((2, 1), (2, 2), Command::North, None));
        assert!(evaluate_execution((4, 3), (0, 4), Command::NorthWest, Some(5)));
        assert!(evaluate_execution((0, 0), (4, 4), Command::SouthEast, Some(5)));
    }

    #[test]
    fn default_reset_has_ten_commands() {
        let (ep, _) = EpisodeState::reset_default(EnvId::MortarMayhem, 9).unwrap();
        let crate::engine::EnvState::MortarMayhem(mm) = ep.state() else { panic!() };
        assert_eq!(mm.commands().len(), 10);
    }

    #[test]
    fn grid_noop_during_clue_is_immobile_and_unrewarded() {
        let (mut ep, _) = EpisodeState::reset_default(EnvId::MortarMayhemGrid, 42).unwrap();
        let start = match ep.state() {
            crate::engine::EnvState::MortarMayhem(mm) => mm.agent().position,
            _ => unreachable!(),
        };
        for _ in 0..40 {
            let r = ep.step(ActionGrid::Forward).unwrap();
            assert_eq!(r.reward, 0.0);
        }
        let crate::engine::EnvState::MortarMayhem(mm) = ep.state() else { panic!() };
        assert_eq!(mm.agent().position, start);
        assert!(matches!(mm.phase(), MmPhase::Execute { index: 0, .. }));
    }

    #[test]
    fn show_phase_ignores_movement() {
        let (mut ep, _) = EpisodeState::reset_default(EnvId::EndlessMortarMayhem, 1).unwrap();
        let before = match ep.state() {
            crate::engine::EnvState::MortarMayhem(mm) => mm.agent().position,
            _ => unreachable!(),
        };
        for _ in 0..4 {
            ep.step(ActionMultiDiscrete::new(2, 2).unwrap()).unwrap();
        }
        let crate::engine::EnvState::MortarMayhem(mm) = ep.state() else { panic!() };
        assert_eq!(mm.agent().position, before);
    }

    #[test]
    fn standing_still_fails_unless_stay() {
        let (mut ep, _) = EpisodeState::reset_default(EnvId::MortarMayhem, 77).unwrap();
        let mut steps = 0;
        let mut total = 0.0;
        loop {
            let r = ep.step(ActionMultiDiscrete::NOOP).unwrap();
            steps += 1;
            total += r.reward;
            if r.done {
                break;
            }
        }
        let crate::engine::EnvState::MortarMayhem(mm) = ep.state() else { panic!() };
        let stays = mm.commands().iter().take_while(|&&c| c == Command::Stay).count();
        assert!((total - 0.1 * stays as f64).abs() < 1e-9);
        assert!(steps <= 263);
    }

    #[test]
    fn act_variant_exposes_one_hot_sequence() {
        let (ep, _) = EpisodeState::reset_default(EnvId::MortarMayhemAct, 4).unwrap();
        let v = ep.vector_observation().unwrap();
        assert_eq!(v.len(), 90);
        for chunk in v.chunks(9) {
            assert_eq!(chunk.iter().sum::<f32>(), 1.0);
        }
        let (ep, _) = EpisodeState::reset_default(EnvId::MortarMayhem, 4).unwrap();
        assert!(ep.vector_observation().is_none());
    }

    #[test]
    fn zero_delay_timing_matches_formula() {
        let cfg = EnvConfig::from_json(
            EnvId::MortarMayhem,
            r#"{"no_commands":[1],"command_show_duration":[1],"command_show_delay":[0],
                "execution_duration":[1],"execution_delay":[0]}"#,
        )
        .unwrap();
        let (mut ep, _) = EpisodeState::reset(EnvId::MortarMayhem, cfg, 0).unwrap();
        let stay = match ep.state() {
            crate::engine::EnvState::MortarMayhem(mm) => mm.commands()[0] == Command::Stay,
            _ => unreachable!(),
        };
        let mut steps = 0;
        while !ep.is_done() {
            ep.step(ActionMultiDiscrete::NOOP).unwrap();
            steps += 1;
        }
        // Either outcome evaluates on step 3.
        assert_eq!(steps, 3, "stay={stay}");
    }
}
