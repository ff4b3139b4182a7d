//! Mystery Path: walk an invisible path from origin to goal. Leaving the
//! path drops the agent into a pit and sends it back to the origin.

mod endless;
pub mod generation;

pub use endless::{EndlessMysteryPath, Termination, SEGMENT_WIDTH};
pub use generation::{generate_path, Cell, HiddenPath, PathSpec, Side};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::action::Action;
use crate::agent::{AgentState, Bounds, Facing, Vec2};
use crate::config::{EnvId, MysteryPathConfig};
use crate::engine::{Info, Simulation, Transition};
use crate::error::Result;
use crate::render::{draw_agent, palette, raster, Frame, Rgb, Scene, View};
use crate::rng::Rng;

pub const GRID_SIZE: i32 = 7;
pub const TILE_SIZE: f64 = 12.0;

pub fn cell_of(p: Vec2) -> Cell {
    ((p.x / TILE_SIZE).floor() as i32, (p.y / TILE_SIZE).floor() as i32)
}

pub fn cell_center((x, y): Cell) -> Vec2 {
    Vec2::new((x as f64 + 0.5) * TILE_SIZE, (y as f64 + 0.5) * TILE_SIZE)
}

fn facing_towards(side: Side) -> Facing {
    match side {
        Side::West => Facing::WEST,
        Side::North => Facing::NORTH,
        Side::East => Facing::EAST,
        Side::South => Facing::SOUTH,
    }
}

pub(crate) fn draw_cell(frame: &mut Frame, (x, y): Cell, shift_x: f64, color: Rgb) {
    let x0 = x as f64 * TILE_SIZE - shift_x;
    let y0 = y as f64 * TILE_SIZE;
    raster::fill_rect_f(frame, x0, y0, x0 + TILE_SIZE, y0 + TILE_SIZE, color);
}

pub(crate) fn draw_fall(frame: &mut Frame, p: Vec2) {
    raster::draw_cross(frame, raster::pixel_of(p.x), raster::pixel_of(p.y), 5, palette::FALL_CROSS);
    raster::draw_cross(frame, raster::pixel_of(p.x) + 1, raster::pixel_of(p.y), 5, palette::FALL_CROSS);
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct MpParams {
    grid: bool,
    show_origin: bool,
    show_goal: bool,
    show_visual_feedback: bool,
    reward_goal: f64,
    reward_fall_off: f64,
    reward_path_progress: f64,
    reward_step: f64,
    max_episode_length: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct MysteryPath {
    params: MpParams,
    path: HiddenPath,
    index: HashMap<Cell, usize>,
    agent: AgentState,
    start_facing: Facing,
    visited: Vec<bool>,
    best_index: usize,
    falls: u32,
    /// Set on the step the agent left the path; cleared by the relocation
    /// on the following step.
    fallen_at: Option<Vec2>,
    reached_goal: bool,
    steps: u64,
}

impl MysteryPath {
    pub fn new(env: EnvId, c: &MysteryPathConfig, seed: u64) -> Result<Self> {
        let mut rng = Rng::new(seed);
        let side = Side::from_index(*rng.choose(&c.cardinal_origin_choice));
        let path = generate_path(
            &mut rng,
            PathSpec { width: GRID_SIZE, height: GRID_SIZE, origin_side: side, origin: None, allow_west: true },
        )?;
        let params = MpParams {
            grid: env.is_grid(),
            show_origin: c.show_origin,
            show_goal: c.show_goal,
            show_visual_feedback: c.show_visual_feedback,
            reward_goal: c.reward_goal,
            reward_fall_off: c.reward_fall_off,
            reward_path_progress: c.reward_path_progress,
            reward_step: c.reward_step,
            max_episode_length: (c.max_episode_length > 0).then_some(c.max_episode_length as u64),
        };
        let start_facing = facing_towards(side.opposite());
        let mut agent = AgentState::new(cell_center(path.origin()), c.agent_speed, c.agent_scale * TILE_SIZE);
        agent.facing = start_facing;
        let mut visited = vec![false; path.tiles.len()];
        visited[0] = true;
        Ok(Self {
            params,
            index: path.index_map(),
            path,
            agent,
            start_facing,
            visited,
            best_index: 0,
            falls: 0,
            fallen_at: None,
            reached_goal: false,
            steps: 0,
        })
    }

    pub fn path(&self) -> &HiddenPath {
        &self.path
    }

    pub fn agent(&self) -> &AgentState {
        &self.agent
    }

    pub fn is_grid(&self) -> bool {
        self.params.grid
    }

    pub fn agent_cell(&self) -> Cell {
        cell_of(self.agent.position)
    }

    /// Path index of the agent's cell, `None` over a pit.
    pub fn path_index(&self) -> Option<usize> {
        self.index.get(&self.agent_cell()).copied()
    }

    pub fn best_index(&self) -> usize {
        self.best_index
    }

    pub fn is_falling(&self) -> bool {
        self.fallen_at.is_some()
    }

    fn move_agent(&mut self, action: Action) {
        match action {
            Action::MultiDiscrete(a) => {
                let p = self.agent.apply_continuous(a);
                let bounds = Bounds::new(0.0, 0.0, GRID_SIZE as f64 * TILE_SIZE, GRID_SIZE as f64 * TILE_SIZE);
                self.agent.position = bounds.shrink(self.agent.radius).clamp(p);
            }
            Action::Grid(a) => {
                if self.agent.apply_grid_rotation(a) {
                    let (dx, dy) = self.agent.facing.step();
                    let (cx, cy) = self.agent_cell();
                    let next = (cx + dx, cy + dy);
                    if (0..GRID_SIZE).contains(&next.0) && (0..GRID_SIZE).contains(&next.1) {
                        self.agent.position = cell_center(next);
                    }
                }
            }
        }
    }
}

impl Simulation for MysteryPath {
    fn step(&mut self, action: Action) -> Transition {
        self.steps += 1;
        let mut t = Transition { reward: self.params.reward_step, done: false };
        if self.fallen_at.take().is_some() {
            self.agent.position = cell_center(self.path.origin());
            self.agent.facing = self.start_facing;
        } else {
            self.move_agent(action);
            match self.path_index() {
                Some(i) => {
                    if !self.visited[i] {
                        self.visited[i] = true;
                        t.reward += self.params.reward_path_progress;
                    }
                    self.best_index = self.best_index.max(i);
                    if i + 1 == self.path.tiles.len() {
                        t.reward += self.params.reward_goal;
                        self.reached_goal = true;
                        t.done = true;
                    }
                }
                None => {
                    t.reward += self.params.reward_fall_off;
                    self.falls += 1;
                    self.fallen_at = Some(self.agent.position);
                }
            }
        }
        if let Some(max) = self.params.max_episode_length {
            if self.steps >= max {
                t.done = true;
            }
        }
        t
    }

    fn info(&self) -> Info {
        let mut info = Info::new();
        info.insert("best_progress".into(), self.best_index as f64);
        info.insert("falls".into(), self.falls as f64);
        info.insert("tiles_visited".into(), self.visited.iter().filter(|&&v| v).count() as f64);
        info.insert("goal_reached".into(), if self.reached_goal { 1.0 } else { 0.0 });
        info
    }

    fn max_step_reward(&self) -> f64 {
        let p = &self.params;
        let on_path = p.reward_path_progress.max(0.0) + p.reward_goal.max(0.0);
        p.reward_step + on_path.max(p.reward_fall_off).max(0.0)
    }
}

impl Scene for MysteryPath {
    fn draw(&self, view: View, frame: &mut Frame) {
        let gt = view == View::GroundTruth;
        if gt {
            for &w in &self.path.walls {
                draw_cell(frame, w, 0.0, palette::PATH_WALL);
            }
            for &c in &self.path.tiles {
                draw_cell(frame, c, 0.0, palette::PATH_TILE);
            }
        }
        if gt || self.params.show_origin {
            draw_cell(frame, self.path.origin(), 0.0, palette::PATH_ORIGIN);
        }
        if gt || self.params.show_goal {
            draw_cell(frame, self.path.goal(), 0.0, palette::PATH_GOAL);
        }
        draw_agent(frame, self.agent.position, self.agent.radius, self.agent.facing);
        if let Some(p) = self.fallen_at {
            if gt || self.params.show_visual_feedback {
                draw_fall(frame, p);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{ActionGrid, ActionMultiDiscrete};
    use crate::config::EnvConfig;
    use crate::engine::{EnvState, EpisodeState};

    fn mp(state: &EpisodeState) -> &MysteryPath {
        match state.state() {
            EnvState::MysteryPath(m) => m,
            _ => unreachable!(),
        }
    }

    fn step_towards(from: Vec2, to: Vec2) -> ActionMultiDiscrete {
        let d = |a: f64, b: f64| if b > a + 1e-9 { 2 } else if b < a - 1e-9 { 0 } else { 1 };
        ActionMultiDiscrete::new(d(from.x, to.x), d(from.y, to.y)).unwrap()
    }

    #[test]
    fn origin_counts_as_visited() {
        let (s, _) = EpisodeState::reset_default(EnvId::MysteryPath, 4).unwrap();
        assert_eq!(s.info()["tiles_visited"], 1.0);
        assert_eq!(mp(&s).path_index(), Some(0));
    }

    #[test]
    fn following_the_path_reaches_the_goal() {
        for seed in 0..20 {
            let (mut s, _) = EpisodeState::reset_default(EnvId::MysteryPath, seed).unwrap();
            let tiles = mp(&s).path().tiles.clone();
            let mut total = 0.0;
            let mut k = 1;
            loop {
                let a = step_towards(mp(&s).agent().position, cell_center(tiles[k]));
                let r = s.step(a).unwrap();
                total += r.reward;
                assert!(!mp(&s).is_falling(), "seed {seed}");
                if r.done {
                    break;
                }
                if mp(&s).agent().position.distance_squared(cell_center(tiles[k])) < 1e-12 {
                    k += 1;
                }
            }
            let expected = 0.1 * (tiles.len() - 1) as f64 + 1.0;
            assert!((total - expected).abs() < 1e-9, "seed {seed}: {total} vs {expected}");
        }
    }

    #[test]
    fn fall_shows_cross_then_relocates() {
        let (mut s, _) = EpisodeState::reset_default(EnvId::MysteryPathGrid, 8).unwrap();
        // Walk forward until falling; rotate towards a pit first if needed.
        let m = mp(&s).clone();
        let (ox, oy) = m.path().origin();
        let pit = [(0, 1), (1, 0), (0, -1), (-1, 0)]
            .into_iter()
            .map(|(dx, dy)| (ox + dx, oy + dy))
            .find(|c| (0..7).contains(&c.0) && (0..7).contains(&c.1) && !m.path().tiles.contains(c))
            .expect("origin has a pit neighbor");
        while {
            let (fx, fy) = mp(&s).agent().facing.step();
            (ox + fx, oy + fy) != pit
        } {
            s.step(ActionGrid::RotateRight).unwrap();
        }
        s.step(ActionGrid::Forward).unwrap();
        assert!(mp(&s).is_falling());
        let cross = s.render_observation();
        assert!(cross.pixels().any(|(_, _, c)| c == palette::FALL_CROSS));
        s.step(ActionGrid::Forward).unwrap();
        assert!(!mp(&s).is_falling());
        assert_eq!(mp(&s).agent_cell(), (ox, oy));
        assert_eq!(s.info()["falls"], 1.0);
    }

    #[test]
    fn observation_hides_path() {
        let (s, obs) = EpisodeState::reset_default(EnvId::MysteryPath, 2).unwrap();
        assert!(!obs.pixels().any(|(_, _, c)| c == palette::PATH_TILE));
        let gt = s.render_ground_truth();
        assert!(gt.pixels().any(|(_, _, c)| c == palette::PATH_TILE));
        assert!(gt.pixels().any(|(_, _, c)| c == palette::PATH_GOAL));
    }

    #[test]
    fn grid_timeout() {
        let (mut s, _) = EpisodeState::reset_default(EnvId::MysteryPathGrid, 1).unwrap();
        let mut n = 0;
        while !s.step(ActionGrid::NoOp).unwrap().done {
            n += 1;
        }
        assert_eq!(n + 1, 128);
        let _ = EnvConfig::defaults(EnvId::MysteryPathGrid);
    }
}
