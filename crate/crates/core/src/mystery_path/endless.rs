//! Endless Mystery Path: an ever-extending path that only runs to the right,
//! seen through a camera that follows the agent.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::generation::{generate_path, Cell, PathSpec, Side};
use super::{cell_center, cell_of, draw_cell, draw_fall, TILE_SIZE};
use crate::action::{Action, ActionMultiDiscrete};
use crate::agent::Vec2;
use crate::agent::{AgentState, Facing};
use crate::config::EndlessMysteryPathConfig;
use crate::engine::{Info, Simulation, Transition};
use crate::error::Result;
use crate::render::{draw_agent, palette, raster, Frame, Scene, View};
use crate::rng::Rng;

/// Columns per generated segment; consecutive segments are joined by one
/// transition column.
pub const SEGMENT_WIDTH: i32 = 7;
pub const ROWS: i32 = 7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct EmpParams {
    show_origin: bool,
    show_past_path: bool,
    show_background: bool,
    show_stamina: bool,
    show_visual_feedback: bool,
    camera_offset: f64,
    stamina_level: u32,
    reward_fall_off: f64,
    reward_path_progress: f64,
    reward_step: f64,
    max_episode_length: Option<u64>,
}

/// Why an endless episode ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    StaminaDepleted,
    FellBehindFrontier,
    RepeatedFall,
    Timeout,
}

#[derive(Debug, Clone)]
pub struct EndlessMysteryPath {
    params: EmpParams,
    rng: Rng,
    tiles: Vec<Cell>,
    index: HashMap<Cell, usize>,
    walls: Vec<Cell>,
    /// Path index of the first tile of every segment.
    segment_starts: Vec<usize>,
    transitions: Vec<usize>,
    agent: AgentState,
    visited: Vec<bool>,
    best_index: usize,
    current_index: usize,
    stamina: u32,
    fall_indices: Vec<usize>,
    fallen_at: Option<Vec2>,
    termination: Option<Termination>,
    steps: u64,
}

impl EndlessMysteryPath {
    pub fn new(c: &EndlessMysteryPathConfig, seed: u64) -> Result<Self> {
        let params = EmpParams {
            show_origin: c.show_origin,
            show_past_path: c.show_past_path,
            show_background: c.show_background,
            show_stamina: c.show_stamina,
            show_visual_feedback: c.show_visual_feedback,
            camera_offset: c.camera_offset_scale * TILE_SIZE,
            stamina_level: c.stamina_level,
            reward_fall_off: c.reward_fall_off,
            reward_path_progress: c.reward_path_progress,
            reward_step: c.reward_step,
            max_episode_length: (c.max_episode_length > 0).then_some(c.max_episode_length as u64),
        };
        let mut s = Self {
            params,
            rng: Rng::new(seed),
            tiles: Vec::new(),
            index: HashMap::new(),
            walls: Vec::new(),
            segment_starts: Vec::new(),
            transitions: Vec::new(),
            agent: AgentState::new(Vec2::new(0.0, 0.0), c.agent_speed, c.agent_scale * TILE_SIZE),
            visited: Vec::new(),
            best_index: 0,
            current_index: 0,
            stamina: c.stamina_level,
            fall_indices: Vec::new(),
            fallen_at: None,
            termination: None,
            steps: 0,
        };
        s.extend()?;
        s.extend()?;
        s.agent.position = cell_center(s.tiles[0]);
        s.agent.facing = Facing::EAST;
        s.visited[0] = true;
        Ok(s)
    }

    /// Appends one segment (plus the transition tile joining it to the
    /// previous one).
    fn extend(&mut self) -> Result<()> {
        let k = self.segment_starts.len() as i32;
        let col0 = k * (SEGMENT_WIDTH + 1);
        let origin_row = self.tiles.last().map(|&(_, y)| y);
        if let Some(row) = origin_row {
            self.transitions.push(self.tiles.len());
            self.push_tile((col0 - 1, row));
        }
        let spec = PathSpec {
            width: SEGMENT_WIDTH,
            height: ROWS,
            origin_side: Side::West,
            origin: origin_row.map(|row| (0, row)),
            allow_west: false,
        };
        let seg = generate_path(&mut self.rng, spec)?;
        self.segment_starts.push(self.tiles.len());
        for (x, y) in seg.tiles {
            self.push_tile((x + col0, y));
        }
        self.walls.extend(seg.walls.into_iter().map(|(x, y)| (x + col0, y)));
        Ok(())
    }

    fn push_tile(&mut self, c: Cell) {
        self.index.insert(c, self.tiles.len());
        self.tiles.push(c);
        self.visited.push(false);
    }

    pub fn tiles(&self) -> &[Cell] {
        &self.tiles
    }

    pub fn segment_starts(&self) -> &[usize] {
        &self.segment_starts
    }

    pub fn agent(&self) -> &AgentState {
        &self.agent
    }

    pub fn stamina(&self) -> u32 {
        self.stamina
    }

    pub fn best_index(&self) -> usize {
        self.best_index
    }

    pub fn current_index(&self) -> usize {
        self.current_index
    }

    pub fn is_falling(&self) -> bool {
        self.fallen_at.is_some()
    }

    pub fn termination(&self) -> Option<Termination> {
        self.termination
    }

    /// World x of the frame's left edge.
    pub fn camera_x(&self) -> f64 {
        self.agent.position.x - self.params.camera_offset
    }

    fn relocate(&mut self) {
        self.agent.position = cell_center(self.tiles[0]);
        self.agent.facing = Facing::EAST;
        self.current_index = 0;
        self.stamina = self.params.stamina_level;
    }

    fn fall(&mut self) -> Option<Termination> {
        let at = self.current_index;
        if at < self.best_index {
            return Some(Termination::FellBehindFrontier);
        }
        if self.fall_indices.contains(&at) {
            return Some(Termination::RepeatedFall);
        }
        self.fall_indices.push(at);
        None
    }
}

impl Simulation for EndlessMysteryPath {
    fn step(&mut self, action: Action) -> Transition {
        self.steps += 1;
        let mut t = Transition { reward: self.params.reward_step, done: false };
        if self.fallen_at.take().is_some() {
            self.relocate();
        } else if let Action::MultiDiscrete(a) = action {
            // Moving left is not possible.
            let a = ActionMultiDiscrete { horizontal: a.horizontal.max(1), ..a };
            let p = self.agent.apply_continuous(a);
            let r = self.agent.radius;
            self.agent.position = Vec2::new(p.x, p.y.clamp(r, ROWS as f64 * TILE_SIZE - r));
            match self.index.get(&cell_of(self.agent.position)).copied() {
                Some(i) => {
                    if !self.visited[i] {
                        self.visited[i] = true;
                        t.reward += self.params.reward_path_progress;
                    }
                    if i > self.current_index {
                        self.stamina = self.params.stamina_level;
                    } else {
                        self.stamina = self.stamina.saturating_sub(1);
                    }
                    self.current_index = i;
                    self.best_index = self.best_index.max(i);
                    if self.stamina == 0 {
                        self.termination = Some(Termination::StaminaDepleted);
                    }
                }
                None => {
                    t.reward += self.params.reward_fall_off;
                    self.fallen_at = Some(self.agent.position);
                    self.termination = self.fall();
                }
            }
        }
        while self.best_index >= *self.segment_starts.last().expect("two segments at reset") {
            // Generation on a 7x7 block never fails in practice; keep the
            // last segment if it ever does.
            if self.extend().is_err() {
                break;
            }
        }
        if self.termination.is_none() {
            if let Some(max) = self.params.max_episode_length {
                if self.steps >= max {
                    self.termination = Some(Termination::Timeout);
                }
            }
        }
        t.done = self.termination.is_some();
        t
    }

    fn info(&self) -> Info {
        let mut info = Info::new();
        info.insert("best_progress".into(), self.best_index as f64);
        info.insert("falls".into(), self.fall_indices.len() as f64 + f64::from(self.termination_by_fall()));
        info.insert("tiles_visited".into(), self.visited.iter().filter(|&&v| v).count() as f64);
        info.insert("stamina".into(), self.stamina as f64);
        info
    }

    fn max_step_reward(&self) -> f64 {
        let p = &self.params;
        p.reward_step + p.reward_path_progress.max(p.reward_fall_off).max(0.0)
    }
}

impl EndlessMysteryPath {
    fn termination_by_fall(&self) -> u8 {
        matches!(self.termination, Some(Termination::FellBehindFrontier | Termination::RepeatedFall)) as u8
    }
}

impl Scene for EndlessMysteryPath {
    fn draw(&self, view: View, frame: &mut Frame) {
        let gt = view == View::GroundTruth;
        let cam = self.camera_x();
        if self.params.show_background && !gt {
            raster::fill_rect(frame, 0, 0, 84, 84, palette::EMP_BACKGROUND);
        }
        let first_col = (cam / TILE_SIZE).floor() as i32 - 1;
        let last_col = ((cam + 84.0) / TILE_SIZE).ceil() as i32 + 1;
        let visible = |c: &Cell| c.0 >= first_col && c.0 <= last_col;
        if gt {
            for w in self.walls.iter().filter(|c| visible(c)) {
                draw_cell(frame, *w, cam, palette::PATH_WALL);
            }
        }
        for (i, c) in self.tiles.iter().enumerate().filter(|(_, c)| visible(c)) {
            if gt || (self.params.show_past_path && self.visited[i]) {
                draw_cell(frame, *c, cam, palette::PATH_TILE);
            }
        }
        if gt {
            for &i in &self.transitions {
                draw_cell(frame, self.tiles[i], cam, palette::PATH_ORIGIN);
            }
        }
        if gt || self.params.show_origin {
            draw_cell(frame, self.tiles[0], cam, palette::PATH_ORIGIN);
        }
        let screen = Vec2::new(self.agent.position.x - cam, self.agent.position.y);
        draw_agent(frame, screen, self.agent.radius, self.agent.facing);
        if self.fallen_at.is_some() && (gt || self.params.show_visual_feedback) {
            draw_fall(frame, screen);
        }
        if self.params.show_stamina || gt {
            let len = (self.stamina as i64 * 84 / self.params.stamina_level.max(1) as i64) as i32;
            raster::fill_rect(frame, 0, 0, len, 1, palette::STAMINA);
        }
    }
}
