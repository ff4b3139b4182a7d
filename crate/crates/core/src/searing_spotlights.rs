//! Searing Spotlights: a dark arena revealed only by roaming spotlights that
//! hurt the agent. Coins must be collected before the exit opens. The endless
//! variant drops the exit and respawns a coin after every pickup.

use serde::{Deserialize, Serialize};

use crate::action::{Action, ActionMultiDiscrete};
use crate::agent::{AgentState, Bounds, Vec2};
use crate::config::{EndlessSearingSpotlightsConfig, SearingSpotlightsConfig, UniformRange};
use crate::engine::{Info, Simulation, Transition};
use crate::render::{draw_agent, palette, raster, Frame, Rgb, Scene, View, FRAME_HEIGHT, FRAME_WIDTH};
use crate::rng::Rng;

pub const HUD_ROWS: usize = 3;
pub const TILE_SIZE: f64 = 12.0;
/// Fixed decay and floor of the endless spawn interval.
pub const ENDLESS_SPAWN_DECAY: f64 = 0.95;
pub const ENDLESS_SPAWN_THRESHOLD: f64 = 10.0;

/// Playable area below the HUD.
pub fn arena() -> Bounds {
    Bounds::new(0.0, HUD_ROWS as f64, FRAME_WIDTH as f64, FRAME_HEIGHT as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spotlight {
    pub start: Vec2,
    pub end: Vec2,
    pub radius: f64,
    /// Fraction of the traversal covered per step.
    pub speed: f64,
    pub progress: f64,
}

impl Spotlight {
    /// Straight sweep between points on two opposite arena margins.
    pub fn sample(rng: &mut Rng, radius: UniformRange, speed: UniformRange) -> Self {
        let a = arena();
        let radius = radius.sample(rng);
        let speed = speed.sample(rng);
        let horizontal = rng.below(2) == 0;
        let (mut start, mut end) = if horizontal {
            let y0 = rng.uniform(a.min.y, a.max.y);
            let y1 = rng.uniform(a.min.y, a.max.y);
            (Vec2::new(a.min.x, y0), Vec2::new(a.max.x, y1))
        } else {
            let x0 = rng.uniform(a.min.x, a.max.x);
            let x1 = rng.uniform(a.min.x, a.max.x);
            (Vec2::new(x0, a.min.y), Vec2::new(x1, a.max.y))
        };
        if rng.below(2) == 0 {
            std::mem::swap(&mut start, &mut end);
        }
        Self { start, end, radius, speed, progress: 0.0 }
    }

    pub fn position_at(&self, progress: f64) -> Vec2 {
        let t = progress.min(1.0);
        Vec2::new(self.start.x + (self.end.x - self.start.x) * t, self.start.y + (self.end.y - self.start.y) * t)
    }

    pub fn position(&self) -> Vec2 {
        self.position_at(self.progress)
    }

    pub fn contains(&self, p: Vec2) -> bool {
        self.position().distance_squared(p) <= self.radius * self.radius
    }

    pub fn is_finished(&self) -> bool {
        self.progress >= 1.0
    }
}

/// Timer for spotlight spawns: the gap between spawns shrinks geometrically
/// down to a floor, optionally up to a total spawn cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpawnSchedule {
    interval: f64,
    decay: f64,
    threshold: f64,
    next_at: f64,
    spawned: u32,
    cap: Option<u32>,
}

impl SpawnSchedule {
    pub fn new(interval: f64, decay: f64, threshold: f64, cap: Option<u32>) -> Self {
        Self { interval, decay, threshold, next_at: interval, spawned: 0, cap }
    }

    pub fn spawned(&self) -> u32 {
        self.spawned
    }

    pub fn interval(&self) -> f64 {
        self.interval
    }

    fn has_room(&self) -> bool {
        self.cap.is_none_or(|c| self.spawned < c)
    }

    /// Counts spawns that happen outside the timer (initial spawns).
    /// Returns whether the cap allowed it.
    pub fn record_spawn(&mut self) -> bool {
        if self.has_room() {
            self.spawned += 1;
            true
        } else {
            false
        }
    }

    /// Number of timed spawns due at `step`.
    pub fn due(&mut self, step: u64) -> u32 {
        let mut n = 0;
        while step as f64 >= self.next_at && self.has_room() {
            self.spawned += 1;
            n += 1;
            self.interval = (self.interval * self.decay).max(self.threshold);
            self.next_at += self.interval;
        }
        n
    }
}

/// The first `n` spawn intervals of a schedule.
pub fn spawn_intervals(interval: f64, decay: f64, threshold: f64, n: usize) -> Vec<f64> {
    std::iter::successors(Some(interval), |i| Some((i * decay).max(threshold))).take(n).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coin {
    pub position: Vec2,
    /// Step at which the coin appeared.
    pub spawned_at: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SsParams {
    endless: bool,
    max_health: u32,
    agent_always_visible: bool,
    use_exit: bool,
    exit_half: f64,
    exit_visible: bool,
    coin_radius: f64,
    coin_always_visible: bool,
    coin_show_duration: u32,
    steps_per_coin: u32,
    spotlight_radius: UniformRange,
    spotlight_speed: UniformRange,
    spotlight_damage: u32,
    light_dim_off_duration: u32,
    light_threshold: u32,
    show_visual_feedback: bool,
    show_last_action: bool,
    show_last_positive_reward: bool,
    render_background_black: bool,
    hide_checkered_background: bool,
    reward_inside_spotlight: f64,
    reward_outside_spotlights: f64,
    reward_death: f64,
    reward_exit: f64,
    reward_coin: f64,
    reward_max_steps: f64,
    max_coins_per_step: u32,
    max_episode_length: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct SearingSpotlights {
    params: SsParams,
    rng: Rng,
    agent: AgentState,
    spotlights: Vec<Spotlight>,
    schedule: SpawnSchedule,
    coins: Vec<Coin>,
    exit: Option<Vec2>,
    coins_collected: u32,
    hit: bool,
    last_action: ActionMultiDiscrete,
    last_reward_positive: bool,
    steps: u64,
}

/// Uniform point in the arena keeping `margin` from the edges and from every
/// disc in `avoid`.
fn sample_free(rng: &mut Rng, margin: f64, avoid: &[(Vec2, f64)]) -> Vec2 {
    let b = arena().shrink(margin);
    let mut p = Vec2::new(rng.uniform(b.min.x, b.max.x), rng.uniform(b.min.y, b.max.y));
    for _ in 0..1000 {
        if avoid.iter().all(|&(c, r)| c.distance_squared(p) > (r + margin) * (r + margin)) {
            break;
        }
        p = Vec2::new(rng.uniform(b.min.x, b.max.x), rng.uniform(b.min.y, b.max.y));
    }
    p
}

impl SearingSpotlights {
    pub fn finite(c: &SearingSpotlightsConfig, seed: u64) -> Self {
        let mut rng = Rng::new(seed);
        let n_coins = *rng.choose(&c.number_of_coins);
        let params = SsParams {
            endless: false,
            max_health: c.agent_health,
            agent_always_visible: c.agent_always_visible,
            use_exit: c.use_exit,
            exit_half: c.exit_scale * TILE_SIZE,
            exit_visible: c.exit_visible,
            coin_radius: c.coin_scale * TILE_SIZE,
            coin_always_visible: c.coin_always_visible,
            coin_show_duration: 0,
            steps_per_coin: 0,
            spotlight_radius: c.spotlight_radius,
            spotlight_speed: c.spotlight_speed,
            spotlight_damage: c.spotlight_damage,
            light_dim_off_duration: c.light_dim_off_duration,
            light_threshold: c.light_threshold,
            show_visual_feedback: c.show_visual_feedback,
            show_last_action: c.show_last_action,
            show_last_positive_reward: c.show_last_positive_reward,
            render_background_black: c.render_background_black,
            hide_checkered_background: c.hide_checkered_background,
            reward_inside_spotlight: c.reward_inside_spotlight,
            reward_outside_spotlights: c.reward_outside_spotlights,
            reward_death: c.reward_death,
            reward_exit: c.reward_exit,
            reward_coin: c.reward_coin,
            reward_max_steps: c.reward_max_steps,
            max_coins_per_step: c.number_of_coins.iter().copied().max().unwrap_or(0),
            max_episode_length: (c.max_episode_length > 0).then_some(c.max_episode_length as u64),
        };
        let schedule = SpawnSchedule::new(
            c.spotlight_spawn_interval as f64,
            c.spotlight_spawn_decay,
            c.spotlight_spawn_threshold as f64,
            Some(c.no_spotlight_spawns),
        );
        let mut s = Self::setup(params, rng, schedule, c.agent_scale, c.agent_speed, c.sample_agent_position);
        let agent_disc = (s.agent.position, s.agent.radius);
        let mut avoid = vec![agent_disc];
        if c.use_exit {
            let half = s.params.exit_half;
            let exit = sample_free(&mut s.rng, half, &avoid);
            avoid.push((exit, half * std::f64::consts::SQRT_2));
            s.exit = Some(exit);
        }
        for _ in 0..n_coins {
            let r = s.params.coin_radius;
            let p = sample_free(&mut s.rng, r, &avoid);
            avoid.push((p, r));
            s.coins.push(Coin { position: p, spawned_at: 0 });
        }
        s.spawn_initial(c.no_initial_spotlight_spawns);
        s
    }

    pub fn endless(c: &EndlessSearingSpotlightsConfig, seed: u64) -> Self {
        let rng = Rng::new(seed);
        let params = SsParams {
            endless: true,
            max_health: c.agent_health,
            agent_always_visible: c.agent_always_visible,
            use_exit: false,
            exit_half: 0.0,
            exit_visible: false,
            coin_radius: c.coin_scale * TILE_SIZE,
            coin_always_visible: c.coin_always_visible,
            coin_show_duration: c.coin_show_duration,
            steps_per_coin: c.steps_per_coin,
            spotlight_radius: c.spotlight_radius,
            spotlight_speed: c.spotlight_speed,
            spotlight_damage: c.spotlight_damage,
            light_dim_off_duration: c.light_dim_off_duration,
            light_threshold: c.light_threshold,
            show_visual_feedback: c.show_visual_feedback,
            show_last_action: c.show_last_action,
            show_last_positive_reward: c.show_last_positive_reward,
            render_background_black: c.render_background_black,
            hide_checkered_background: c.hide_checkered_background,
            reward_inside_spotlight: c.reward_inside_spotlight,
            reward_outside_spotlights: c.reward_outside_spotlights,
            reward_death: c.reward_death,
            reward_exit: 0.0,
            reward_coin: c.reward_coin,
            reward_max_steps: 0.0,
            max_coins_per_step: 1,
            max_episode_length: (c.max_episode_length > 0).then_some(c.max_episode_length as u64),
        };
        let schedule = SpawnSchedule::new(
            c.spotlight_spawn_interval as f64,
            ENDLESS_SPAWN_DECAY,
            ENDLESS_SPAWN_THRESHOLD,
            None,
        );
        let mut s = Self::setup(params, rng, schedule, c.agent_scale, c.agent_speed, c.sample_agent_position);
        s.spawn_coin();
        s.spawn_initial(c.no_initial_spotlight_spawns);
        s
    }

    fn setup(params: SsParams, mut rng: Rng, schedule: SpawnSchedule, scale: f64, speed: f64, sample: bool) -> Self {
        let radius = scale * TILE_SIZE;
        let a = arena();
        let position = if sample {
            let b = a.shrink(radius);
            Vec2::new(rng.uniform(b.min.x, b.max.x), rng.uniform(b.min.y, b.max.y))
        } else {
            Vec2::new((a.min.x + a.max.x) / 2.0, (a.min.y + a.max.y) / 2.0)
        };
        let mut agent = AgentState::new(position, speed, radius);
        agent.health = params.max_health;
        Self {
            params,
            rng,
            agent,
            spotlights: Vec::new(),
            schedule,
            coins: Vec::new(),
            exit: None,
            coins_collected: 0,
            hit: false,
            last_action: ActionMultiDiscrete::NOOP,
            last_reward_positive: false,
            steps: 0,
        }
    }

    fn spawn_initial(&mut self, n: u32) {
        for _ in 0..n {
            if self.schedule.record_spawn() {
                self.spawn_spotlight();
            }
        }
    }

    fn spawn_spotlight(&mut self) {
        let s = Spotlight::sample(&mut self.rng, self.params.spotlight_radius, self.params.spotlight_speed);
        self.spotlights.push(s);
    }

    fn spawn_coin(&mut self) {
        let r = self.params.coin_radius;
        let p = sample_free(&mut self.rng, r, &[(self.agent.position, self.agent.radius)]);
        self.coins.push(Coin { position: p, spawned_at: self.steps });
    }

    pub fn agent(&self) -> &AgentState {
        &self.agent
    }

    pub fn spotlights(&self) -> &[Spotlight] {
        &self.spotlights
    }

    pub fn coins(&self) -> &[Coin] {
        &self.coins
    }

    pub fn exit(&self) -> Option<Vec2> {
        self.exit
    }

    pub fn coin_radius(&self) -> f64 {
        self.params.coin_radius
    }

    pub fn exit_half(&self) -> f64 {
        self.params.exit_half
    }

    pub fn is_endless(&self) -> bool {
        self.params.endless
    }

    pub fn exit_armed(&self) -> bool {
        self.exit.is_some() && self.coins.is_empty()
    }

    pub fn coins_collected(&self) -> u32 {
        self.coins_collected
    }

    pub fn schedule(&self) -> &SpawnSchedule {
        &self.schedule
    }

    pub fn was_hit(&self) -> bool {
        self.hit
    }

    /// Global light intensity in `0..=light_threshold`; reaches 0 once the
    /// dim-off ramp is over.
    pub fn light_intensity(&self) -> u32 {
        let d = self.params.light_dim_off_duration as u64;
        if d == 0 {
            return 0;
        }
        let left = d.saturating_sub(self.steps);
        (self.params.light_threshold as u64 * left / d) as u32
    }

    pub fn is_lit(&self, p: Vec2) -> bool {
        self.spotlights.iter().any(|s| s.contains(p))
    }

    fn touches_exit(&self, exit: Vec2) -> bool {
        let h = self.params.exit_half;
        let p = self.agent.position;
        let nx = p.x.clamp(exit.x - h, exit.x + h);
        let ny = p.y.clamp(exit.y - h, exit.y + h);
        p.distance_squared(Vec2::new(nx, ny)) < self.agent.radius * self.agent.radius
    }
}

impl Simulation for SearingSpotlights {
    fn step(&mut self, action: Action) -> Transition {
        let Action::MultiDiscrete(a) = action else {
            unreachable!("engine checks the action space");
        };
        self.steps += 1;
        let mut t = Transition::default();

        let next = self.agent.apply_continuous(a);
        self.agent.position = arena().shrink(self.agent.radius).clamp(next);
        self.last_action = a;

        for s in &mut self.spotlights {
            s.progress += s.speed;
        }
        self.spotlights.retain(|s| !s.is_finished());
        for _ in 0..self.schedule.due(self.steps) {
            self.spawn_spotlight();
        }

        let p = self.params.clone();
        self.hit = self.is_lit(self.agent.position);
        if self.hit {
            t.reward += p.reward_inside_spotlight;
            self.agent.health = self.agent.health.saturating_sub(p.spotlight_damage);
        } else {
            t.reward += p.reward_outside_spotlights;
        }

        let reach = self.agent.radius + p.coin_radius;
        let before = self.coins.len();
        let agent_pos = self.agent.position;
        self.coins.retain(|c| c.position.distance_squared(agent_pos) >= reach * reach);
        let picked = (before - self.coins.len()) as u32;
        self.coins_collected += picked;
        t.reward += picked as f64 * p.reward_coin;
        let endless = p.endless;
        if endless {
            if picked > 0 {
                self.spawn_coin();
            }
            let since = self.steps - self.coins[0].spawned_at;
            if since >= self.params.steps_per_coin as u64 {
                t.done = true;
            }
        } else if let Some(exit) = self.exit.filter(|_| self.coins.is_empty()) {
            if self.touches_exit(exit) {
                t.reward += self.params.reward_exit;
                t.done = true;
            }
        } else if self.exit.is_none() && self.coins.is_empty() && before > 0 {
            // Without an exit, collecting every coin ends the episode.
            t.done = true;
        }

        if self.agent.health == 0 {
            t.reward += self.params.reward_death;
            t.done = true;
        }
        if !t.done {
            if let Some(max) = self.params.max_episode_length {
                if self.steps >= max {
                    t.reward += self.params.reward_max_steps;
                    t.done = true;
                }
            }
        }
        self.last_reward_positive = t.reward > 0.0;
        t
    }

    fn info(&self) -> Info {
        let mut info = Info::new();
        info.insert("coins_collected".into(), self.coins_collected as f64);
        info.insert("health".into(), self.agent.health as f64);
        info.insert("exit_armed".into(), if self.exit_armed() { 1.0 } else { 0.0 });
        info
    }

    fn max_step_reward(&self) -> f64 {
        let p = &self.params;
        let light = p.reward_inside_spotlight.max(p.reward_outside_spotlights);
        let coins = p.max_coins_per_step as f64 * p.reward_coin.max(0.0);
        let exit = if p.use_exit { p.reward_exit.max(0.0) } else { 0.0 };
        light + coins + exit + p.reward_death.max(p.reward_max_steps).max(0.0)
    }
}

impl SearingSpotlights {
    fn draw_floor(&self, frame: &mut Frame) {
        let p = &self.params;
        if p.render_background_black {
            return;
        }
        let blue = if self.hit && p.show_visual_feedback { palette::FLOOR_HIT } else { palette::FLOOR_BLUE };
        let a = arena();
        let cols = (a.max.x / TILE_SIZE).ceil() as i32;
        let rows = ((a.max.y - a.min.y) / TILE_SIZE).ceil() as i32;
        for ty in 0..rows {
            for tx in 0..cols {
                let color = if p.hide_checkered_background || (tx + ty) % 2 == 0 { blue } else { palette::FLOOR_WHITE };
                let x0 = tx as f64 * TILE_SIZE;
                let y0 = a.min.y + ty as f64 * TILE_SIZE;
                raster::fill_rect_f(frame, x0, y0, x0 + TILE_SIZE, (y0 + TILE_SIZE).min(a.max.y), color);
            }
        }
    }

    fn draw_exit(&self, frame: &mut Frame) {
        if let Some(e) = self.exit {
            let h = self.params.exit_half;
            let color = if self.exit_armed() { palette::EXIT_OPEN } else { palette::EXIT_CLOSED };
            raster::fill_rect_f(frame, e.x - h, e.y - h, e.x + h, e.y + h, color);
        }
    }

    fn draw_coin(&self, frame: &mut Frame, c: &Coin) {
        raster::fill_disc(frame, c.position.x, c.position.y, self.params.coin_radius, palette::COIN);
    }

    fn draw_agent(&self, frame: &mut Frame) {
        draw_agent(frame, self.agent.position, self.agent.radius, self.agent.facing);
    }

    fn coin_fresh(&self, c: &Coin) -> bool {
        self.params.endless && self.steps - c.spawned_at < self.params.coin_show_duration as u64
    }

    fn draw_hud(&self, frame: &mut Frame) {
        let p = &self.params;
        raster::fill_rect(frame, 0, 0, FRAME_WIDTH as i32, HUD_ROWS as i32, palette::HUD_BACKGROUND);
        let len = (self.agent.health as u64 * FRAME_WIDTH as u64 / p.max_health.max(1) as u64) as i32;
        raster::fill_rect(frame, 0, 0, len, 1, palette::HUD_HEALTH);
        let third = FRAME_WIDTH as i32 / 3;
        if p.show_last_action {
            let (dx, dy) = self.last_action.velocity();
            raster::fill_rect(frame, 0, 1, third, 3, palette::HUD_ACTION[(dx + 1) as usize]);
            raster::fill_rect(frame, 2 * third, 1, 3 * third, 3, palette::HUD_ACTION[(dy + 1) as usize]);
        }
        if p.show_last_positive_reward {
            let color = palette::HUD_REWARD[self.last_reward_positive as usize];
            raster::fill_rect(frame, third, 1, 2 * third, 3, color);
        }
    }
}

fn dim(c: Rgb, intensity: u32) -> Rgb {
    let f = |v: u8| (v as u32 * intensity / 255) as u8;
    [f(c[0]), f(c[1]), f(c[2])]
}

impl Scene for SearingSpotlights {
    fn draw(&self, view: View, frame: &mut Frame) {
        let p = &self.params;
        self.draw_floor(frame);
        self.draw_exit(frame);
        for c in &self.coins {
            self.draw_coin(frame, c);
        }
        self.draw_agent(frame);

        match view {
            View::GroundTruth => {
                for s in &self.spotlights {
                    let c = s.position();
                    raster::stroke_circle(frame, c.x, c.y, s.radius, palette::SPOTLIGHT_OUTLINE);
                }
            }
            View::Observation => {
                let mut lit = vec![false; FRAME_WIDTH * FRAME_HEIGHT];
                for s in &self.spotlights {
                    let c = s.position();
                    for (x, y) in raster::disc_pixels(c.x, c.y, s.radius) {
                        if (0..FRAME_WIDTH as i32).contains(&x) && (0..FRAME_HEIGHT as i32).contains(&y) {
                            lit[y as usize * FRAME_WIDTH + x as usize] = true;
                        }
                    }
                }
                let intensity = self.light_intensity().min(255);
                for y in HUD_ROWS..FRAME_HEIGHT {
                    for x in 0..FRAME_WIDTH {
                        if !lit[y * FRAME_WIDTH + x] {
                            frame.set(x, y, dim(frame.get(x, y), intensity));
                        }
                    }
                }
                if p.exit_visible {
                    self.draw_exit(frame);
                }
                for c in &self.coins {
                    if p.coin_always_visible || self.coin_fresh(c) {
                        self.draw_coin(frame, c);
                    }
                }
                if p.agent_always_visible {
                    self.draw_agent(frame);
                }
            }
        }
        self.draw_hud(frame);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{EnvConfig, EnvId};
    use crate::engine::{EnvState, EpisodeState};

    fn ss(state: &EpisodeState) -> &SearingSpotlights {
        match state.state() {
            EnvState::SearingSpotlights(s) => s,
            _ => unreachable!(),
        }
    }

    #[test]
    fn spawn_intervals_decay_to_threshold() {
        // Oracle: direct iteration of interval * 0.95 floored at 10.
        let v = spawn_intervals(30.0, 0.95, 10.0, 40);
        assert_eq!(v[0], 30.0);
        assert!((v[1] - 28.5).abs() < 1e-12);
        assert!((v[2] - 27.075).abs() < 1e-12);
        assert_eq!(*v.last().unwrap(), 10.0);
        let mut s = SpawnSchedule::new(30.0, 0.95, 10.0, None);
        let mut times = Vec::new();
        for step in 1..200u64 {
            for _ in 0..s.due(step) {
                times.push(step);
            }
        }
        // Spawn times are the ceilings of the cumulative interval sums.
        let mut acc = 0.0;
        for (i, &t) in times.iter().enumerate() {
            acc += v[i];
            assert_eq!(t, acc.ceil() as u64);
        }
    }

    #[test]
    fn spawn_cap_includes_initial() {
        let mut s = SpawnSchedule::new(1.0, 1.0, 1.0, Some(30));
        for _ in 0..4 {
            assert!(s.record_spawn());
        }
        let timed: u32 = (1..1000).map(|t| s.due(t)).sum();
        assert_eq!(timed, 26);
        assert_eq!(s.spawned(), 30);
    }

    #[test]
    fn crossing_time_matches_speed() {
        let mut rng = Rng::new(5);
        let mut s = Spotlight::sample(&mut rng, UniformRange(10.0, 10.0), UniformRange(0.004, 0.004));
        let mut n = 0;
        while !s.is_finished() {
            s.progress += s.speed;
            n += 1;
        }
        assert!((n as f64 - (1.0f64 / 0.004).ceil()).abs() <= 1.0);
    }

    #[test]
    fn health_drops_at_most_one_per_step() {
        for seed in 0..30 {
            let (mut s, _) = EpisodeState::reset_default(EnvId::SearingSpotlights, seed).unwrap();
            let mut prev = ss(&s).agent().health;
            while !s.is_done() {
                s.step(ActionMultiDiscrete::NOOP).unwrap();
                let h = ss(&s).agent().health;
                assert!(h == prev || h + 1 == prev);
                assert_eq!(h + 1 == prev, ss(&s).was_hit());
                prev = h;
            }
        }
    }

    #[test]
    fn darkness_after_dim_off() {
        let (mut s, obs0) = EpisodeState::reset_default(EnvId::SearingSpotlights, 12).unwrap();
        let lit0 = obs0.pixels().filter(|&(_, y, c)| y >= HUD_ROWS && c != palette::BLACK).count();
        for _ in 0..6 {
            if s.is_done() {
                return;
            }
            s.step(ActionMultiDiscrete::NOOP).unwrap();
        }
        let m = ss(&s);
        assert_eq!(m.light_intensity(), 0);
        let obs = s.render_observation();
        for (x, y, c) in obs.pixels() {
            if y < HUD_ROWS {
                continue;
            }
            let center = Vec2::new(x as f64 + 0.5, y as f64 + 0.5);
            if !m.is_lit(center) {
                assert_eq!(c, palette::BLACK, "({x},{y})");
            }
        }
        assert!(lit0 > 84 * 70);
    }

    #[test]
    fn coin_then_exit_pays_one_and_a_quarter() {
        let (mut s, _) = EpisodeState::reset_default(EnvId::SearingSpotlights, 21).unwrap();
        let mut total = 0.0;
        let mut done = false;
        while !done {
            let m = ss(&s);
            let target = m.coins().first().map(|c| c.position).or(m.exit()).unwrap();
            let p = m.agent().position;
            let d = |a: f64, b: f64| if b > a + 1.5 { 2 } else if b < a - 1.5 { 0 } else { 1 };
            let r = s.step(ActionMultiDiscrete::new(d(p.x, target.x), d(p.y, target.y)).unwrap()).unwrap();
            total += r.reward;
            done = r.done;
        }
        if ss(&s).agent().health > 0 && s.steps() < 256 {
            assert!((total - 1.25).abs() < 1e-12);
        }
    }

    #[test]
    fn endless_coin_budget() {
        let (mut s, _) = EpisodeState::reset_default(EnvId::EndlessSearingSpotlights, 4).unwrap();
        let mut n = 0;
        let health_out;
        loop {
            n += 1;
            let r = s.step(ActionMultiDiscrete::NOOP).unwrap();
            if r.done {
                health_out = ss(&s).agent().health == 0;
                break;
            }
        }
        if !health_out {
            assert_eq!(n, 160);
        }
    }

    #[test]
    fn fresh_coin_visible_six_frames() {
        let mut c = EnvConfig::defaults(EnvId::EndlessSearingSpotlights);
        if let EnvConfig::EndlessSearingSpotlights(e) = &mut c {
            e.spotlight_damage = 0;
            e.no_initial_spotlight_spawns = 0;
            e.spotlight_spawn_interval = 1000;
        }
        let (mut s, obs) = EpisodeState::reset(EnvId::EndlessSearingSpotlights, c, 8).unwrap();
        let has_coin = |f: &Frame| f.pixels().any(|(_, _, c)| c == palette::COIN);
        let mut seen = vec![has_coin(&obs)];
        for _ in 0..8 {
            seen.push(has_coin(&s.step(ActionMultiDiscrete::NOOP).unwrap().observation));
        }
        assert_eq!(seen, vec![true, true, true, true, true, true, false, false, false]);
    }

    #[test]
    fn hud_health_bar() {
        let (mut s, obs) = EpisodeState::reset_default(EnvId::SearingSpotlights, 3).unwrap();
        let bar = |f: &Frame| (0..84).filter(|&x| f.get(x, 0) == palette::HUD_HEALTH).count();
        assert_eq!(bar(&obs), 84);
        while !s.is_done() {
            let r = s.step(ActionMultiDiscrete::NOOP).unwrap();
            let h = ss(&s).agent().health as usize;
            assert_eq!(bar(&r.observation), h * 84 / 5);
        }
    }
}
