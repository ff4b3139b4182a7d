//! Action sources for driving episodes: uniform random play and scripted
//! agents that read the ground-truth state.

use std::str::FromStr;

use crate::action::{Action, ActionGrid, ActionMultiDiscrete, ActionSpace};
use crate::agent::{Facing, Vec2};
use crate::engine::{EnvState, EpisodeState};
use crate::error::EngineError;
use crate::mortar_mayhem::{target_tile, Command, MmPhase, MortarMayhem, Tile};
use crate::mystery_path::{cell_center, EndlessMysteryPath, MysteryPath};
use crate::rng::Rng;
use crate::searing_spotlights::{arena, SearingSpotlights};

pub trait Policy {
    fn act(&mut self, state: &EpisodeState) -> Action;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyKind {
    Random,
    Oracle,
}

impl FromStr for PolicyKind {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(PolicyKind::Random),
            "oracle" => Ok(PolicyKind::Oracle),
            other => Err(EngineError::InvalidParameter { key: "policy".into(), reason: format!("unknown policy {other:?}") }),
        }
    }
}

impl PolicyKind {
    pub fn build(self, seed: u64) -> Box<dyn Policy + Send> {
        match self {
            PolicyKind::Random => Box::new(RandomPolicy::new(seed)),
            PolicyKind::Oracle => Box::new(OraclePolicy),
        }
    }
}

/// Uniform over the action space.
#[derive(Debug, Clone)]
pub struct RandomPolicy {
    rng: Rng,
}

impl RandomPolicy {
    pub fn new(seed: u64) -> Self {
        Self { rng: Rng::new(seed) }
    }

    pub fn sample(&mut self, space: ActionSpace) -> Action {
        let byte = self.rng.below(space.size() as u64) as u8;
        Action::from_byte(byte, space).expect("byte below the space size")
    }
}

impl Policy for RandomPolicy {
    fn act(&mut self, state: &EpisodeState) -> Action {
        self.sample(state.action_space())
    }
}

/// Scripted agent with full knowledge of the hidden state.
#[derive(Debug, Clone, Copy, Default)]
pub struct OraclePolicy;

impl Policy for OraclePolicy {
    fn act(&mut self, state: &EpisodeState) -> Action {
        match state.state() {
            EnvState::MortarMayhem(m) => mortar_mayhem(m),
            EnvState::MysteryPath(m) => mystery_path(m),
            EnvState::EndlessMysteryPath(m) => endless_mystery_path(m),
            EnvState::SearingSpotlights(s) => searing_spotlights(s),
        }
    }
}

fn axis(d: f64, deadband: f64) -> u8 {
    if d > deadband {
        2
    } else if d < -deadband {
        0
    } else {
        1
    }
}

/// Continuous step towards `target`, stopping within `deadband` per axis.
fn steer(from: Vec2, to: Vec2, deadband: f64) -> ActionMultiDiscrete {
    ActionMultiDiscrete { horizontal: axis(to.x - from.x, deadband), vertical: axis(to.y - from.y, deadband) }
}

/// Grid action that turns towards `dir` or walks when already facing it.
fn grid_towards(facing: Facing, dir: (i32, i32)) -> ActionGrid {
    if dir == (0, 0) {
        return ActionGrid::NoOp;
    }
    let want = Facing::from_velocity(dir.0, dir.1).expect("nonzero direction");
    if facing == want {
        ActionGrid::Forward
    } else if facing.rotate_left() == want {
        ActionGrid::RotateLeft
    } else {
        ActionGrid::RotateRight
    }
}

/// Rotation only: never steps forward.
fn grid_prepare(facing: Facing, dir: (i32, i32)) -> ActionGrid {
    match grid_towards(facing, dir) {
        ActionGrid::Forward => ActionGrid::NoOp,
        other => other,
    }
}

fn mortar_mayhem(m: &MortarMayhem) -> Action {
    let agent = m.agent();
    let g = m.geometry();
    let torus = g.torus.then_some(g.tiles);
    match m.phase() {
        MmPhase::Execute { index, .. } => {
            let target = target_tile(m.origin(), m.commands()[index], torus);
            if m.is_grid() {
                let here = m.agent_tile();
                return grid_towards(agent.facing, ((target.0 - here.0).signum(), (target.1 - here.1).signum())).into();
            }
            let c = g.tile_center(target);
            let mut d = Vec2::new(c.x - agent.position.x, c.y - agent.position.y);
            if g.torus {
                let e = g.tiles as f64 * g.tile_size;
                d.x -= e * (d.x / e).round();
                d.y -= e * (d.y / e).round();
            }
            steer(Vec2::new(0.0, 0.0), d, agent.speed / 2.0).into()
        }
        phase if m.is_grid() => {
            let upcoming = match phase {
                MmPhase::ShowCommand { .. } | MmPhase::ShowDelay { .. } => m.commands().first().copied(),
                MmPhase::EvalFeedback { index, .. } => m.commands().get(index + 1).copied(),
                _ => None,
            };
            match upcoming.filter(|&c| c != Command::Stay) {
                Some(c) => grid_prepare(agent.facing, c.offset()).into(),
                None => ActionGrid::NoOp.into(),
            }
        }
        _ => ActionMultiDiscrete::NOOP.into(),
    }
}

fn direction(from: Tile, to: Tile) -> (i32, i32) {
    ((to.0 - from.0).signum(), (to.1 - from.1).signum())
}

fn mystery_path(m: &MysteryPath) -> Action {
    let noop = if m.is_grid() { Action::Grid(ActionGrid::NoOp) } else { ActionMultiDiscrete::NOOP.into() };
    if m.is_falling() {
        return noop;
    }
    let Some(i) = m.path_index() else { return noop };
    let tiles = &m.path().tiles;
    let Some(&next) = tiles.get(i + 1) else { return noop };
    if m.is_grid() {
        grid_towards(m.agent().facing, direction(tiles[i], next)).into()
    } else {
        steer(m.agent().position, cell_center(next), 1e-9).into()
    }
}

fn endless_mystery_path(m: &EndlessMysteryPath) -> Action {
    if m.is_falling() {
        return ActionMultiDiscrete::NOOP.into();
    }
    let next = m.tiles()[m.current_index() + 1];
    steer(m.agent().position, cell_center(next), 1e-9).into()
}

/// Penalty, in steps, for one step spent inside a spotlight.
const HIT_COST: f64 = 25.0;
const SEARCH_HORIZON: u32 = 80;

/// Best-first search over positions and time towards the next coin (or the
/// armed exit), against the known spotlights' future positions. Returns the
/// first action of the cheapest route.
fn searing_spotlights(s: &SearingSpotlights) -> Action {
    use std::cmp::Ordering;
    use std::collections::{BinaryHeap, HashMap};

    let agent = s.agent();
    let bounds = arena().shrink(agent.radius);
    let danger = |p: Vec2, k: u32| {
        s.spotlights()
            .iter()
            .filter(|l| {
                let progress = l.progress + l.speed * k as f64;
                progress < 1.0 && {
                    let r = l.radius + 0.5;
                    l.position_at(progress).distance_squared(p) <= r * r
                }
            })
            .count()
            .min(1) as f64
    };
    let step = |p: Vec2, a: ActionMultiDiscrete| {
        let dir = crate::agent::unit_direction(a.velocity());
        bounds.clamp(Vec2::new(p.x + dir.x * agent.speed, p.y + dir.y * agent.speed))
    };
    let (goal, reach) = match s.coins().first() {
        Some(c) => (c.position, agent.radius + s.coin_radius() - 0.5),
        None if s.exit_armed() => (s.exit().expect("armed exit exists"), agent.radius.min(s.exit_half())),
        None => {
            // Nothing to collect: stay out of the light.
            let best = ActionMultiDiscrete::all()
                .min_by(|&a, &b| danger(step(agent.position, a), 1).total_cmp(&danger(step(agent.position, b), 1)))
                .expect("nine actions");
            return best.into();
        }
    };

    #[derive(PartialEq)]
    struct Node {
        f: f64,
        g: f64,
        k: u32,
        pos: Vec2,
        first: ActionMultiDiscrete,
    }
    impl Eq for Node {}
    impl Ord for Node {
        fn cmp(&self, o: &Self) -> Ordering {
            o.f.total_cmp(&self.f).then_with(|| o.k.cmp(&self.k))
        }
    }
    impl PartialOrd for Node {
        fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
            Some(self.cmp(o))
        }
    }

    let h = |p: Vec2| (p.distance_squared(goal).sqrt() - reach).max(0.0) / agent.speed;
    let key = |p: Vec2| ((p.x / 2.0).floor() as i32, (p.y / 2.0).floor() as i32);
    let mut best_g: HashMap<(i32, i32), f64> = HashMap::new();
    let mut heap = BinaryHeap::new();
    for a in ActionMultiDiscrete::all() {
        let p = step(agent.position, a);
        let g = 1.0 + HIT_COST * danger(p, 1);
        heap.push(Node { f: g + h(p), g, k: 1, pos: p, first: a });
    }
    let mut fallback = (f64::INFINITY, ActionMultiDiscrete::NOOP);
    let mut expanded = 0;
    while let Some(n) = heap.pop() {
        if n.pos.distance_squared(goal) < reach * reach {
            return n.first.into();
        }
        let est = n.g + h(n.pos);
        if est < fallback.0 {
            fallback = (est, n.first);
        }
        expanded += 1;
        if n.k >= SEARCH_HORIZON || expanded > 4000 {
            continue;
        }
        let kk = key(n.pos);
        if best_g.get(&kk).is_some_and(|&g| g <= n.g) {
            continue;
        }
        best_g.insert(kk, n.g);
        for a in ActionMultiDiscrete::all() {
            let p = step(n.pos, a);
            let g = n.g + 1.0 + HIT_COST * danger(p, n.k + 1);
            heap.push(Node { f: g + h(p), g, k: n.k + 1, pos: p, first: n.first });
        }
    }
    fallback.1.into()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::EnvId;

    fn run(env: EnvId, seed: u64, max_steps: usize) -> EpisodeState {
        let (mut s, _) = EpisodeState::reset_default(env, seed).unwrap();
        let mut p = OraclePolicy;
        for _ in 0..max_steps {
            if s.is_done() {
                break;
            }
            let a = p.act(&s);
            s.step(a).unwrap();
        }
        s
    }

    #[test]
    fn oracle_solves_mortar_mayhem() {
        for env in [EnvId::MortarMayhem, EnvId::MortarMayhemGrid] {
            for seed in 0..10 {
                let s = run(env, seed, 1000);
                assert!(s.is_done());
                assert!((s.total_reward() - 1.0).abs() < 1e-9, "{env} seed {seed}: {}", s.total_reward());
            }
        }
    }

    #[test]
    fn oracle_solves_mystery_path() {
        for env in [EnvId::MysteryPath, EnvId::MysteryPathGrid] {
            for seed in 0..10 {
                let s = run(env, seed, 1000);
                assert_eq!(s.info()["goal_reached"], 1.0, "{env} seed {seed}");
            }
        }
    }

    #[test]
    fn random_policy_matches_space() {
        let mut p = RandomPolicy::new(1);
        for _ in 0..50 {
            assert_eq!(p.sample(ActionSpace::Grid).space(), ActionSpace::Grid);
        }
        assert_eq!("oracle".parse::<PolicyKind>().unwrap(), PolicyKind::Oracle);
        assert!("greedy".parse::<PolicyKind>().is_err());
    }
}
