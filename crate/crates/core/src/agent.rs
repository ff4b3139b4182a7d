//! Agent kinematics shared by every environment.
//!
//! World coordinates are observation pixels: x grows to the right, y grows
//! downwards, the visible screen spans `[0, 84) x [0, 84)`.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

use crate::action::{ActionGrid, ActionMultiDiscrete};

/// Default agent speed in pixels per step.
pub const AGENT_SPEED: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn length(self) -> f64 {
        (self.x * self.x + self.y * self.y).sqrt()
    }

    pub fn distance_squared(self, other: Vec2) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

/// Axis-aligned rectangle `[min, max]` used for clamping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: Vec2,
    pub max: Vec2,
}

impl Bounds {
    pub fn new(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Self {
        Self { min: Vec2::new(min_x, min_y), max: Vec2::new(max_x, max_y) }
    }

    pub fn shrink(self, margin: f64) -> Self {
        Self::new(self.min.x + margin, self.min.y + margin, self.max.x - margin, self.max.y - margin)
    }

    pub fn clamp(self, p: Vec2) -> Vec2 {
        Vec2::new(p.x.clamp(self.min.x, self.max.x), p.y.clamp(self.min.y, self.max.y))
    }

    pub fn contains(self, p: Vec2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }
}

/// Compass bearing in degrees: 0 north (screen up), 90 east, clockwise.
/// Always a multiple of 45.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Facing(u16);

impl Facing {
    pub const NORTH: Facing = Facing(0);
    pub const EAST: Facing = Facing(90);
    pub const SOUTH: Facing = Facing(180);
    pub const WEST: Facing = Facing(270);

    pub fn degrees(self) -> u16 {
        self.0
    }

    /// Bearing of a nonzero velocity; `None` for the zero vector.
    pub fn from_velocity(dx: i32, dy: i32) -> Option<Facing> {
        let deg = match (dx.signum(), dy.signum()) {
            (0, -1) => 0,
            (1, -1) => 45,
            (1, 0) => 90,
            (1, 1) => 135,
            (0, 1) => 180,
            (-1, 1) => 225,
            (-1, 0) => 270,
            (-1, -1) => 315,
            _ => return None,
        };
        Some(Facing(deg))
    }

    /// Unit step `(dx, dy)` with components in `{-1, 0, 1}`.
    pub fn step(self) -> (i32, i32) {
        match self.0 {
            0 => (0, -1),
            45 => (1, -1),
            90 => (1, 0),
            135 => (1, 1),
            180 => (0, 1),
            225 => (-1, 1),
            270 => (-1, 0),
            _ => (-1, -1),
        }
    }

    /// Unit vector pointing along the bearing.
    pub fn unit(self) -> Vec2 {
        unit_direction(self.step())
    }

    pub fn rotate_left(self) -> Facing {
        Facing((self.0 + 270) % 360)
    }

    pub fn rotate_right(self) -> Facing {
        Facing((self.0 + 90) % 360)
    }
}

/// Unit vector for an eight-way direction. Diagonals use the exact
/// constant `1/sqrt(2)` so every platform produces identical bits.
pub fn unit_direction((dx, dy): (i32, i32)) -> Vec2 {
    if dx != 0 && dy != 0 {
        Vec2::new(dx.signum() as f64 * FRAC_1_SQRT_2, dy.signum() as f64 * FRAC_1_SQRT_2)
    } else {
        Vec2::new(dx.signum() as f64, dy.signum() as f64)
    }
}

/// Displacement for one continuous step: `speed * unit(v)`.
///
/// Diagonal moves are normalized, so the per-step distance is exactly
/// `speed` in every one of the eight directions.
pub fn move_continuous(pos: Vec2, action: ActionMultiDiscrete, speed: f64) -> Vec2 {
    let u = unit_direction(action.velocity());
    Vec2::new(pos.x + speed * u.x, pos.y + speed * u.y)
}

/// Reduces each coordinate modulo `extent` into `[0, extent)`.
pub fn wrap_torus(pos: Vec2, extent: f64) -> Vec2 {
    let wrap = |v: f64| {
        let r = v.rem_euclid(extent);
        // rem_euclid can round up to `extent` for tiny negative inputs.
        if r >= extent {
            0.0
        } else {
            r
        }
    };
    Vec2::new(wrap(pos.x), wrap(pos.y))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub position: Vec2,
    pub facing: Facing,
    pub speed: f64,
    /// Radius in pixels (agent scale times tile edge length).
    pub radius: f64,
    pub health: u32,
}

impl AgentState {
    pub fn new(position: Vec2, speed: f64, radius: f64) -> Self {
        Self { position, facing: Facing::SOUTH, speed, radius, health: 0 }
    }

    /// Applies a continuous action; facing follows the last nonzero velocity.
    /// Returns the unclamped position.
    pub fn apply_continuous(&mut self, action: ActionMultiDiscrete) -> Vec2 {
        let (dx, dy) = action.velocity();
        if let Some(facing) = Facing::from_velocity(dx, dy) {
            self.facing = facing;
        }
        move_continuous(self.position, action, self.speed)
    }

    /// Applies the rotation part of a grid action. Returns `true` when the
    /// action requests a forward move.
    pub fn apply_grid_rotation(&mut self, action: ActionGrid) -> bool {
        match action {
            ActionGrid::NoOp => false,
            ActionGrid::Forward => true,
            ActionGrid::RotateLeft => {
                self.facing = self.facing.rotate_left();
                false
            }
            ActionGrid::RotateRight => {
                self.facing = self.facing.rotate_right();
                false
            }
        }
    }
}
