//! Action spaces.
//!
//! Continuous-locomotion environments take a multi-discrete action with two
//! ternary dimensions; grid variants take one of four discrete choices.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{EngineError, Result};

/// Two ternary velocity components. `0 -> -1`, `1 -> 0`, `2 -> +1`, in
/// screen axes (x to the right, y downwards).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ActionMultiDiscrete {
    pub horizontal: u8,
    pub vertical: u8,
}

impl ActionMultiDiscrete {
    pub const NOOP: Self = Self { horizontal: 1, vertical: 1 };

    pub fn new(horizontal: u8, vertical: u8) -> Result<Self> {
        if horizontal > 2 || vertical > 2 {
            return Err(EngineError::InvalidAction(format!(
                "multi-discrete components must be in 0..=2, got ({horizontal}, {vertical})"
            )));
        }
        Ok(Self { horizontal, vertical })
    }

    /// Velocity direction as `(dx, dy)` with components in `{-1, 0, 1}`.
    pub fn velocity(self) -> (i32, i32) {
        (self.horizontal as i32 - 1, self.vertical as i32 - 1)
    }

    pub fn from_velocity(dx: i32, dy: i32) -> Self {
        Self {
            horizontal: (dx.signum() + 1) as u8,
            vertical: (dy.signum() + 1) as u8,
        }
    }

    /// All nine combinations, row-major over `(horizontal, vertical)`.
    pub fn all() -> impl Iterator<Item = Self> {
        (0..3u8).flat_map(|h| (0..3u8).map(move |v| Self { horizontal: h, vertical: v }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionGrid {
    NoOp,
    Forward,
    RotateLeft,
    RotateRight,
}

impl ActionGrid {
    pub const ALL: [ActionGrid; 4] = [
        ActionGrid::NoOp,
        ActionGrid::Forward,
        ActionGrid::RotateLeft,
        ActionGrid::RotateRight,
    ];

    pub fn index(self) -> u8 {
        match self {
            ActionGrid::NoOp => 0,
            ActionGrid::Forward => 1,
            ActionGrid::RotateLeft => 2,
            ActionGrid::RotateRight => 3,
        }
    }

    pub fn from_index(index: u8) -> Result<Self> {
        Self::ALL
            .get(index as usize)
            .copied()
            .ok_or_else(|| EngineError::InvalidAction(format!("grid action index {index} out of range")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    MultiDiscrete(ActionMultiDiscrete),
    Grid(ActionGrid),
}

impl Action {
    /// Single-byte encoding used by replay logs: `3h + v` for multi-discrete,
    /// the action index for grid actions.
    pub fn to_byte(self) -> u8 {
        match self {
            Action::MultiDiscrete(a) => a.horizontal * 3 + a.vertical,
            Action::Grid(a) => a.index(),
        }
    }

    pub fn from_byte(byte: u8, mode: ActionSpace) -> Result<Self> {
        match mode {
            ActionSpace::MultiDiscrete => {
                if byte > 8 {
                    return Err(EngineError::InvalidAction(format!(
                        "multi-discrete action byte {byte} out of range"
                    )));
                }
                Ok(Action::MultiDiscrete(ActionMultiDiscrete {
                    horizontal: byte / 3,
                    vertical: byte % 3,
                }))
            }
            ActionSpace::Grid => ActionGrid::from_index(byte).map(Action::Grid),
        }
    }

    pub fn space(self) -> ActionSpace {
        match self {
            Action::MultiDiscrete(_) => ActionSpace::MultiDiscrete,
            Action::Grid(_) => ActionSpace::Grid,
        }
    }
}

impl From<ActionMultiDiscrete> for Action {
    fn from(a: ActionMultiDiscrete) -> Self {
        Action::MultiDiscrete(a)
    }
}

impl From<ActionGrid> for Action {
    fn from(a: ActionGrid) -> Self {
        Action::Grid(a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionSpace {
    MultiDiscrete,
    Grid,
}

impl ActionSpace {
    pub fn name(self) -> &'static str {
        match self {
            ActionSpace::MultiDiscrete => "multi-discrete",
            ActionSpace::Grid => "grid",
        }
    }

    /// Number of distinct actions.
    pub fn size(self) -> usize {
        match self {
            ActionSpace::MultiDiscrete => 9,
            ActionSpace::Grid => 4,
        }
    }
}

impl fmt::Display for ActionSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn byte_encoding_roundtrips() {
        for a in ActionMultiDiscrete::all() {
            let action = Action::from(a);
            assert_eq!(Action::from_byte(action.to_byte(), ActionSpace::MultiDiscrete).unwrap(), action);
        }
        for a in ActionGrid::ALL {
            let action = Action::from(a);
            assert_eq!(Action::from_byte(action.to_byte(), ActionSpace::Grid).unwrap(), action);
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(ActionMultiDiscrete::new(3, 0).is_err());
        assert!(Action::from_byte(9, ActionSpace::MultiDiscrete).is_err());
        assert!(Action::from_byte(4, ActionSpace::Grid).is_err());
    }

    #[test]
    fn velocity_mapping() {
        assert_eq!(ActionMultiDiscrete::NOOP.velocity(), (0, 0));
        assert_eq!(ActionMultiDiscrete::new(2, 0).unwrap().velocity(), (1, -1));
        assert_eq!(ActionMultiDiscrete::from_velocity(-5, 3), ActionMultiDiscrete::new(0, 2).unwrap());
    }
}
