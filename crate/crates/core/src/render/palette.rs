//! Fixed RGB constants shared by observations and ground-truth frames.

use super::frame::Rgb;

pub const BLACK: Rgb = [0, 0, 0];
pub const WHITE: Rgb = [255, 255, 255];

/// Agent body.
pub const SKIN: Rgb = [255, 217, 171];
pub const HANDS: Rgb = WHITE;

pub const FLOOR_BLUE: Rgb = [70, 110, 200];
pub const FLOOR_WHITE: Rgb = [230, 230, 235];
pub const FLOOR_HIT: Rgb = [200, 40, 40];
/// Mortar Mayhem floor checker.
pub const TILE_LIGHT: Rgb = [205, 205, 205];
pub const TILE_DARK: Rgb = [160, 160, 160];
pub const ARENA_BORDER: Rgb = [40, 40, 40];

pub const COMMAND: Rgb = [30, 60, 220];
pub const TARGET: Rgb = [40, 200, 60];
pub const FEEDBACK_SUCCESS: Rgb = [40, 200, 60];
pub const FEEDBACK_FAILURE: Rgb = [220, 30, 30];

pub const PATH_TILE: Rgb = [230, 230, 230];
pub const PATH_ORIGIN: Rgb = [40, 80, 230];
pub const PATH_GOAL: Rgb = [40, 200, 60];
pub const PATH_WALL: Rgb = [170, 30, 30];
pub const PIT: Rgb = BLACK;
pub const FALL_CROSS: Rgb = [230, 20, 20];
pub const EMP_BACKGROUND: Rgb = [60, 60, 60];
pub const STAMINA: Rgb = [240, 200, 40];

pub const COIN: Rgb = [250, 220, 30];
pub const EXIT_CLOSED: Rgb = [120, 120, 120];
pub const EXIT_OPEN: Rgb = [40, 200, 60];
pub const SPOTLIGHT_OUTLINE: Rgb = [255, 255, 160];

pub const HUD_HEALTH: Rgb = [40, 200, 60];
pub const HUD_BACKGROUND: Rgb = [20, 20, 20];
/// Last-action chunk colors for velocity components -1, 0, +1.
pub const HUD_ACTION: [Rgb; 3] = [[220, 60, 60], [128, 128, 128], [60, 120, 220]];
/// Last-positive-reward cell: `[no reward, reward]`.
pub const HUD_REWARD: [Rgb; 2] = [[60, 60, 60], [250, 220, 30]];
