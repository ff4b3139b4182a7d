//! Software rasterizer for 84x84 RGB observations.
//!
//! Environments describe their scene through [`Scene`]; this module only
//! knows about frames, colors and primitives. Each environment composes its
//! layers in a fixed order: floor, task entities, agent, lighting, feedback
//! overlays, HUD.

mod frame;
pub mod palette;
pub mod raster;

pub use frame::{fnv1a64, Frame, Rgb, FRAME_BYTES, FRAME_CHANNELS, FRAME_HEIGHT, FRAME_WIDTH};

use crate::agent::{Facing, Vec2};

/// Which view of the state to draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum View {
    /// What the agent perceives.
    Observation,
    /// Everything, ignoring lighting and hidden information.
    GroundTruth,
}

/// Something that can draw itself into a frame.
pub trait Scene {
    fn draw(&self, view: View, frame: &mut Frame);

    fn render(&self, view: View) -> Frame {
        let mut frame = Frame::black();
        self.draw(view, &mut frame);
        frame
    }
}

/// Agent sprite: skin-colored disc with two white hands on the facing side.
pub fn draw_agent(frame: &mut Frame, center: Vec2, radius: f64, facing: Facing) {
    raster::fill_disc(frame, center.x, center.y, radius, palette::SKIN);
    let forward = facing.unit();
    let side = Vec2::new(-forward.y, forward.x);
    let hand_r = (radius * 0.3).max(0.5);
    for sign in [-1.0, 1.0] {
        let hx = center.x + radius * (0.75 * forward.x + sign * 0.6 * side.x);
        let hy = center.y + radius * (0.75 * forward.y + sign * 0.6 * side.y);
        raster::fill_disc(frame, hx, hy, hand_r, palette::HANDS);
    }
}
