//! Integer-deterministic primitive rasterization.
//!
//! A pixel `(x, y)` is treated as the unit square with center
//! `(x + 0.5, y + 0.5)`. Shapes cover a pixel iff they contain its center;
//! no antialiasing, no blending. All writes are clipped to the frame.

use super::frame::{Frame, Rgb, FRAME_HEIGHT, FRAME_WIDTH};

/// Pixel index containing world coordinate `v`.
#[inline]
pub fn pixel_of(v: f64) -> i32 {
    v.floor() as i32
}

/// Fills pixels in `[x0, x1) x [y0, y1)` (integer pixel coordinates).
pub fn fill_rect(frame: &mut Frame, x0: i32, y0: i32, x1: i32, y1: i32, color: Rgb) {
    let x0 = x0.max(0);
    let y0 = y0.max(0);
    let x1 = x1.min(FRAME_WIDTH as i32);
    let y1 = y1.min(FRAME_HEIGHT as i32);
    for y in y0..y1 {
        for x in x0..x1 {
            frame.set(x as usize, y as usize, color);
        }
    }
}

/// Fills the world-space rectangle `[x0, x1) x [y0, y1)`: every pixel whose
/// center lies inside.
pub fn fill_rect_f(frame: &mut Frame, x0: f64, y0: f64, x1: f64, y1: f64, color: Rgb) {
    let to_px = |v: f64| (v - 0.5).ceil() as i32;
    fill_rect(frame, to_px(x0), to_px(y0), to_px(x1), to_px(y1), color);
}

/// Iterates the pixels covered by a disc.
pub fn disc_pixels(cx: f64, cy: f64, r: f64) -> impl Iterator<Item = (i32, i32)> {
    let single = r <= 0.0;
    let (x0, x1, y0, y1) = if single {
        let (px, py) = (pixel_of(cx), pixel_of(cy));
        (px, px, py, py)
    } else {
        (pixel_of(cx - r), pixel_of(cx + r), pixel_of(cy - r), pixel_of(cy + r))
    };
    let r2 = r * r;
    (y0..=y1).flat_map(move |y| {
        (x0..=x1).filter_map(move |x| {
            if single {
                return Some((x, y));
            }
            let dx = x as f64 + 0.5 - cx;
            let dy = y as f64 + 0.5 - cy;
            (dx * dx + dy * dy <= r2).then_some((x, y))
        })
    })
}

/// Filled disc. Radius 0 paints the single pixel containing the center.
pub fn fill_disc(frame: &mut Frame, cx: f64, cy: f64, r: f64, color: Rgb) {
    for (x, y) in disc_pixels(cx, cy, r) {
        frame.put(x, y, color);
    }
}

/// One-pixel-wide circle outline: pixels with center distance in `(r - 1, r]`.
pub fn stroke_circle(frame: &mut Frame, cx: f64, cy: f64, r: f64, color: Rgb) {
    let inner = (r - 1.0).max(0.0);
    let inner2 = inner * inner;
    for (x, y) in disc_pixels(cx, cy, r) {
        let dx = x as f64 + 0.5 - cx;
        let dy = y as f64 + 0.5 - cy;
        if dx * dx + dy * dy > inner2 {
            frame.put(x, y, color);
        }
    }
}

/// Bresenham line between integer endpoints, painted with a square pen of
/// side `2 * half_width + 1`.
pub fn draw_line(frame: &mut Frame, (x0, y0): (i32, i32), (x1, y1): (i32, i32), half_width: i32, color: Rgb) {
    let dx = (x1 - x0).abs();
    let dy = -(y1 - y0).abs();
    let sx = if x0 < x1 { 1 } else { -1 };
    let sy = if y0 < y1 { 1 } else { -1 };
    let (mut x, mut y, mut err) = (x0, y0, dx + dy);
    loop {
        fill_rect(frame, x - half_width, y - half_width, x + half_width + 1, y + half_width + 1, color);
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

/// Diagonal cross (an "X") inscribed in the square of half-size `half`
/// around the pixel `(cx, cy)`.
pub fn draw_cross(frame: &mut Frame, cx: i32, cy: i32, half: i32, color: Rgb) {
    draw_line(frame, (cx - half, cy - half), (cx + half, cy + half), 0, color);
    draw_line(frame, (cx - half, cy + half), (cx + half, cy - half), 0, color);
}

/// Arrow glyph centered on `(cx, cy)` pointing along `(dx, dy)` (components
/// in `{-1, 0, 1}`, not both zero). `half` is the half-length of the shaft.
pub fn draw_arrow(frame: &mut Frame, (cx, cy): (i32, i32), (dx, dy): (i32, i32), half: i32, color: Rgb) {
    // Diagonal shafts are shortened so their visual length matches.
    let reach = if dx != 0 && dy != 0 { half * 7 / 10 } else { half };
    let tail = (cx - dx * reach, cy - dy * reach);
    let tip = (cx + dx * reach, cy + dy * reach);
    draw_line(frame, tail, tip, 1, color);
    // Head arms: the backwards direction rotated by +-45 degrees.
    let (bx, by) = (-dx, -dy);
    let head = half / 2;
    for (ax, ay) in [(bx - by, bx + by), (bx + by, by - bx)] {
        let norm = ax.abs().max(ay.abs()).max(1);
        let end = (tip.0 + ax * head / norm, tip.1 + ay * head / norm);
        draw_line(frame, tip, end, 1, color);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::render::palette::WHITE;

    fn count(frame: &Frame, color: Rgb) -> usize {
        frame.pixels().filter(|&(_, _, c)| c == color).count()
    }

    #[test]
    fn zero_radius_disc_is_single_pixel() {
        let mut f = Frame::black();
        fill_disc(&mut f, 10.7, 20.2, 0.0, WHITE);
        assert_eq!(count(&f, WHITE), 1);
        assert_eq!(f.get(10, 20), WHITE);
    }

    #[test]
    fn clipped_rect_never_writes_out_of_bounds() {
        let mut f = Frame::black();
        fill_rect(&mut f, 80, -10, 200, 3, WHITE);
        assert_eq!(count(&f, WHITE), 4 * 3);
        fill_rect_f(&mut f, -50.0, -50.0, 500.0, 500.0, WHITE);
        assert_eq!(count(&f, WHITE), 84 * 84);
    }

    #[test]
    fn disc_area_close_to_analytic() {
        // Oracle: analytic area pi r^2; coverage is counted pixel by pixel.
        for r in 3..=14 {
            for offset in [0.0, 0.25, 0.5] {
                let mut f = Frame::black();
                fill_disc(&mut f, 42.0 + offset, 42.0 + offset / 2.0, r as f64, WHITE);
                let area = count(&f, WHITE) as f64;
                let analytic = std::f64::consts::PI * (r * r) as f64;
                let rel = (area - analytic).abs() / analytic;
                assert!(rel <= 0.15, "r={r} offset={offset}: {area} vs {analytic}");
            }
        }
    }

    #[test]
    fn disc_at_corner_is_clipped() {
        let mut f = Frame::black();
        fill_disc(&mut f, 0.0, 0.0, 10.0, WHITE);
        let n = count(&f, WHITE);
        assert!(n > 0 && n < 100);
    }

    #[test]
    fn arrows_render_in_all_directions() {
        for dx in -1..=1 {
            for dy in -1..=1 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let mut f = Frame::black();
                draw_arrow(&mut f, (42, 42), (dx, dy), 12, WHITE);
                // Tip side is painted, the opposite far corner region is not.
                assert!(count(&f, WHITE) > 20);
                let far = (42 - dx * 20, 42 - dy * 20);
                assert_eq!(f.get(far.0 as usize, far.1 as usize), [0, 0, 0]);
            }
        }
    }

    #[test]
    fn line_endpoints_painted() {
        let mut f = Frame::black();
        draw_line(&mut f, (3, 4), (30, 17), 0, WHITE);
        assert_eq!(f.get(3, 4), WHITE);
        assert_eq!(f.get(30, 17), WHITE);
    }
}
