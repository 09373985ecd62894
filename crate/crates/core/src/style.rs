//! Visual constants shared by the page renderer and the indicator detector.

use crate::context::{HsvPixel, Rect};
use crate::font::GLYPH_W;

pub const BACKGROUND_RGB: [u8; 3] = [255, 255, 255];
pub const TEXT_RGB: [u8; 3] = [0, 0, 0];

pub const INPUT_BORDER_RGB: [u8; 3] = [150, 150, 150];
pub const INPUT_HEIGHT: u32 = 22;
pub const INPUT_PAD_X: u32 = 4;
pub const INPUT_PAD_Y: u32 = 4;

/// Focus outline drawn just outside the input rect.
pub const FOCUS_RGB: [u8; 3] = [30, 100, 230];
pub const FOCUS_RING: u32 = 3;
pub const FOCUS_COVERAGE: f64 = 0.8;

pub const CARET_RGB: [u8; 3] = [0, 180, 0];
/// Caret top, relative to the input rect.
pub const CARET_TOP: u32 = 3;
pub const CARET_LEN: u32 = 16;
pub const CARET_MAX_WIDTH: u32 = 3;
pub const CARET_MIN_HEIGHT_FRAC: f64 = 0.6;

pub const SELECTION_RGB: [u8; 3] = [170, 205, 255];

/// Hue window plus saturation and value limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsvBand {
    pub hue_lo: f64,
    pub hue_hi: f64,
    pub sat_lo: f64,
    pub sat_hi: f64,
    pub val_lo: f64,
}

impl HsvBand {
    #[inline]
    pub fn matches(&self, p: HsvPixel) -> bool {
        p.h >= self.hue_lo && p.h <= self.hue_hi && p.s >= self.sat_lo && p.s <= self.sat_hi && p.v >= self.val_lo
    }
}

pub const FOCUS_BAND: HsvBand = HsvBand { hue_lo: 200.0, hue_hi: 250.0, sat_lo: 0.4, sat_hi: 1.0, val_lo: 0.4 };
pub const CARET_BAND: HsvBand = HsvBand { hue_lo: 90.0, hue_hi: 150.0, sat_lo: 0.4, sat_hi: 1.0, val_lo: 0.4 };
pub const SELECTION_BAND: HsvBand = HsvBand { hue_lo: 200.0, hue_hi: 250.0, sat_lo: 0.15, sat_hi: 0.55, val_lo: 0.6 };

/// Top-left pixel of the first text cell inside an input.
pub fn input_text_origin(input: &Rect) -> (u32, u32) {
    (input.x + INPUT_PAD_X, input.y + INPUT_PAD_Y)
}

/// Caret x for a column: the blank last column of the preceding cell.
pub fn caret_x(input: &Rect, column: usize) -> u32 {
    input_text_origin(input).0 + GLYPH_W * column as u32 - 1
}

/// Pixel area painted for a selection of cells `[start, end)`.
pub fn selection_rect(input: &Rect, start: usize, end: usize) -> Option<Rect> {
    let (x0, _) = input_text_origin(input);
    Rect::new(x0 + GLYPH_W * start as u32, input.y + CARET_TOP, GLYPH_W * (end.saturating_sub(start)) as u32, CARET_LEN)
}

/// Interior of an input, inside its one-pixel border.
pub fn input_interior(input: &Rect) -> Rect {
    Rect { x: input.x + 1, y: input.y + 1, w: input.w.saturating_sub(2).max(1), h: input.h.saturating_sub(2).max(1) }
}

/// Number of characters an input of this width can display.
pub fn input_capacity(input: &Rect) -> usize {
    (input.w.saturating_sub(2 * INPUT_PAD_X) / GLYPH_W) as usize
}
