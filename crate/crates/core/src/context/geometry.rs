use serde::{Deserialize, Serialize};

/// Axis-aligned pixel rectangle, `(x, y)` is the top-left corner.
///
/// Width and height are positive for every rectangle produced by this crate;
/// parsers reject zero-sized rectangles before they get here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Rect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl Rect {
    /// Returns `None` for an empty rectangle.
    pub fn new(x: u32, y: u32, w: u32, h: u32) -> Option<Rect> {
        (w > 0 && h > 0).then_some(Rect { x, y, w, h })
    }

    /// Bounding box of two inclusive corner points.
    pub fn from_corners(x0: u32, y0: u32, x1: u32, y1: u32) -> Rect {
        let (lx, hx) = (x0.min(x1), x0.max(x1));
        let (ly, hy) = (y0.min(y1), y0.max(y1));
        Rect { x: lx, y: ly, w: hx - lx + 1, h: hy - ly + 1 }
    }

    /// Exclusive right edge.
    pub fn right(&self) -> u32 {
        self.x + self.w
    }

    /// Exclusive bottom edge.
    pub fn bottom(&self) -> u32 {
        self.y + self.h
    }

    pub fn area(&self) -> u64 {
        self.w as u64 * self.h as u64
    }

    pub fn contains_point(&self, px: i64, py: i64) -> bool {
        px >= self.x as i64 && py >= self.y as i64 && px < self.right() as i64 && py < self.bottom() as i64
    }

    pub fn contains(&self, other: &Rect) -> bool {
        other.x >= self.x && other.y >= self.y && other.right() <= self.right() && other.bottom() <= self.bottom()
    }

    /// Whether the rectangle's centre lies inside `self`. Centres are compared
    /// in doubled coordinates so odd sizes stay exact.
    pub fn contains_center_of(&self, other: &Rect) -> bool {
        let cx2 = 2 * other.x as u64 + other.w as u64;
        let cy2 = 2 * other.y as u64 + other.h as u64;
        cx2 >= 2 * self.x as u64
            && cx2 < 2 * self.right() as u64
            && cy2 >= 2 * self.y as u64
            && cy2 < 2 * self.bottom() as u64
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.x < other.right() && other.x < self.right() && self.y < other.bottom() && other.y < self.bottom()
    }

    pub fn intersection(&self, other: &Rect) -> Option<Rect> {
        let x0 = self.x.max(other.x);
        let y0 = self.y.max(other.y);
        let x1 = self.right().min(other.right());
        let y1 = self.bottom().min(other.bottom());
        (x1 > x0 && y1 > y0).then(|| Rect { x: x0, y: y0, w: x1 - x0, h: y1 - y0 })
    }

    pub fn union(&self, other: &Rect) -> Rect {
        let x0 = self.x.min(other.x);
        let y0 = self.y.min(other.y);
        let x1 = self.right().max(other.right());
        let y1 = self.bottom().max(other.bottom());
        Rect { x: x0, y: y0, w: x1 - x0, h: y1 - y0 }
    }

    /// Grows the rectangle by `by` on every side, clipped to `[0, width) x [0, height)`.
    pub fn inflate_clipped(&self, by: u32, width: u32, height: u32) -> Rect {
        let x0 = self.x.saturating_sub(by);
        let y0 = self.y.saturating_sub(by);
        let x1 = self.right().saturating_add(by).min(width);
        let y1 = self.bottom().saturating_add(by).min(height);
        Rect { x: x0, y: y0, w: x1.saturating_sub(x0).max(1), h: y1.saturating_sub(y0).max(1) }
    }

    /// Whether the rectangle fits inside a `width x height` canvas.
    pub fn within(&self, width: u32, height: u32) -> bool {
        self.right() <= width && self.bottom() <= height
    }

    /// Translates by a signed shift and clips to the canvas.
    pub fn translate_clipped(&self, shift: Shift, width: u32, height: u32) -> Option<Rect> {
        let x0 = (self.x as i64 + shift.dx as i64).max(0);
        let y0 = (self.y as i64 + shift.dy as i64).max(0);
        let x1 = (self.right() as i64 + shift.dx as i64).min(width as i64);
        let y1 = (self.bottom() as i64 + shift.dy as i64).min(height as i64);
        (x1 > x0 && y1 > y0).then(|| Rect { x: x0 as u32, y: y0 as u32, w: (x1 - x0) as u32, h: (y1 - y0) as u32 })
    }

    /// Horizontal gap between two rectangles, 0 when they overlap in x.
    pub fn x_gap(&self, other: &Rect) -> u32 {
        if other.x >= self.right() {
            other.x - self.right()
        } else if self.x >= other.right() {
            self.x - other.right()
        } else {
            0
        }
    }

    /// Vertical gap between two rectangles, 0 when they overlap in y.
    pub fn y_gap(&self, other: &Rect) -> u32 {
        if other.y >= self.bottom() {
            other.y - self.bottom()
        } else if self.y >= other.bottom() {
            self.y - other.bottom()
        } else {
            0
        }
    }

    /// Rows shared with `other`.
    pub fn vertical_overlap(&self, other: &Rect) -> u32 {
        let y0 = self.y.max(other.y);
        let y1 = self.bottom().min(other.bottom());
        y1.saturating_sub(y0)
    }
}

/// Signed translation found by alignment.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Shift {
    pub dx: i32,
    pub dy: i32,
}

impl Shift {
    pub const ZERO: Shift = Shift { dx: 0, dy: 0 };

    pub fn new(dx: i32, dy: i32) -> Shift {
        Shift { dx, dy }
    }

    /// Chebyshev magnitude.
    pub fn max_abs(&self) -> u32 {
        self.dx.unsigned_abs().max(self.dy.unsigned_abs())
    }

    pub fn manhattan(&self) -> u32 {
        self.dx.unsigned_abs() + self.dy.unsigned_abs()
    }
}
