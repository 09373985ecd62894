use trustview_core::context::{Frame, Rect};
use trustview_core::font::{ink, GLYPH_H, GLYPH_W};

/// Mutable RGB raster used while composing a page.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Canvas {
    pub width: u32,
    pub height: u32,
    pub px: Vec<u8>,
}

impl Canvas {
    pub fn new(width: u32, height: u32, rgb: [u8; 3]) -> Canvas {
        let mut px = Vec::with_capacity((width * height * 3) as usize);
        for _ in 0..width * height {
            px.extend_from_slice(&rgb);
        }
        Canvas { width, height, px }
    }

    pub fn from_frame(f: &Frame) -> Canvas {
        Canvas { width: f.width(), height: f.height(), px: f.pixels().to_vec() }
    }

    pub fn into_frame(self, t_ms: u64) -> Frame {
        Frame::new(self.width, self.height, self.px, t_ms).expect("canvas dimensions are consistent")
    }

    #[inline]
    fn idx(&self, x: u32, y: u32) -> usize {
        ((y * self.width + x) * 3) as usize
    }

    pub fn get(&self, x: u32, y: u32) -> [u8; 3] {
        let i = self.idx(x, y);
        [self.px[i], self.px[i + 1], self.px[i + 2]]
    }

    /// Out-of-bounds writes are dropped.
    pub fn put(&mut self, x: i64, y: i64, rgb: [u8; 3]) {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return;
        }
        let i = self.idx(x as u32, y as u32);
        self.px[i..i + 3].copy_from_slice(&rgb);
    }

    pub fn fill(&mut self, r: &Rect, rgb: [u8; 3]) {
        for y in r.y..r.bottom() {
            for x in r.x..r.right() {
                self.put(x as i64, y as i64, rgb);
            }
        }
    }

    /// One-pixel outline on the inside of `r`.
    pub fn outline(&mut self, r: &Rect, rgb: [u8; 3]) {
        for x in r.x..r.right() {
            self.put(x as i64, r.y as i64, rgb);
            self.put(x as i64, r.bottom() as i64 - 1, rgb);
        }
        for y in r.y..r.bottom() {
            self.put(r.x as i64, y as i64, rgb);
            self.put(r.right() as i64 - 1, y as i64, rgb);
        }
    }

    /// Band of `thickness` pixels just outside `r`.
    pub fn ring(&mut self, r: &Rect, thickness: u32, rgb: [u8; 3]) {
        let t = thickness as i64;
        let (x0, y0, x1, y1) = (r.x as i64 - t, r.y as i64 - t, r.right() as i64 + t, r.bottom() as i64 + t);
        for y in y0..y1 {
            for x in x0..x1 {
                if !r.contains_point(x, y) {
                    self.put(x, y, rgb);
                }
            }
        }
    }

    /// Draws `text` with its first cell's top-left at `(x, y)`; returns the
    /// cell rect of every non-space character.
    pub fn text(&mut self, text: &str, x: i64, y: i64, rgb: [u8; 3]) -> Vec<(char, Rect)> {
        let mut cells = Vec::new();
        for (i, c) in text.chars().enumerate() {
            let cx = x + i as i64 * GLYPH_W as i64;
            for gy in 0..GLYPH_H {
                for gx in 0..GLYPH_W {
                    if ink(c, gx, gy) {
                        self.put(cx + gx as i64, y + gy as i64, rgb);
                    }
                }
            }
            if c != ' ' && cx >= 0 && y >= 0 {
                cells.push((c, Rect { x: cx as u32, y: y as u32, w: GLYPH_W, h: GLYPH_H }));
            }
        }
        cells
    }

    /// Copies `src` out of `from` and pastes it with its corner at `(x, y)`.
    pub fn blit(&mut self, from: &Canvas, src: &Rect, x: i64, y: i64) {
        for sy in 0..src.h {
            for sx in 0..src.w {
                let rgb = from.get(src.x + sx, src.y + sy);
                self.put(x + sx as i64, y + sy as i64, rgb);
            }
        }
    }
}
