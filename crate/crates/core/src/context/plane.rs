use super::frame::Frame;
use super::geometry::Rect;

/// Integer Rec.601 luma, `0.299 r + 0.587 g + 0.114 b` rounded.
#[inline]
pub fn luma(rgb: [u8; 3]) -> u8 {
    ((299 * rgb[0] as u32 + 587 * rgb[1] as u32 + 114 * rgb[2] as u32 + 500) / 1000) as u8
}

/// Single-channel 8-bit raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayPlane {
    pub width: u32,
    pub height: u32,
    pub data: Vec<u8>,
}

impl GrayPlane {
    pub fn new(width: u32, height: u32, fill: u8) -> GrayPlane {
        GrayPlane { width, height, data: vec![fill; width as usize * height as usize] }
    }

    /// Luma of the whole frame.
    pub fn from_frame(frame: &Frame) -> GrayPlane {
        let data = frame.pixels().chunks_exact(3).map(|p| luma([p[0], p[1], p[2]])).collect();
        GrayPlane { width: frame.width(), height: frame.height(), data }
    }

    /// Luma of `rect`; the caller guarantees the rect is inside the frame.
    pub fn from_frame_rect(frame: &Frame, rect: &Rect) -> GrayPlane {
        let mut data = Vec::with_capacity(rect.area() as usize);
        for y in rect.y..rect.bottom() {
            for x in rect.x..rect.right() {
                data.push(luma(frame.pixel(x, y)));
            }
        }
        GrayPlane { width: rect.w, height: rect.h, data }
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.data[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, v: u8) {
        self.data[y as usize * self.width as usize + x as usize] = v;
    }

    pub fn row(&self, y: u32) -> &[u8] {
        let s = y as usize * self.width as usize;
        &self.data[s..s + self.width as usize]
    }

    pub fn histogram(&self) -> [u32; 256] {
        let mut h = [0u32; 256];
        for &v in &self.data {
            h[v as usize] += 1;
        }
        h
    }
}
