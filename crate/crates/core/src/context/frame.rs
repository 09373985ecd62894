use std::path::Path;

use thiserror::Error;

use super::geometry::Rect;

const PNG_MAGIC: [u8; 8] = [0x89, b'P', b'N', b'G', b'\r', b'\n', 0x1a, b'\n'];
const RAW_HEADER_LEN: usize = 8;

#[derive(Debug, Error)]
pub enum FrameError {
    #[error("pixel buffer holds {actual} bytes, expected {expected} for {width}x{height} RGB")]
    BufferSize { width: u32, height: u32, expected: usize, actual: usize },
    #[error("frame dimensions must be positive, got {width}x{height}")]
    Empty { width: u32, height: u32 },
    #[error("rect {rect:?} is outside the {width}x{height} frame")]
    OutOfBounds { rect: Rect, width: u32, height: u32 },
    #[error("frame sizes differ: {a:?} vs {b:?}")]
    DimensionMismatch { a: (u32, u32), b: (u32, u32) },
    #[error("raw frame is shorter than its header")]
    TruncatedRaw,
    #[error("png: {0}")]
    Png(#[from] image::ImageError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// One captured screen sample: an RGB8 raster plus its capture time.
///
/// Pixels are row-major, three bytes per pixel. The struct has no mutators;
/// derive new frames through [`Frame::new`] from an owned buffer.
#[derive(Clone, PartialEq, Eq)]
pub struct Frame {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
    t_ms: u64,
}

impl std::fmt::Debug for Frame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Frame")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("t_ms", &self.t_ms)
            .finish_non_exhaustive()
    }
}

impl Frame {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>, t_ms: u64) -> Result<Frame, FrameError> {
        if width == 0 || height == 0 {
            return Err(FrameError::Empty { width, height });
        }
        let expected = width as usize * height as usize * 3;
        if pixels.len() != expected {
            return Err(FrameError::BufferSize { width, height, expected, actual: pixels.len() });
        }
        Ok(Frame { width, height, pixels, t_ms })
    }

    /// Uniformly coloured frame.
    pub fn filled(width: u32, height: u32, rgb: [u8; 3], t_ms: u64) -> Result<Frame, FrameError> {
        let n = width as usize * height as usize;
        let mut pixels = Vec::with_capacity(n * 3);
        for _ in 0..n {
            pixels.extend_from_slice(&rgb);
        }
        Frame::new(width, height, pixels, t_ms)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn t_ms(&self) -> u64 {
        self.t_ms
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    pub fn bounds(&self) -> Rect {
        Rect { x: 0, y: 0, w: self.width, h: self.height }
    }

    /// Same raster, different capture time.
    pub fn with_time(&self, t_ms: u64) -> Frame {
        Frame { t_ms, ..self.clone() }
    }

    #[inline]
    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub fn same_size(&self, other: &Frame) -> Result<(), FrameError> {
        if self.width != other.width || self.height != other.height {
            return Err(FrameError::DimensionMismatch {
                a: (self.width, self.height),
                b: (other.width, other.height),
            });
        }
        Ok(())
    }

    pub fn check_rect(&self, rect: &Rect) -> Result<(), FrameError> {
        if rect.w == 0 || rect.h == 0 || !rect.within(self.width, self.height) {
            return Err(FrameError::OutOfBounds { rect: *rect, width: self.width, height: self.height });
        }
        Ok(())
    }

    /// Raw RGB bytes of `rect`, rows concatenated top to bottom.
    pub fn crop_bytes(&self, rect: &Rect) -> Result<Vec<u8>, FrameError> {
        self.check_rect(rect)?;
        let mut out = Vec::with_capacity(rect.area() as usize * 3);
        let stride = self.width as usize * 3;
        for y in rect.y..rect.bottom() {
            let start = y as usize * stride + rect.x as usize * 3;
            out.extend_from_slice(&self.pixels[start..start + rect.w as usize * 3]);
        }
        Ok(out)
    }

    /// Sub-frame covering `rect`; keeps the capture time.
    pub fn crop(&self, rect: &Rect) -> Result<Frame, FrameError> {
        let bytes = self.crop_bytes(rect)?;
        Frame::new(rect.w, rect.h, bytes, self.t_ms)
    }

    /// Decodes PNG (RGB or RGBA, alpha dropped) or the raw format: an 8-byte
    /// header of big-endian `u32` width and height followed by RGB bytes.
    pub fn decode(bytes: &[u8], t_ms: u64) -> Result<Frame, FrameError> {
        if bytes.starts_with(&PNG_MAGIC) {
            let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)?.into_rgb8();
            let (w, h) = img.dimensions();
            return Frame::new(w, h, img.into_raw(), t_ms);
        }
        if bytes.len() < RAW_HEADER_LEN {
            return Err(FrameError::TruncatedRaw);
        }
        let width = u32::from_be_bytes(bytes[0..4].try_into().expect("4 bytes"));
        let height = u32::from_be_bytes(bytes[4..8].try_into().expect("4 bytes"));
        Frame::new(width, height, bytes[RAW_HEADER_LEN..].to_vec(), t_ms)
    }

    pub fn load(path: &Path, t_ms: u64) -> Result<Frame, FrameError> {
        let bytes = std::fs::read(path).map_err(|source| FrameError::Io { path: path.display().to_string(), source })?;
        Frame::decode(&bytes, t_ms)
    }

    pub fn encode_raw(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(RAW_HEADER_LEN + self.pixels.len());
        out.extend_from_slice(&self.width.to_be_bytes());
        out.extend_from_slice(&self.height.to_be_bytes());
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn encode_png(&self) -> Result<Vec<u8>, FrameError> {
        let mut out = Vec::new();
        image::write_buffer_with_format(
            &mut std::io::Cursor::new(&mut out),
            &self.pixels,
            self.width,
            self.height,
            image::ExtendedColorType::Rgb8,
            image::ImageFormat::Png,
        )?;
        Ok(out)
    }

    pub fn save_png(&self, path: &Path) -> Result<(), FrameError> {
        let bytes = self.encode_png()?;
        std::fs::write(path, bytes).map_err(|source| FrameError::Io { path: path.display().to_string(), source })
    }
}
