use super::binarize::otsu;
use crate::context::GrayPlane;

pub const UPSCALE: u32 = 3;
/// Class means closer than this are treated as a blank region.
pub const MIN_CONTRAST: f64 = 60.0;

/// Native-resolution ink mask of a region: Otsu split, minority class as
/// ink. `None` when the region has no usable contrast.
pub fn ink_mask(region: &GrayPlane) -> Option<Vec<bool>> {
    let split = otsu(&region.histogram())?;
    if split.contrast() < MIN_CONTRAST {
        return None;
    }
    let dark = split.dark_is_minority();
    Some(region.data.iter().map(|&v| (v <= split.threshold) == dark).collect())
}

/// Binarizes to black ink on white, enlarges 3x with nearest neighbour and
/// thickens strokes with one 3x3 dilation of the dark pixels.
pub fn preprocess_for_ocr(region: &GrayPlane) -> GrayPlane {
    let (w, h) = (region.width * UPSCALE, region.height * UPSCALE);
    let mut out = GrayPlane::new(w, h, 255);
    let Some(mask) = ink_mask(region) else {
        return out;
    };
    let mut big = vec![false; (w * h) as usize];
    for y in 0..h {
        for x in 0..w {
            big[(y * w + x) as usize] = mask[((y / UPSCALE) * region.width + x / UPSCALE) as usize];
        }
    }
    for y in 0..h {
        for x in 0..w {
            let dark = (y.saturating_sub(1)..=(y + 1).min(h - 1))
                .any(|ny| (x.saturating_sub(1)..=(x + 1).min(w - 1)).any(|nx| big[(ny * w + nx) as usize]));
            if dark {
                out.set(x, y, 0);
            }
        }
    }
    out
}

/// Recovers the native binary image from a preprocessed plane by reading
/// block centres; dilation never reaches a centre from another block.
pub fn native_ink(processed: &GrayPlane) -> (u32, u32, Vec<bool>) {
    let (w, h) = (processed.width / UPSCALE, processed.height / UPSCALE);
    let mut ink = Vec::with_capacity((w * h) as usize);
    for y in 0..h {
        for x in 0..w {
            ink.push(processed.get(x * UPSCALE + 1, y * UPSCALE + 1) < 128);
        }
    }
    (w, h, ink)
}
