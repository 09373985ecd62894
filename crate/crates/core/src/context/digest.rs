use sha2::{Digest as _, Sha256};

use super::frame::{Frame, FrameError};
use super::geometry::Rect;

/// SHA-256 output used as a content-addressed cache key.
pub type Digest = [u8; 32];

pub fn digest_bytes(bytes: &[u8]) -> Digest {
    Sha256::digest(bytes).into()
}

/// SHA-256 over the raw RGB bytes of `rect`, rows top to bottom.
pub fn digest_region(frame: &Frame, rect: &Rect) -> Result<Digest, FrameError> {
    frame.check_rect(rect)?;
    let mut hasher = Sha256::new();
    let stride = frame.width() as usize * 3;
    let px = frame.pixels();
    for y in rect.y..rect.bottom() {
        let start = y as usize * stride + rect.x as usize * 3;
        hasher.update(&px[start..start + rect.w as usize * 3]);
    }
    Ok(hasher.finalize().into())
}

pub fn digest_hex(d: &Digest) -> String {
    hex::encode(d)
}
