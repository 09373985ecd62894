//! Raster, geometry, colour, hashing and alignment primitives shared by every
//! validator. Everything here is immutable once built and free of side effects.

mod align;
mod color;
mod digest;
mod frame;
mod geometry;
mod plane;

pub use align::{align_in_frame, align_translation, search_bound, Alignment};
pub use color::{hsv_to_rgb, hue_distance, rgb_to_hsv, HsvPixel, HsvThresholds};
pub use digest::{digest_bytes, digest_region, digest_hex, Digest};
pub use frame::{Frame, FrameError};
pub use geometry::{Rect, Shift};
pub use plane::{luma, GrayPlane};
