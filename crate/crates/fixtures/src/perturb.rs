use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use trustview_core::context::{hue_distance, hsv_to_rgb, rgb_to_hsv, HsvPixel, HsvThresholds, Rect};
use trustview_core::style::BACKGROUND_RGB;

use crate::canvas::Canvas;
use crate::page::{ElementKind, PageSpec};
use crate::session::SyntheticSession;

/// Benign per-channel ceiling: a jittered pixel must differ from its
/// original by strictly less than this percentage of each channel's range.
pub const ENVELOPE_PERCENT: f64 = 15.0;
pub const MAX_ANTIALIAS_BLEND: f64 = 0.5;

/// Pixel-level rendering deviation applied to every local frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Perturbation {
    /// Adds `(dh, ds, dv)` to each pixel, halving the shift for any pixel
    /// whose re-measured difference would reach [`ENVELOPE_PERCENT`].
    Jitter { dh: f64, ds: f64, dv: f64 },
    /// Blends a random `fraction` of background pixels that touch dark ink
    /// toward the ink, by up to `max_blend`.
    Antialias { seed: u64, max_blend: f64, fraction: f64 },
    /// Unclamped value shift over `rect`.
    Patch { rect: Rect, dv: f64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PerturbError {
    #[error("perturbation outside the benign envelope: {0}")]
    OutOfEnvelope(String),
    #[error("no element named {0:?}")]
    UnknownElement(String),
    #[error("element {0:?} cannot be moved")]
    NotMovable(String),
    #[error("moved element {0:?} would leave the viewport")]
    LeavesViewport(String),
    #[error("moved element {0:?} would overlap {1:?}")]
    Overlap(String, String),
}

/// True when every channel of `b` is strictly inside the envelope around `a`.
pub fn strictly_inside(a: HsvPixel, b: HsvPixel, t: &HsvThresholds) -> bool {
    hue_distance(a.h, b.h) < t.hue_deg && (a.s - b.s).abs() < t.sat && (a.v - b.v).abs() < t.val
}

fn jitter_pixel(rgb: [u8; 3], dh: f64, ds: f64, dv: f64, t: &HsvThresholds) -> [u8; 3] {
    let p = rgb_to_hsv(rgb[0], rgb[1], rgb[2]);
    let mut f = 1.0;
    for _ in 0..12 {
        let q = HsvPixel { h: (p.h + f * dh).rem_euclid(360.0), s: (p.s + f * ds).clamp(0.0, 1.0), v: (p.v + f * dv).clamp(0.0, 1.0) };
        let out = hsv_to_rgb(q);
        if strictly_inside(p, rgb_to_hsv(out[0], out[1], out[2]), t) {
            return out;
        }
        f /= 2.0;
    }
    rgb
}

fn is_ink(rgb: [u8; 3]) -> bool {
    rgb.iter().all(|&c| c < 100)
}

impl Perturbation {
    pub fn apply(&self, c: &mut Canvas) {
        match *self {
            Perturbation::Jitter { dh, ds, dv } => {
                let t = HsvThresholds::from_percent(ENVELOPE_PERCENT);
                let mut memo: HashMap<[u8; 3], [u8; 3]> = HashMap::new();
                for px in c.px.chunks_exact_mut(3) {
                    let rgb = [px[0], px[1], px[2]];
                    let out = *memo.entry(rgb).or_insert_with(|| jitter_pixel(rgb, dh, ds, dv, &t));
                    px.copy_from_slice(&out);
                }
            }
            Perturbation::Antialias { seed, max_blend, fraction } => {
                let src = c.clone();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for y in 0..c.height {
                    for x in 0..c.width {
                        if src.get(x, y) != BACKGROUND_RGB {
                            continue;
                        }
                        let ink = [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)].iter().find_map(|(dx, dy)| {
                            let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                            if nx < 0 || ny < 0 || nx >= c.width as i64 || ny >= c.height as i64 {
                                return None;
                            }
                            let n = src.get(nx as u32, ny as u32);
                            is_ink(n).then_some(n)
                        });
                        let Some(ink) = ink else { continue };
                        if rng.random::<f64>() >= fraction {
                            continue;
                        }
                        let a = rng.random_range(0.1..=max_blend.max(0.1));
                        let blend = |i: usize| (255.0 * (1.0 - a) + ink[i] as f64 * a).round() as u8;
                        c.put(x as i64, y as i64, [blend(0), blend(1), blend(2)]);
                    }
                }
            }
            Perturbation::Patch { rect, dv } => {
                for y in rect.y..rect.bottom().min(c.height) {
                    for x in rect.x..rect.right().min(c.width) {
                        let [r, g, b] = c.get(x, y);
                        let p = rgb_to_hsv(r, g, b);
                        c.put(x as i64, y as i64, hsv_to_rgb(HsvPixel { v: (p.v + dv).clamp(0.0, 1.0), ..p }));
                    }
                }
            }
        }
    }

    /// Rejects magnitudes outside the benign envelope.
    pub fn check_benign(&self) -> Result<(), PerturbError> {
        let t = HsvThresholds::from_percent(ENVELOPE_PERCENT);
        match *self {
            Perturbation::Jitter { dh, ds, dv } => {
                if !(dh.abs() < t.hue_deg && ds.abs() < t.sat && dv.abs() < t.val) {
                    return Err(PerturbError::OutOfEnvelope(format!("jitter ({dh}, {ds}, {dv})")));
                }
            }
            Perturbation::Antialias { max_blend, fraction, .. } => {
                if !(0.0..=MAX_ANTIALIAS_BLEND).contains(&max_blend) || !(0.0..=1.0).contains(&fraction) {
                    return Err(PerturbError::OutOfEnvelope(format!("antialias blend {max_blend}, fraction {fraction}")));
                }
            }
            Perturbation::Patch { dv, .. } => {
                if dv.abs() >= t.val {
                    return Err(PerturbError::OutOfEnvelope(format!("patch dv {dv}")));
                }
            }
        }
        Ok(())
    }
}

/// Translation of one text or image element in the host's rendering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementShift {
    pub element: String,
    pub dx: i32,
    pub dy: i32,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Magnitude {
    pub pixel: Vec<Perturbation>,
    pub shift: Option<ElementShift>,
}

impl Magnitude {
    pub fn is_zero(&self) -> bool {
        self.pixel.is_empty() && self.shift.as_ref().is_none_or(|s| s.dx == 0 && s.dy == 0)
    }
}

/// Moves one element without any magnitude limit.
pub fn shift_element(spec: &PageSpec, shift: &ElementShift) -> Result<PageSpec, PerturbError> {
    let mut out = spec.clone();
    let id = &shift.element;
    let e = out.elements.iter_mut().find(|e| e.id == *id).ok_or_else(|| PerturbError::UnknownElement(id.clone()))?;
    if !matches!(e.kind, ElementKind::Text { .. } | ElementKind::Image { .. }) {
        return Err(PerturbError::NotMovable(id.clone()));
    }
    let (nx, ny) = (e.rect.x as i64 + shift.dx as i64, e.rect.y as i64 + shift.dy as i64);
    if nx < 0 || ny < 0 || nx as u64 + e.rect.w as u64 > spec.width as u64 || ny as u64 + e.rect.h as u64 > spec.height as u64 {
        return Err(PerturbError::LeavesViewport(id.clone()));
    }
    e.rect.x = nx as u32;
    e.rect.y = ny as u32;
    let moved = e.rect;
    if let Some(other) = out.elements.iter().find(|o| o.id != *id && o.rect.intersects(&moved)) {
        return Err(PerturbError::Overlap(id.clone(), other.id.clone()));
    }
    Ok(out)
}

/// Applies `m` after checking every part of it against the benign envelope.
pub fn perturb_benign(session: &SyntheticSession, m: &Magnitude) -> Result<SyntheticSession, PerturbError> {
    for p in &m.pixel {
        p.check_benign()?;
    }
    if let Some(s) = &m.shift {
        let e = session.local_spec.element(&s.element).ok_or_else(|| PerturbError::UnknownElement(s.element.clone()))?;
        if 10 * s.dx.unsigned_abs() >= e.rect.w || 10 * s.dy.unsigned_abs() >= e.rect.h {
            return Err(PerturbError::OutOfEnvelope(format!("shift ({}, {}) of {:?}", s.dx, s.dy, s.element)));
        }
    }
    perturb_unchecked(session, m)
}

/// Applies `m` with no envelope check.
pub fn perturb_unchecked(session: &SyntheticSession, m: &Magnitude) -> Result<SyntheticSession, PerturbError> {
    let mut out = session.clone();
    if m.is_zero() {
        return Ok(out);
    }
    if let Some(s) = &m.shift {
        out.local_spec = shift_element(&out.local_spec, s)?;
    }
    out.perturbations.extend(m.pixel.iter().cloned());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jitter_stays_strictly_inside() {
        let t = HsvThresholds::from_percent(ENVELOPE_PERCENT);
        for rgb in [[0, 0, 0], [255, 255, 255], [3, 2, 1], [150, 150, 150], [30, 100, 230], [255, 0, 4]] {
            let out = jitter_pixel(rgb, 9.0, 0.14, -0.14, &t);
            assert!(strictly_inside(rgb_to_hsv(rgb[0], rgb[1], rgb[2]), rgb_to_hsv(out[0], out[1], out[2]), &t), "{rgb:?} -> {out:?}");
        }
    }

    #[test]
    fn envelope_check() {
        assert!(Perturbation::Jitter { dh: 0.0, ds: 0.0, dv: -0.10 }.check_benign().is_ok());
        assert!(Perturbation::Jitter { dh: 0.0, ds: 0.0, dv: 0.15 }.check_benign().is_err());
        assert!(Perturbation::Patch { rect: Rect { x: 0, y: 0, w: 1, h: 1 }, dv: 0.18 }.check_benign().is_err());
        assert!(Perturbation::Antialias { seed: 1, max_blend: 0.6, fraction: 0.5 }.check_benign().is_err());
    }
}
