use super::detect::components;
use super::{OutputConfig, RegionStatus, RegionVerdict};
use crate::context::{align_in_frame, rgb_to_hsv, search_bound, Alignment, Frame, HsvThresholds, Rect, Shift};
use crate::manifest::Region;

/// Flag mask over `rect` (row-major, `rect.w x rect.h`): trusted pixel `p`
/// against local pixel `p + shift`. Pixels whose counterpart falls outside
/// the local frame are not flagged.
pub fn flagged_pixels(local: &Frame, trusted: &Frame, rect: &Rect, shift: Shift, thr: &HsvThresholds) -> Vec<bool> {
    let mut mask = vec![false; rect.area() as usize];
    let (lw, lh) = (local.width() as i64, local.height() as i64);
    for y in rect.y..rect.bottom() {
        let ly = y as i64 + shift.dy as i64;
        if ly < 0 || ly >= lh {
            continue;
        }
        for x in rect.x..rect.right() {
            let lx = x as i64 + shift.dx as i64;
            if lx < 0 || lx >= lw {
                continue;
            }
            let t = trusted.pixel(x, y);
            let l = local.pixel(lx as u32, ly as u32);
            if t != l && thr.exceeded(rgb_to_hsv(t[0], t[1], t[2]), rgb_to_hsv(l[0], l[1], l[2])) {
                mask[((y - rect.y) * rect.w + (x - rect.x)) as usize] = true;
            }
        }
    }
    mask
}

/// Flagged components whose bounding box does not fit inside the noise
/// bound of `(w / divisor) x (h / divisor)`.
pub fn surviving_components(mask: &[bool], w: u32, h: u32, divisor: u32) -> Vec<Rect> {
    components(mask, w, h)
        .into_iter()
        .filter(|c| c.rect.w as u64 * divisor as u64 > w as u64 || c.rect.h as u64 * divisor as u64 > h as u64)
        .map(|c| c.rect)
        .collect()
}

fn survivors_at(local: &Frame, trusted: &Frame, rect: &Rect, shift: Shift, cfg: &OutputConfig) -> Vec<Rect> {
    let mask = flagged_pixels(local, trusted, rect, shift, &cfg.hsv);
    surviving_components(&mask, rect.w, rect.h, cfg.noise_divisor)
}

/// Extended search out to twice the bound. Returns the shift when the
/// content matches strictly better somewhere beyond the bound.
pub(crate) fn moved_beyond_bound(local: &Frame, trusted: &Frame, rect: &Rect, inner: &Alignment) -> Option<Alignment> {
    let bound = search_bound(rect.w, rect.h);
    let ext = align_in_frame(local, trusted, rect, 2 * bound);
    (ext.shift.max_abs() > bound && ext.cheaper_than(inner)).then_some(ext)
}

/// Pixel-level comparison of one region after alignment.
pub fn validate_graphic_region(local: &Frame, trusted: &Frame, region: &Region, cfg: &OutputConfig) -> RegionVerdict {
    let rect = &region.rect;
    let bound = search_bound(rect.w, rect.h);
    let aligned = align_in_frame(local, trusted, rect, bound);
    let survivors = survivors_at(local, trusted, rect, aligned.shift, cfg);
    if survivors.is_empty() && aligned.shift.max_abs() < bound {
        return RegionVerdict::pass(&region.id);
    }
    if let Some(ext) = moved_beyond_bound(local, trusted, rect, &aligned) {
        if survivors_at(local, trusted, rect, ext.shift, cfg).is_empty() {
            return RegionVerdict::new(
                &region.id,
                RegionStatus::PositionDifference,
                format!("content found at ({}, {}), beyond the {bound} px bound", ext.shift.dx, ext.shift.dy),
            );
        }
    }
    if survivors.is_empty() {
        return RegionVerdict::pass(&region.id);
    }
    let area: u64 = survivors.iter().map(Rect::area).sum();
    let largest = survivors.iter().max_by_key(|r| r.area()).expect("non-empty");
    RegionVerdict::new(
        &region.id,
        RegionStatus::ColorDifference,
        format!(
            "{} changed area(s) above the noise bound, largest {}x{} at ({}, {}), {area} px total",
            survivors.len(),
            largest.w,
            largest.h,
            rect.x + largest.x,
            rect.y + largest.y
        ),
    )
}
