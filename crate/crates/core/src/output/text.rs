use super::graphics::{moved_beyond_bound, validate_graphic_region};
use super::ocr::{normalize_text, OcrResult, OcrService};
use super::{OutputConfig, RegionStatus, RegionVerdict};
use crate::context::{align_in_frame, search_bound, Frame, GrayPlane, Rect};
use crate::manifest::{PageBreakdown, Region};

/// A text-placement problem found by [`text_pos_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacementIssue {
    pub region_id: Option<String>,
    pub detail: String,
}

/// Ids of textual regions that contain the centre of at least one box.
pub fn text_bearing_regions(boxes: &[Rect], breakdown: &PageBreakdown) -> Vec<String> {
    breakdown.textual().filter(|r| boxes.iter().any(|b| r.rect.contains_center_of(b))).map(|r| r.id.clone()).collect()
}

/// Every detected box must be centred inside some region or the submit
/// button, and every textual region listed in `expected_text` must still
/// hold a detected box.
pub fn text_pos_check(detected: &[Rect], breakdown: &PageBreakdown, expected_text: &[String]) -> Result<(), PlacementIssue> {
    for b in detected {
        let owned = breakdown.submit_button.contains_center_of(b) || breakdown.regions.iter().any(|r| r.rect.contains_center_of(b));
        if !owned {
            return Err(PlacementIssue {
                region_id: None,
                detail: format!("text at ({}, {}) size {}x{} belongs to no region", b.x, b.y, b.w, b.h),
            });
        }
    }
    for id in expected_text {
        let Some(region) = breakdown.region(id) else { continue };
        if !detected.iter().any(|b| region.rect.contains_center_of(b)) {
            return Err(PlacementIssue { region_id: Some(id.clone()), detail: "expected text is missing".into() });
        }
    }
    Ok(())
}

/// OCR of `rect` in `frame`; the rect must lie inside the frame.
pub fn read_rect(frame: &Frame, rect: &Rect, ocr: &OcrService) -> OcrResult {
    ocr.read(&GrayPlane::from_frame_rect(frame, rect))
}

/// Aligns, reads both renderings and compares the normalized strings. Low
/// confidence on either side hands the region to the pixel comparison.
pub fn validate_text_region(
    local: &Frame,
    trusted: &Frame,
    region: &Region,
    trusted_text: &OcrResult,
    cfg: &OutputConfig,
    ocr: &OcrService,
) -> RegionVerdict {
    let rect = &region.rect;
    let bound = search_bound(rect.w, rect.h);
    let aligned = align_in_frame(local, trusted, rect, bound);
    let local_rect = rect.translate_clipped(aligned.shift, local.width(), local.height()).unwrap_or(*rect);
    let local_text = read_rect(local, &local_rect, ocr);
    if local_text.confidence < cfg.min_confidence || trusted_text.confidence < cfg.min_confidence {
        return validate_graphic_region(local, trusted, region, cfg);
    }
    let same = normalize_text(&local_text.text) == normalize_text(&trusted_text.text);
    if same && aligned.shift.max_abs() < bound {
        return RegionVerdict::pass(&region.id);
    }
    if let Some(ext) = moved_beyond_bound(local, trusted, rect, &aligned) {
        return RegionVerdict::new(
            &region.id,
            RegionStatus::PositionDifference,
            format!("text found at ({}, {}), beyond the {bound} px bound", ext.shift.dx, ext.shift.dy),
        );
    }
    if same {
        return RegionVerdict::pass(&region.id);
    }
    RegionVerdict::new(
        &region.id,
        RegionStatus::TextMismatch,
        format!("expected {:?}, read {:?}", normalize_text(&trusted_text.text), normalize_text(&local_text.text)),
    )
}

/// Trusted-side reading of a region, computed once per session.
pub fn read_trusted(trusted: &Frame, region: &Region, ocr: &OcrService) -> OcrResult {
    read_rect(trusted, &region.rect, ocr)
}

/// Convenience wrapper that also reads the trusted side.
pub fn validate_text_region_fresh(local: &Frame, trusted: &Frame, region: &Region, cfg: &OutputConfig, ocr: &OcrService) -> RegionVerdict {
    let t = read_trusted(trusted, region, ocr);
    validate_text_region(local, trusted, region, &t, cfg, ocr)
}
