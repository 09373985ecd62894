use thiserror::Error;

use crate::context::Frame;
use crate::manifest::{PageBreakdown, Region};
use crate::output::{normalize_text, read_rect, OcrService};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabelError {
    #[error("input {0} has no textual region on its left")]
    NoCandidate(String),
    #[error("label of input {id} is unreadable (confidence {confidence:.0})")]
    Unreadable { id: String, confidence: u32 },
}

/// The textual region nearest to the left of `input` that overlaps it
/// vertically by at least half the shorter height.
pub fn label_candidate<'a>(input: &Region, breakdown: &'a PageBreakdown) -> Option<&'a Region> {
    let r = &input.rect;
    breakdown
        .textual()
        .filter(|t| t.rect.right() <= r.x)
        .filter(|t| 2 * t.rect.vertical_overlap(r) as u64 >= t.rect.h.min(r.h) as u64)
        .min_by_key(|t| (r.x - t.rect.right(), std::cmp::Reverse(t.rect.vertical_overlap(r)), t.id.clone()))
}

/// Label text for `input`: the breakdown hint when present, otherwise the OCR
/// of the nearest left-hand textual region.
pub fn extract_label(frame: &Frame, input: &Region, breakdown: &PageBreakdown, ocr: &OcrService, min_confidence: f64) -> Result<String, LabelError> {
    if let Some(hint) = &input.label_hint {
        return Ok(hint.clone());
    }
    let cand = label_candidate(input, breakdown).ok_or_else(|| LabelError::NoCandidate(input.id.clone()))?;
    let read = read_rect(frame, &cand.rect, ocr);
    let text = normalize_text(&read.text);
    if text.is_empty() || read.confidence < min_confidence {
        return Err(LabelError::Unreadable { id: input.id.clone(), confidence: read.confidence.max(0.0) as u32 });
    }
    Ok(text)
}
