//! Per-region comparison of a local frame against the trusted rendering.

mod binarize;
mod detect;
mod graphics;
mod ocr;
mod preprocess;
mod text;

use serde::{Deserialize, Serialize};

use crate::context::HsvThresholds;

pub use binarize::{otsu, OtsuSplit};
pub use detect::{components, merge_boxes, BoxSource, Component, TextBox, TextDetector, MERGE_DY};
pub use graphics::{flagged_pixels, surviving_components, validate_graphic_region};
pub use ocr::{normalize_text, recognize_text, OcrEngine, OcrResult, OcrService, TemplateOcr};
pub use preprocess::{ink_mask, native_ink, preprocess_for_ocr, MIN_CONTRAST, UPSCALE};
pub use text::{
    read_rect, read_trusted, text_bearing_regions, text_pos_check, validate_text_region, validate_text_region_fresh,
    PlacementIssue,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionStatus {
    Pass,
    ContentDifference,
    ColorDifference,
    PositionDifference,
    TextMismatch,
}

impl RegionStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionStatus::Pass => "pass",
            RegionStatus::ContentDifference => "content_difference",
            RegionStatus::ColorDifference => "color_difference",
            RegionStatus::PositionDifference => "position_difference",
            RegionStatus::TextMismatch => "text_mismatch",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RegionVerdict {
    pub region_id: String,
    pub status: RegionStatus,
    pub detail: String,
}

impl RegionVerdict {
    pub fn new(region_id: &str, status: RegionStatus, detail: String) -> RegionVerdict {
        RegionVerdict { region_id: region_id.to_string(), status, detail }
    }

    pub fn pass(region_id: &str) -> RegionVerdict {
        RegionVerdict::new(region_id, RegionStatus::Pass, String::new())
    }

    pub fn passed(&self) -> bool {
        self.status == RegionStatus::Pass
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    pub hsv: HsvThresholds,
    /// OCR confidence needed on both sides before strings are compared.
    pub min_confidence: f64,
    /// Flagged components within `1/noise_divisor` of the region size are dropped.
    pub noise_divisor: u32,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { hsv: HsvThresholds::default(), min_confidence: 70.0, noise_divisor: 70 }
    }
}
