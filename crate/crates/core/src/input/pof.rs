use super::{Caret, ConsistencyViolation, PofState, Selection};
use crate::context::{luma, rgb_to_hsv, Frame, GrayPlane, Rect};
use crate::manifest::{PageBreakdown, Region};
use crate::output::{components, OcrResult, OcrService};
use crate::style::{
    input_interior, HsvBand, CARET_BAND, CARET_MAX_WIDTH, CARET_MIN_HEIGHT_FRAC, FOCUS_BAND, FOCUS_COVERAGE, FOCUS_RING,
    SELECTION_BAND,
};

/// Every indicator found, before the one-of-each rule is applied.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Indicators {
    pub focus: Vec<String>,
    /// Caret bar rects in frame coordinates.
    pub carets: Vec<(String, Rect)>,
    /// Selection backgrounds in frame coordinates.
    pub selections: Vec<(String, Rect)>,
}

/// Indicators after the consistency rules, still in pixels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawPof {
    pub focus: Option<String>,
    pub caret: Option<(String, Rect)>,
    pub selection: Option<(String, Rect)>,
}

fn band_components(frame: &Frame, area: &Rect, band: &HsvBand) -> Vec<Rect> {
    let mut mask = Vec::with_capacity(area.area() as usize);
    for y in area.y..area.bottom() {
        for x in area.x..area.right() {
            let p = frame.pixel(x, y);
            mask.push(band.matches(rgb_to_hsv(p[0], p[1], p[2])));
        }
    }
    components(&mask, area.w, area.h)
        .into_iter()
        .map(|c| Rect { x: c.rect.x + area.x, y: c.rect.y + area.y, ..c.rect })
        .collect()
}

fn focus_ring_covered(frame: &Frame, input: &Rect) -> bool {
    let outer = input.inflate_clipped(FOCUS_RING, frame.width(), frame.height());
    let (mut ring, mut hit) = (0u64, 0u64);
    for y in outer.y..outer.bottom() {
        for x in outer.x..outer.right() {
            if input.contains_point(x as i64, y as i64) {
                continue;
            }
            ring += 1;
            let p = frame.pixel(x, y);
            if FOCUS_BAND.matches(rgb_to_hsv(p[0], p[1], p[2])) {
                hit += 1;
            }
        }
    }
    ring > 0 && hit as f64 >= FOCUS_COVERAGE * ring as f64
}

/// Scans every input for a focus ring, caret bars and selection runs.
pub fn detect_indicators(frame: &Frame, breakdown: &PageBreakdown) -> Indicators {
    let mut ind = Indicators::default();
    for input in breakdown.inputs() {
        let rect = &input.rect;
        if focus_ring_covered(frame, rect) {
            ind.focus.push(input.id.clone());
        }
        let interior = input_interior(rect);
        let min_h = CARET_MIN_HEIGHT_FRAC * rect.h as f64;
        for c in band_components(frame, &interior, &CARET_BAND) {
            if (1..=CARET_MAX_WIDTH).contains(&c.w) && c.h as f64 >= min_h {
                ind.carets.push((input.id.clone(), c));
            }
        }
        for s in band_components(frame, &interior, &SELECTION_BAND) {
            if s.w >= 2 && s.h as f64 >= min_h {
                ind.selections.push((input.id.clone(), s));
            }
        }
    }
    ind
}

/// At most one of each indicator, all on the same input.
pub fn check_consistency(ind: &Indicators) -> Result<RawPof, ConsistencyViolation> {
    if ind.focus.len() > 1 {
        return Err(ConsistencyViolation::new("multiple_focus", format!("focus boxes on {:?}", ind.focus)));
    }
    if ind.carets.len() > 1 {
        let ids: Vec<&str> = ind.carets.iter().map(|c| c.0.as_str()).collect();
        return Err(ConsistencyViolation::new("multiple_carets", format!("carets in {ids:?}")));
    }
    if ind.selections.len() > 1 {
        let ids: Vec<&str> = ind.selections.iter().map(|c| c.0.as_str()).collect();
        return Err(ConsistencyViolation::new("multiple_selections", format!("selections in {ids:?}")));
    }
    let raw = RawPof { focus: ind.focus.first().cloned(), caret: ind.carets.first().cloned(), selection: ind.selections.first().cloned() };
    let owners: Vec<&str> = [raw.focus.as_deref(), raw.caret.as_ref().map(|c| c.0.as_str()), raw.selection.as_ref().map(|s| s.0.as_str())]
        .into_iter()
        .flatten()
        .collect();
    if owners.windows(2).any(|w| w[0] != w[1]) {
        return Err(ConsistencyViolation::new("split_indicators", format!("indicators on different inputs {owners:?}")));
    }
    Ok(raw)
}

/// Relaxed bands for masking: indicator colours at any brightness.
fn is_indicator_pixel(rgb: [u8; 3]) -> bool {
    let p = rgb_to_hsv(rgb[0], rgb[1], rgb[2]);
    let dim = |b: &HsvBand| HsvBand { val_lo: 0.15, ..*b };
    dim(&CARET_BAND).matches(p) || dim(&SELECTION_BAND).matches(p)
}

/// Luma of an input's interior with caret and selection pixels painted
/// white, ready for OCR.
pub fn input_plane(frame: &Frame, input: &Rect) -> GrayPlane {
    let interior = input_interior(input);
    let mut p = GrayPlane::new(interior.w, interior.h, 255);
    for y in 0..interior.h {
        for x in 0..interior.w {
            let rgb = frame.pixel(interior.x + x, interior.y + y);
            if !is_indicator_pixel(rgb) {
                p.set(x, y, luma(rgb));
            }
        }
    }
    p
}

/// Character index for a pixel column (region coordinates): the first box
/// whose centre lies right of `x`, else the text length. A position within
/// half the median glyph width of a box edge snaps to that edge.
pub fn column_at(x: i64, boxes: &[Rect]) -> usize {
    if boxes.is_empty() {
        return 0;
    }
    let mut widths: Vec<u32> = boxes.iter().map(|b| b.w).collect();
    widths.sort_unstable();
    let half2 = widths[widths.len() / 2] as i64;
    // Boundary k sits before box k; positions doubled to stay integral.
    let mut boundaries2: Vec<i64> = Vec::with_capacity(boxes.len() + 1);
    boundaries2.push(2 * boxes[0].x as i64);
    for pair in boxes.windows(2) {
        boundaries2.push(pair[0].right() as i64 + pair[1].x as i64);
    }
    boundaries2.push(2 * boxes[boxes.len() - 1].right() as i64);
    let (k, dist2) = boundaries2.iter().enumerate().map(|(k, b)| (k, (2 * x - b).abs())).min_by_key(|&(_, d)| d).expect("non-empty");
    if dist2 <= half2 {
        return k;
    }
    boxes.iter().position(|b| 2 * x < 2 * b.x as i64 + b.w as i64).unwrap_or(boxes.len())
}

/// One box per character of `ocr.text`, inner spaces included.
fn cell_boxes(ocr: &OcrResult) -> Vec<Rect> {
    let mut out: Vec<Rect> = Vec::with_capacity(ocr.text.chars().count());
    let mut inked = ocr.char_boxes.iter();
    for c in ocr.text.chars() {
        let b = match (c, out.last()) {
            (' ', Some(prev)) => Rect { x: prev.right(), ..*prev },
            _ => match inked.next() {
                Some(b) => *b,
                None => break,
            },
        };
        out.push(b);
    }
    out
}

/// Column of a caret drawn at frame x `caret_x` inside `input`.
pub fn caret_column(caret_x: u32, input: &Rect, ocr: &OcrResult) -> usize {
    let interior = input_interior(input);
    column_at(caret_x as i64 - interior.x as i64, &cell_boxes(ocr))
}

/// `(start, end)` character range covered by a selection background.
pub fn selection_columns(sel: &Rect, input: &Rect, ocr: &OcrResult) -> (usize, usize) {
    let interior = input_interior(input);
    let left = sel.x as i64 - interior.x as i64;
    let right = sel.right() as i64 - 1 - interior.x as i64;
    let cells = cell_boxes(ocr);
    (column_at(left, &cells), column_at(right, &cells))
}

/// Resolves pixel indicators to columns using the OCR of the owning input.
pub fn resolve_pof(raw: &RawPof, breakdown: &PageBreakdown, read: &dyn Fn(&Region) -> OcrResult) -> PofState {
    let mut state = PofState { focus_box: raw.focus.clone(), ..PofState::default() };
    let owner = raw.caret.as_ref().map(|c| &c.0).or(raw.selection.as_ref().map(|s| &s.0));
    let Some(region) = owner.and_then(|id| breakdown.region(id)) else {
        return state;
    };
    let ocr = read(region);
    if let Some((id, r)) = &raw.caret {
        let x = r.x + r.w / 2;
        state.caret = Some(Caret { region_id: id.clone(), column: caret_column(x, &region.rect, &ocr), x });
    }
    if let Some((id, r)) = &raw.selection {
        let (start, end) = selection_columns(r, &region.rect, &ocr);
        state.selection = Some(Selection { region_id: id.clone(), start, end });
    }
    state
}

/// Finds the position of focus in one frame.
pub fn detect_pof(frame: &Frame, breakdown: &PageBreakdown, ocr: &OcrService) -> Result<PofState, ConsistencyViolation> {
    let raw = check_consistency(&detect_indicators(frame, breakdown))?;
    Ok(resolve_pof(&raw, breakdown, &|r: &Region| ocr.read(&input_plane(frame, &r.rect))))
}
