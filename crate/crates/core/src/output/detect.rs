//! Connected-component text detection.
//!
//! Foreground pixels are found with a luma threshold calibrated once on the
//! trusted rendering, grouped into 8-connected components, and components
//! whose boxes sit on the same line within the merge gap are joined.
//!
//! [`TextDetector::detect_incremental`] recomputes only windows around
//! changed pixels. A window is grown until its border bands hold no
//! foreground and no previous box straddles it; components inside such a
//! window can neither touch nor merge with anything outside, so the result
//! equals a full detection.

use serde::{Deserialize, Serialize};

use super::binarize::otsu;
use crate::context::{luma, Frame, GrayPlane, Rect};

/// Components farther apart than this vertically never merge.
pub const MERGE_DY: u32 = 4;
const GLYPH_MAX_DIM: u32 = 32;
const FALLBACK_MERGE_GAP: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoxSource {
    Detected,
    Breakdown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextBox {
    pub rect: Rect,
    pub source: BoxSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Component {
    pub rect: Rect,
    pub pixels: u32,
}

/// 8-connected components of `mask` (row-major, `w x h`), in scan order of
/// their first pixel. Rects are relative to the mask.
pub fn components(mask: &[bool], w: u32, h: u32) -> Vec<Component> {
    let (wu, hu) = (w as usize, h as usize);
    let mut seen = vec![false; mask.len()];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for start in 0..mask.len() {
        if !mask[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0, 0);
        let mut count = 0u32;
        while let Some(i) = stack.pop() {
            let (x, y) = (i % wu, i / wu);
            count += 1;
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
            for ny in y.saturating_sub(1)..=(y + 1).min(hu - 1) {
                for nx in x.saturating_sub(1)..=(x + 1).min(wu - 1) {
                    let j = ny * wu + nx;
                    if mask[j] && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        out.push(Component { rect: Rect::from_corners(x0 as u32, y0 as u32, x1 as u32, y1 as u32), pixels: count });
    }
    out
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Joins boxes transitively when both `x_gap <= gap` and `y_gap <= MERGE_DY`.
pub fn merge_boxes(boxes: &[Rect], gap: u32) -> Vec<Rect> {
    let n = boxes.len();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| boxes[i].x);
    for (k, &i) in order.iter().enumerate() {
        let reach = boxes[i].right() as u64 + gap as u64;
        for &j in &order[k + 1..] {
            if boxes[j].x as u64 > reach {
                break;
            }
            if boxes[i].x_gap(&boxes[j]) <= gap && boxes[i].y_gap(&boxes[j]) <= MERGE_DY {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Rect> = std::collections::BTreeMap::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        groups.entry(root).and_modify(|r| *r = r.union(&boxes[i])).or_insert(boxes[i]);
    }
    let mut out: Vec<Rect> = groups.into_values().collect();
    out.sort();
    out
}

/// Session-fixed detection parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextDetector {
    pub threshold: u8,
    /// Foreground is at or below the threshold when true, above it otherwise.
    pub dark_fg: bool,
    pub merge_gap: u32,
}

impl Default for TextDetector {
    fn default() -> Self {
        TextDetector { threshold: 127, dark_fg: true, merge_gap: FALLBACK_MERGE_GAP }
    }
}

impl TextDetector {
    /// Derives threshold, polarity and merge gap from the trusted rendering.
    /// The minority Otsu class is foreground; the merge gap is 1.2x the
    /// median width of glyph-sized components.
    pub fn calibrate(trusted: &Frame) -> TextDetector {
        let plane = GrayPlane::from_frame(trusted);
        let mut det = match otsu(&plane.histogram()) {
            Some(s) => TextDetector { threshold: s.threshold, dark_fg: s.dark_is_minority(), merge_gap: FALLBACK_MERGE_GAP },
            None => TextDetector::default(),
        };
        let mask: Vec<bool> = plane.data.iter().map(|&v| det.is_fg_luma(v)).collect();
        let mut widths: Vec<u32> = components(&mask, plane.width, plane.height)
            .iter()
            .filter(|c| c.rect.w <= GLYPH_MAX_DIM && c.rect.h <= GLYPH_MAX_DIM && c.pixels >= 2)
            .map(|c| c.rect.w)
            .collect();
        if !widths.is_empty() {
            widths.sort_unstable();
            let n = widths.len();
            // Median as a doubled value keeps even counts exact.
            let median2 = if n % 2 == 1 { 2 * widths[n / 2] } else { widths[n / 2 - 1] + widths[n / 2] };
            det.merge_gap = (median2 * 6 / 10).max(1);
        }
        det
    }

    #[inline]
    fn is_fg_luma(&self, v: u8) -> bool {
        (v <= self.threshold) == self.dark_fg
    }

    #[inline]
    pub fn is_fg(&self, rgb: [u8; 3]) -> bool {
        self.is_fg_luma(luma(rgb))
    }

    fn band_x(&self) -> u32 {
        self.merge_gap + 1
    }

    fn band_y(&self) -> u32 {
        MERGE_DY + 1
    }

    /// Merged boxes for all foreground inside `window`, in frame coordinates.
    pub fn detect_window(&self, frame: &Frame, window: &Rect) -> Vec<Rect> {
        let mut mask = Vec::with_capacity(window.area() as usize);
        for y in window.y..window.bottom() {
            for x in window.x..window.right() {
                mask.push(self.is_fg(frame.pixel(x, y)));
            }
        }
        let boxes: Vec<Rect> = components(&mask, window.w, window.h)
            .into_iter()
            .map(|c| Rect { x: c.rect.x + window.x, y: c.rect.y + window.y, ..c.rect })
            .collect();
        merge_boxes(&boxes, self.merge_gap)
    }

    /// Full-frame detection.
    pub fn detect(&self, frame: &Frame) -> Vec<Rect> {
        self.detect_window(frame, &frame.bounds())
    }

    pub fn detect_text_boxes(&self, frame: &Frame) -> Vec<TextBox> {
        self.detect(frame).into_iter().map(|rect| TextBox { rect, source: BoxSource::Detected }).collect()
    }

    fn any_fg(&self, frame: &Frame, r: &Rect) -> bool {
        (r.y..r.bottom()).any(|y| (r.x..r.right()).any(|x| self.is_fg(frame.pixel(x, y))))
    }

    /// Whether the bands along every border of `w` that is not a frame
    /// edge are free of foreground.
    fn band_clear(&self, frame: &Frame, w: &Rect) -> bool {
        let (fw, fh) = (frame.width(), frame.height());
        let bx = self.band_x().min(w.w);
        let by = self.band_y().min(w.h);
        let mut bands = Vec::with_capacity(4);
        if w.x > 0 {
            bands.push(Rect { w: bx, ..*w });
        }
        if w.right() < fw {
            bands.push(Rect { x: w.right() - bx, w: bx, ..*w });
        }
        if w.y > 0 {
            bands.push(Rect { h: by, ..*w });
        }
        if w.bottom() < fh {
            bands.push(Rect { y: w.bottom() - by, h: by, ..*w });
        }
        bands.iter().all(|b| !self.any_fg(frame, b))
    }

    /// Stabilised recomputation windows for the changed areas.
    pub fn windows(&self, frame: &Frame, prev: &[Rect], diff: &[Rect]) -> Vec<Rect> {
        let (fw, fh) = (frame.width(), frame.height());
        let grow = self.band_x().max(self.band_y());
        let mut windows: Vec<Rect> = diff.iter().map(|r| r.inflate_clipped(grow, fw, fh)).collect();
        loop {
            let mut changed = merge_overlapping(&mut windows);
            for w in windows.iter_mut() {
                for b in prev {
                    if b.intersects(w) && !w.contains(b) {
                        *w = w.union(b);
                        changed = true;
                    }
                }
                if !self.band_clear(frame, w) {
                    let grown = w.inflate_clipped(grow, fw, fh);
                    if grown != *w {
                        *w = grown;
                        changed = true;
                    }
                }
            }
            if !changed {
                return windows;
            }
        }
    }

    /// Boxes for `frame` given the boxes of the previous frame and the
    /// rects where the two frames differ.
    pub fn detect_incremental(&self, frame: &Frame, prev: &[Rect], diff: &[Rect]) -> Vec<Rect> {
        if diff.is_empty() {
            return prev.to_vec();
        }
        let windows = self.windows(frame, prev, diff);
        let mut out: Vec<Rect> = prev.iter().filter(|b| !windows.iter().any(|w| w.intersects(b))).copied().collect();
        for w in &windows {
            out.extend(self.detect_window(frame, w));
        }
        out.sort();
        out
    }
}

/// Unions intersecting rects in place until none intersect. Returns whether
/// anything merged.
fn merge_overlapping(rects: &mut Vec<Rect>) -> bool {
    let mut merged_any = false;
    let mut i = 0;
    while i < rects.len() {
        let mut j = i + 1;
        let mut merged = false;
        while j < rects.len() {
            if rects[i].intersects(&rects[j]) {
                let r = rects.swap_remove(j);
                rects[i] = rects[i].union(&r);
                merged = true;
            } else {
                j += 1;
            }
        }
        if merged {
            merged_any = true;
        } else {
            i += 1;
        }
    }
    merged_any
}
