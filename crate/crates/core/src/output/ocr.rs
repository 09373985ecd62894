//! OCR plug-in interface and the reference template-matching engine.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::preprocess::{native_ink, preprocess_for_ocr, UPSCALE};
use crate::context::{digest_bytes, Digest, GrayPlane, Rect};
use crate::font::{glyphs, GLYPH_H, GLYPH_W};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcrResult {
    pub text: String,
    /// 0 to 100.
    pub confidence: f64,
    /// One box per non-whitespace character, left to right.
    pub char_boxes: Vec<Rect>,
}

impl OcrResult {
    pub fn empty() -> OcrResult {
        OcrResult { text: String::new(), confidence: 0.0, char_boxes: Vec::new() }
    }
}

/// Text recognizer over a preprocessed (binarized, enlarged) raster. Boxes
/// are reported in the coordinates of the raster it was given.
pub trait OcrEngine: Send + Sync {
    fn name(&self) -> &str;
    fn recognize(&self, processed: &GrayPlane) -> OcrResult;
}

pub fn recognize_text(engine: &dyn OcrEngine, processed: &GrayPlane) -> OcrResult {
    engine.recognize(processed)
}

/// Trims the ends and collapses internal whitespace runs to one space.
pub fn normalize_text(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

const CELL_BITS: u32 = GLYPH_W * GLYPH_H;

/// Exact template matching against the bundled font.
///
/// Every grid phase that fits the ink on one line is tried; each cell is
/// scored against every glyph with the phi coefficient of the two bitmaps
/// and the phase with the best mean score wins.
pub struct TemplateOcr {
    templates: Vec<(char, u128, u32)>,
}

impl Default for TemplateOcr {
    fn default() -> Self {
        let templates = glyphs()
            .filter(|(c, _)| *c != ' ')
            .map(|(c, rows)| {
                let bits = rows.iter().enumerate().fold(0u128, |acc, (y, &r)| acc | (r as u128) << (y as u32 * GLYPH_W));
                (c, bits, bits.count_ones())
            })
            .collect();
        TemplateOcr { templates }
    }
}

impl TemplateOcr {
    pub fn new() -> TemplateOcr {
        TemplateOcr::default()
    }

    fn best_match(&self, cell: u128) -> (char, f64) {
        let n = CELL_BITS as f64;
        let a = cell.count_ones() as f64;
        let mut best = ('?', f64::NEG_INFINITY);
        for &(c, t, b) in &self.templates {
            let b = b as f64;
            let n11 = (cell & t).count_ones() as f64;
            let den = (a * (n - a) * b * (n - b)).sqrt();
            let phi = if den == 0.0 { 0.0 } else { (n * n11 - a * b) / den };
            if phi > best.1 {
                best = (c, phi);
            }
        }
        (best.0, best.1.max(0.0))
    }
}

fn cell_bits(ink: &[bool], w: i64, h: i64, ox: i64, oy: i64) -> u128 {
    let mut bits = 0u128;
    for cy in 0..GLYPH_H as i64 {
        let y = oy + cy;
        if y < 0 || y >= h {
            continue;
        }
        for cx in 0..GLYPH_W as i64 {
            let x = ox + cx;
            if x >= 0 && x < w && ink[(y * w + x) as usize] {
                bits |= 1u128 << (cy * GLYPH_W as i64 + cx);
            }
        }
    }
    bits
}

impl OcrEngine for TemplateOcr {
    fn name(&self) -> &str {
        "reference"
    }

    fn recognize(&self, processed: &GrayPlane) -> OcrResult {
        let (w, h, ink) = native_ink(processed);
        let (w, h) = (w as i64, h as i64);
        let mut bbox: Option<(i64, i64, i64, i64)> = None;
        for y in 0..h {
            for x in 0..w {
                if ink[(y * w + x) as usize] {
                    bbox = Some(match bbox {
                        None => (x, y, x, y),
                        Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
                    });
                }
            }
        }
        let Some((x0, y0, x1, y1)) = bbox else {
            return OcrResult::empty();
        };
        let (gw, gh) = (GLYPH_W as i64, GLYPH_H as i64);
        let mut best: Option<(f64, i64, i64, Vec<(char, f64)>)> = None;
        'phases: for dy in 0..gh {
            if y1 - y0 + dy >= gh {
                break;
            }
            for dx in 0..gw {
                let (ox, oy) = (x0 - dx, y0 - dy);
                let ncells = (x1 - ox) / gw + 1;
                let cells: Vec<(char, f64)> = (0..ncells)
                    .map(|i| {
                        let bits = cell_bits(&ink, w, h, ox + i * gw, oy);
                        if bits == 0 {
                            (' ', 0.0)
                        } else {
                            self.best_match(bits)
                        }
                    })
                    .collect();
                let scored: Vec<f64> = cells.iter().filter(|c| c.0 != ' ').map(|c| c.1).collect();
                let mean = scored.iter().sum::<f64>() / scored.len() as f64;
                if best.as_ref().is_none_or(|b| mean > b.0) {
                    best = Some((mean, ox, oy, cells));
                    if mean >= 1.0 {
                        break 'phases;
                    }
                }
            }
        }
        let Some((mean, ox, oy, cells)) = best else {
            return OcrResult::empty();
        };
        let s = UPSCALE as i64;
        let bounds = Rect { x: 0, y: 0, w: processed.width, h: processed.height };
        let mut char_boxes = Vec::new();
        for (i, (c, _)) in cells.iter().enumerate() {
            if *c == ' ' {
                continue;
            }
            let x = (ox + i as i64 * gw) * s;
            let (cx0, cy0) = (x.max(0), (oy * s).max(0));
            let (cx1, cy1) = ((x + gw * s).min(bounds.w as i64), ((oy + gh) * s).min(bounds.h as i64));
            let r = Rect::new(cx0 as u32, cy0 as u32, (cx1 - cx0).max(1) as u32, (cy1 - cy0).max(1) as u32).expect("positive");
            char_boxes.push(r);
        }
        OcrResult { text: cells.iter().map(|c| c.0).collect(), confidence: 100.0 * mean, char_boxes }
    }
}

fn plane_digest(p: &GrayPlane) -> Digest {
    let mut bytes = Vec::with_capacity(8 + p.data.len());
    bytes.extend_from_slice(&p.width.to_be_bytes());
    bytes.extend_from_slice(&p.height.to_be_bytes());
    bytes.extend_from_slice(&p.data);
    digest_bytes(&bytes)
}

/// Preprocessing plus recognition, memoized on the digest of the
/// preprocessed raster. Boxes come back in native region coordinates.
pub struct OcrService {
    engine: Arc<dyn OcrEngine>,
    cache: Option<Mutex<HashMap<Digest, OcrResult>>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl OcrService {
    pub fn new(engine: Arc<dyn OcrEngine>, cache: bool) -> OcrService {
        OcrService { engine, cache: cache.then(|| Mutex::new(HashMap::new())), hits: AtomicU64::new(0), misses: AtomicU64::new(0) }
    }

    pub fn engine_name(&self) -> &str {
        self.engine.name()
    }

    pub fn read(&self, region: &GrayPlane) -> OcrResult {
        let processed = preprocess_for_ocr(region);
        let key = self.cache.as_ref().map(|_| plane_digest(&processed));
        if let (Some(cache), Some(key)) = (&self.cache, &key) {
            if let Some(hit) = cache.lock().expect("ocr cache lock").get(key) {
                self.hits.fetch_add(1, Ordering::Relaxed);
                return hit.clone();
            }
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let mut result = self.engine.recognize(&processed);
        for b in &mut result.char_boxes {
            *b = Rect { x: b.x / UPSCALE, y: b.y / UPSCALE, w: (b.w / UPSCALE).max(1), h: (b.h / UPSCALE).max(1) };
        }
        if let (Some(cache), Some(key)) = (&self.cache, key) {
            cache.lock().expect("ocr cache lock").insert(key, result.clone());
        }
        result
    }

    /// `(hits, misses)` since construction.
    pub fn stats(&self) -> (u64, u64) {
        (self.hits.load(Ordering::Relaxed), self.misses.load(Ordering::Relaxed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::font::ink;

    /// Black text on white at `(ox, oy)` inside a `w x h` plane.
    pub(crate) fn render_plane(text: &str, w: u32, h: u32, ox: u32, oy: u32) -> GrayPlane {
        let mut p = GrayPlane::new(w, h, 255);
        for (i, c) in text.chars().enumerate() {
            for gy in 0..GLYPH_H {
                for gx in 0..GLYPH_W {
                    let (x, y) = (ox + i as u32 * GLYPH_W + gx, oy + gy);
                    if x < w && y < h && ink(c, gx, gy) {
                        p.set(x, y, 0);
                    }
                }
            }
        }
        p
    }

    fn read(p: &GrayPlane) -> OcrResult {
        OcrService::new(Arc::new(TemplateOcr::new()), false).read(p)
    }

    #[test]
    fn reads_rendered_word_with_full_confidence() {
        let r = read(&render_plane("Amount", 70, 20, 5, 3));
        assert_eq!(r.text, "Amount");
        assert!(r.confidence >= 95.0);
        assert_eq!(r.char_boxes.len(), 6);
        assert_eq!(r.char_boxes[0], Rect::new(5, 3, 8, 14).unwrap());
        assert_eq!(r.char_boxes[5].x, 45);
    }

    #[test]
    fn empty_region_reads_empty() {
        let r = read(&GrayPlane::new(30, 20, 255));
        assert_eq!(r, OcrResult::empty());
    }

    #[test]
    fn keeps_inner_spaces_without_boxes() {
        let r = read(&render_plane("To Bob", 60, 16, 1, 1));
        assert_eq!(r.text, "To Bob");
        assert_eq!(r.char_boxes.len(), 5);
    }

    #[test]
    fn every_printable_glyph_reads_back() {
        for (c, _) in glyphs().filter(|(c, _)| *c != ' ') {
            let s: String = [c, 'x', c].iter().collect();
            assert_eq!(read(&render_plane(&s, 40, 18, 3, 2)).text, s, "{c:?}");
        }
    }

    #[test]
    fn unknown_font_has_low_confidence() {
        // Hatched blocks: nothing like any glyph in the bundled font.
        let mut p = GrayPlane::new(60, 20, 255);
        for i in 0..5u32 {
            for y in 3..15u32 {
                for x in 0..6u32 {
                    if (x + y) % 3 == 0 {
                        p.set(4 + i * 10 + x, y, 0);
                    }
                }
            }
        }
        assert!(read(&p).confidence < 70.0);
    }

    #[test]
    fn normalization_collapses_whitespace_only() {
        assert_eq!(normalize_text("  a \t b  "), "a b");
        assert_ne!(normalize_text("Kg"), normalize_text("kg"));
    }

    #[test]
    fn cache_counts_hits() {
        let svc = OcrService::new(Arc::new(TemplateOcr::new()), true);
        let p = render_plane("100", 40, 18, 2, 2);
        assert_eq!(svc.read(&p), svc.read(&p));
        assert_eq!(svc.stats(), (1, 1));
    }
}
