use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::cache::{region_key, CacheSet};
use super::diff::{frame_diff_bbox, touches};
use super::verdict::{Failure, Rule};
use crate::context::{digest_bytes, search_bound, Digest, Frame, Rect};
use crate::input::{
    check_consistency, classify_edit, correlate_hid, detect_indicators, input_plane, resolve_pof, InputHistory, InputRecord,
    LabelError, PofState,
};
use crate::manifest::{HidEvent, PageBreakdown, Region, RegionKind};
use crate::output::{
    normalize_text, text_pos_check, validate_graphic_region, validate_text_region, OcrResult, OcrService, OutputConfig,
    RegionVerdict, TextDetector,
};

/// Everything fixed for the duration of one session.
#[derive(Debug)]
pub struct SessionContext {
    pub trusted: Arc<Frame>,
    pub trusted_digest: Digest,
    pub breakdown: PageBreakdown,
    pub hid: Vec<HidEvent>,
    pub detector: TextDetector,
    /// Textual regions that carry text in the trusted rendering.
    pub expected_text: Vec<String>,
    pub trusted_text: HashMap<String, OcrResult>,
    pub labels: BTreeMap<String, Result<String, LabelError>>,
    pub output: OutputConfig,
}

/// Mutable tracking state; together with the frame it determines the
/// outcome of validating that frame.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
struct TrackState {
    started: bool,
    history: InputHistory,
    last_pof: Option<PofState>,
    focus_misses: u32,
}

impl TrackState {
    fn digest(&self) -> Digest {
        digest_bytes(&serde_json::to_vec(self).expect("state serializes"))
    }
}

#[derive(Debug, Clone)]
struct InputRead {
    value: String,
    readable: bool,
    ocr: OcrResult,
}

#[derive(Debug, Clone, Default)]
pub struct FrameOutcome {
    pub failures: Vec<Failure>,
    pub frame_cache_hit: bool,
    pub regions_validated: usize,
}

/// Validates sampled frames in order, scoping work to what changed since
/// the previous frame.
pub struct FrameValidator<'a> {
    ctx: &'a SessionContext,
    ocr: &'a OcrService,
    cache: &'a CacheSet,
    full: bool,
    state: TrackState,
    prev: Option<(Arc<Frame>, Digest)>,
    prev_boxes: Vec<Rect>,
    verdicts: BTreeMap<String, RegionVerdict>,
    reads: BTreeMap<String, InputRead>,
}

fn validation_window(rect: &Rect, w: u32, h: u32) -> Rect {
    rect.inflate_clipped(2 * search_bound(rect.w, rect.h), w, h)
}

fn frame_digest(f: &Frame) -> Digest {
    let mut bytes = Vec::with_capacity(8 + f.pixels().len());
    bytes.extend_from_slice(&f.width().to_be_bytes());
    bytes.extend_from_slice(&f.height().to_be_bytes());
    bytes.extend_from_slice(f.pixels());
    digest_bytes(&bytes)
}

impl<'a> FrameValidator<'a> {
    pub fn new(ctx: &'a SessionContext, ocr: &'a OcrService, cache: &'a CacheSet, full_revalidate: bool) -> FrameValidator<'a> {
        FrameValidator {
            ctx,
            ocr,
            cache,
            full: full_revalidate,
            state: TrackState::default(),
            prev: None,
            prev_boxes: Vec::new(),
            verdicts: BTreeMap::new(),
            reads: BTreeMap::new(),
        }
    }

    pub fn history(&self) -> &InputHistory {
        &self.state.history
    }

    pub fn validate(&mut self, t_ms: u64, frame: &Arc<Frame>) -> FrameOutcome {
        let vp = &self.ctx.breakdown.viewport;
        if frame.width() != vp.width || frame.height() != vp.height {
            let detail = format!("frame is {}x{}, viewport is {}x{}", frame.width(), frame.height(), vp.width, vp.height);
            return FrameOutcome { failures: vec![Failure::new(t_ms, "", Rule::Artifact, detail)], ..FrameOutcome::default() };
        }
        let fd = match &self.prev {
            Some((p, d)) if Arc::ptr_eq(p, frame) => *d,
            _ => frame_digest(frame),
        };
        let sd = self.state.digest();
        if let Some(boxes) = self.cache.frame(&fd, &sd) {
            self.adopt_cached(frame, fd, boxes);
            return FrameOutcome { frame_cache_hit: true, ..FrameOutcome::default() };
        }

        let diff = match (&self.prev, self.full) {
            (Some((p, _)), false) => Some(frame_diff_bbox(p, frame).expect("sizes checked against viewport")),
            _ => None,
        };
        let in_scope = |r: &Rect| diff.as_ref().is_none_or(|d| touches(d, r));
        let mut out = FrameOutcome::default();

        let boxes = match &diff {
            Some(d) => self.ctx.detector.detect_incremental(frame, &self.prev_boxes, d),
            None => self.ctx.detector.detect(frame),
        };
        if let Err(issue) = text_pos_check(&boxes, &self.ctx.breakdown, &self.ctx.expected_text) {
            out.failures.push(Failure::new(t_ms, issue.region_id.as_deref().unwrap_or(""), Rule::ContentDifference, issue.detail));
        }

        let (fw, fh) = (frame.width(), frame.height());
        let todo: Vec<&Region> = self
            .ctx
            .breakdown
            .regions
            .iter()
            .filter(|r| r.kind != RegionKind::Input)
            .filter(|r| !self.verdicts.contains_key(&r.id) || in_scope(&validation_window(&r.rect, fw, fh)))
            .collect();
        out.regions_validated = todo.len();
        let fresh: Vec<RegionVerdict> = todo.par_iter().map(|r| self.validate_region(frame, r)).collect();
        for v in fresh {
            self.verdicts.insert(v.region_id.clone(), v);
        }
        out.failures.extend(self.region_failures(t_ms, RegionKind::Textual));

        let before = self.state.clone();
        self.track_inputs(t_ms, frame, &in_scope, &mut out.failures);
        out.failures.extend(self.region_failures(t_ms, RegionKind::Graphical));

        if out.failures.is_empty() && self.state == before {
            self.cache.put_frame(fd, sd, boxes.clone());
        }
        self.prev = Some((frame.clone(), fd));
        self.prev_boxes = boxes;
        out
    }

    fn region_failures(&self, t_ms: u64, kind: RegionKind) -> Vec<Failure> {
        self.ctx
            .breakdown
            .regions
            .iter()
            .filter(|r| r.kind == kind)
            .filter_map(|r| Failure::from_region(t_ms, &self.verdicts[&r.id]))
            .collect()
    }

    fn adopt_cached(&mut self, frame: &Arc<Frame>, fd: Digest, boxes: Vec<Rect>) {
        for r in self.ctx.breakdown.regions.iter().filter(|r| r.kind != RegionKind::Input) {
            self.verdicts.insert(r.id.clone(), RegionVerdict::pass(&r.id));
        }
        self.reads.clear();
        self.prev = Some((frame.clone(), fd));
        self.prev_boxes = boxes;
    }

    fn validate_region(&self, frame: &Frame, region: &Region) -> RegionVerdict {
        let window = validation_window(&region.rect, frame.width(), frame.height());
        let key = self.cache.enabled().then(|| region_key(frame, &window, &self.ctx.trusted_digest, region));
        if let Some(hit) = key.as_ref().and_then(|k| self.cache.region(k)) {
            return hit;
        }
        let cfg = &self.ctx.output;
        let v = match region.kind {
            RegionKind::Textual => {
                let t = &self.ctx.trusted_text[&region.id];
                validate_text_region(frame, &self.ctx.trusted, region, t, cfg, self.ocr)
            }
            _ => validate_graphic_region(frame, &self.ctx.trusted, region, cfg),
        };
        if let Some(k) = key {
            self.cache.put_region(k, v.clone());
        }
        v
    }

    fn read_input(&self, frame: &Frame, region: &Region) -> InputRead {
        let ocr = self.ocr.read(&input_plane(frame, &region.rect));
        let value = normalize_text(&ocr.text);
        let readable = value.is_empty() || ocr.confidence >= self.ctx.output.min_confidence;
        InputRead { value, readable, ocr }
    }

    fn track_inputs(&mut self, t_ms: u64, frame: &Frame, in_scope: &dyn Fn(&Rect) -> bool, failures: &mut Vec<Failure>) {
        let breakdown = &self.ctx.breakdown;
        for input in breakdown.inputs() {
            if !self.reads.contains_key(&input.id) || in_scope(&input.rect) {
                let read = self.read_input(frame, input);
                self.reads.insert(input.id.clone(), read);
            }
        }
        let raw = match check_consistency(&detect_indicators(frame, breakdown)) {
            Ok(raw) => raw,
            Err(v) => {
                failures.push(Failure::new(t_ms, "", Rule::Consistency, format!("{}: {}", v.rule, v.detail)));
                return;
            }
        };
        let reads = &self.reads;
        let pof = resolve_pof(&raw, breakdown, &|r: &Region| reads[&r.id].ocr.clone());

        let idle_focus = pof.focus_box.is_some() && pof.caret.is_none() && pof.selection.is_none();
        self.state.focus_misses = if idle_focus { self.state.focus_misses + 1 } else { 0 };
        if self.state.focus_misses > 1 {
            let id = pof.focus_box.clone().unwrap_or_default();
            failures.push(Failure::new(t_ms, &id, Rule::Consistency, "focus box without caret or selection"));
        }

        if !self.state.started {
            self.start_history(t_ms, failures);
        } else {
            self.apply_edits(t_ms, &pof, failures);
            if self.state.last_pof.as_ref() != Some(&pof) {
                if let Err(e) = correlate_hid(&self.ctx.hid, t_ms, "focus movement") {
                    failures.push(Failure::new(t_ms, pof.region().unwrap_or(""), Rule::HidViolation, e));
                }
            }
        }
        for input in breakdown.inputs() {
            if let Some(rec) = self.state.history.fields.get_mut(&input.id) {
                rec.last_selection = pof.selection_in(&input.id);
            }
        }
        self.state.last_pof = Some(pof);
    }

    /// First frame: the form must be empty, and every input needs a label.
    fn start_history(&mut self, t_ms: u64, failures: &mut Vec<Failure>) {
        self.state.started = true;
        for input in self.ctx.breakdown.inputs() {
            let label = match &self.ctx.labels[&input.id] {
                Ok(l) => l.clone(),
                Err(e) => {
                    failures.push(Failure::new(t_ms, &input.id, Rule::LabelMissing, e.to_string()));
                    String::new()
                }
            };
            let read = &self.reads[&input.id];
            if !read.readable {
                failures.push(Failure::new(t_ms, &input.id, Rule::InputUnreadable, "input text is unreadable"));
            } else if !read.value.is_empty() {
                failures.push(Failure::new(t_ms, &input.id, Rule::PrefilledInput, format!("input shows {:?} before any interaction", read.value)));
            }
            let value = if read.readable { read.value.clone() } else { String::new() };
            self.state.history.fields.insert(input.id.clone(), InputRecord { label, value, last_selection: None, last_edit_t_ms: None });
        }
    }

    fn apply_edits(&mut self, t_ms: u64, pof: &PofState, failures: &mut Vec<Failure>) {
        for input in self.ctx.breakdown.inputs() {
            let read = &self.reads[&input.id];
            if !read.readable {
                failures.push(Failure::new(t_ms, &input.id, Rule::InputUnreadable, "input text is unreadable"));
                continue;
            }
            let old = self.state.history.value(&input.id).to_string();
            if read.value == old {
                continue;
            }
            let class = classify_edit(&input.id, &old, &read.value, pof, &self.state.history);
            if !class.kind.accepted() {
                failures.push(Failure::new(t_ms, &input.id, Rule::EditViolation, format!("{:?} -> {:?}: {}", old, read.value, class.payload)));
                continue;
            }
            if let Err(e) = correlate_hid(&self.ctx.hid, t_ms, class.kind.as_str()) {
                failures.push(Failure::new(t_ms, &input.id, Rule::HidViolation, e));
                continue;
            }
            let rec = self.state.history.fields.get_mut(&input.id).expect("initialised on the first frame");
            rec.value = read.value.clone();
            rec.last_edit_t_ms = Some(t_ms);
        }
    }
}
