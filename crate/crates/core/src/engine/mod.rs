//! Session orchestration: sampling, per-frame validation and the verdict.

mod cache;
mod diff;
mod validate;
mod verdict;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use thiserror::Error;

use crate::context::{digest_bytes, Frame, FrameError, Rect};
use crate::input::extract_label;
use crate::manifest::{parse_breakdown, parse_hid_log, read_file, HidEvent, ManifestError, PageBreakdown, SessionManifest};
use crate::output::{read_trusted, text_bearing_regions, OcrEngine, OcrService, OutputConfig, TemplateOcr, TextDetector};
use crate::sampler::{spawn_acquisition, FrameSource, ReplaySource, SamplerConfig, SamplerError};

pub use cache::{region_key, CacheSet};
pub use diff::{frame_diff_bbox, touches, DIFF_MARGIN};
pub use validate::{FrameOutcome, FrameValidator, SessionContext};
pub use verdict::{CacheStats, EndCheck, Failure, FrameStat, Rule, SessionReport, SessionVerdict, VerdictStatus};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Clone)]
pub struct EngineConfig {
    pub sampler: SamplerConfig,
    pub output: OutputConfig,
    pub use_cache: bool,
    pub full_revalidate: bool,
    /// Worker cap for per-frame region validation; `None` uses the global pool.
    pub jobs: Option<usize>,
    pub ocr: Arc<dyn OcrEngine>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            sampler: SamplerConfig::default(),
            output: OutputConfig::default(),
            use_cache: true,
            full_revalidate: false,
            jobs: None,
            ocr: Arc::new(TemplateOcr::new()),
        }
    }
}

impl fmt::Debug for EngineConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EngineConfig")
            .field("sampler", &self.sampler)
            .field("output", &self.output)
            .field("use_cache", &self.use_cache)
            .field("full_revalidate", &self.full_revalidate)
            .field("jobs", &self.jobs)
            .field("ocr", &self.ocr.name())
            .finish()
    }
}

/// Parsed artifacts of one recorded session.
pub struct LoadedSession {
    pub start_t_ms: u64,
    pub end_t_ms: u64,
    pub breakdown: PageBreakdown,
    pub hid: Vec<HidEvent>,
    pub trusted: Frame,
    pub source: Arc<dyn FrameSource>,
}

impl LoadedSession {
    /// Reads breakdown, HID log and trusted frame; local frames load lazily.
    pub fn load(m: &SessionManifest) -> Result<LoadedSession, EngineError> {
        let breakdown = parse_breakdown(&read_file(&m.resolve(&m.breakdown))?)?;
        let hid = parse_hid_log(&read_file(&m.resolve(&m.hid))?)?;
        let trusted = Frame::load(&m.resolve(&m.trusted), 0)?;
        let files = m.frames.iter().map(|f| (f.t_ms, m.resolve(&f.path))).collect();
        Ok(LoadedSession {
            start_t_ms: m.start_t_ms,
            end_t_ms: m.end_t_ms,
            breakdown,
            hid,
            trusted,
            source: Arc::new(ReplaySource::from_files(files)),
        })
    }

    /// In-memory session; `frames` must be in increasing time order.
    pub fn from_parts(breakdown: PageBreakdown, hid: Vec<HidEvent>, trusted: Frame, frames: Vec<Frame>, start_t_ms: u64, end_t_ms: u64) -> LoadedSession {
        LoadedSession { start_t_ms, end_t_ms, breakdown, hid, trusted, source: Arc::new(ReplaySource::from_frames(frames)) }
    }
}

/// The last mouse click at or before the end signal must land on the
/// submit button.
pub fn end_check(hid: &[HidEvent], submit: &Rect, end_t_ms: u64) -> EndCheck {
    let Some(click) = hid.iter().rfind(|e| e.is_click() && e.t_ms <= end_t_ms) else {
        return EndCheck { passed: false, detail: "no mouse click before the end signal".into() };
    };
    match click.pos {
        Some((x, y)) if submit.contains_point(x as i64, y as i64) => EndCheck { passed: true, detail: String::new() },
        Some((x, y)) => EndCheck { passed: false, detail: format!("final click at ({x}, {y}) is outside the submit button") },
        None => EndCheck { passed: false, detail: "final click has no position".into() },
    }
}

fn build_context(s: &LoadedSession, cfg: &EngineConfig, ocr: &OcrService) -> SessionContext {
    let detector = TextDetector::calibrate(&s.trusted);
    let trusted_boxes = detector.detect(&s.trusted);
    let expected_text = text_bearing_regions(&trusted_boxes, &s.breakdown);
    let trusted_text: HashMap<_, _> = s.breakdown.textual().map(|r| (r.id.clone(), read_trusted(&s.trusted, r, ocr))).collect();
    let labels: BTreeMap<_, _> = s
        .breakdown
        .inputs()
        .map(|r| (r.id.clone(), extract_label(&s.trusted, r, &s.breakdown, ocr, cfg.output.min_confidence)))
        .collect();
    SessionContext {
        trusted_digest: digest_bytes(s.trusted.pixels()),
        trusted: Arc::new(s.trusted.clone()),
        breakdown: s.breakdown.clone(),
        hid: s.hid.clone(),
        detector,
        expected_text,
        trusted_text,
        labels,
        output: cfg.output,
    }
}

fn run_inner(s: &LoadedSession, cfg: &EngineConfig) -> SessionReport {
    let setup = Instant::now();
    let ocr = OcrService::new(cfg.ocr.clone(), cfg.use_cache);
    let cache = CacheSet::new(cfg.use_cache);
    let vp = &s.breakdown.viewport;
    let mut failures = Vec::new();
    if s.trusted.width() != vp.width || s.trusted.height() != vp.height {
        let detail = format!("trusted rendering is {}x{}, viewport is {}x{}", s.trusted.width(), s.trusted.height(), vp.width, vp.height);
        failures.push(Failure::new(s.start_t_ms, "", Rule::Artifact, detail));
        let end = end_check(&s.hid, &s.breakdown.submit_button, s.end_t_ms);
        let verdict = SessionVerdict::assemble(failures, Default::default(), end, 0);
        return SessionReport { verdict, setup_ms: ms(setup), frames: Vec::new(), cache: CacheStats::default() };
    }
    let ctx = build_context(s, cfg, &ocr);
    let setup_ms = ms(setup);
    let (text_hits0, text_misses0) = ocr.stats();

    let mut validator = FrameValidator::new(&ctx, &ocr, &cache, cfg.full_revalidate);
    let mut frames = Vec::new();
    let (rx, handle) = spawn_acquisition(cfg.sampler, s.source.clone(), s.start_t_ms, s.end_t_ms);
    for item in rx {
        match item {
            Ok(sample) => {
                let started = Instant::now();
                let outcome = validator.validate(sample.t_ms, &sample.frame);
                frames.push(FrameStat {
                    t_ms: sample.t_ms,
                    latency_ms: ms(started),
                    frame_cache_hit: outcome.frame_cache_hit,
                    regions_validated: outcome.regions_validated,
                });
                failures.extend(outcome.failures);
            }
            Err(SamplerError::Truncated { t_ms }) => {
                failures.push(Failure::new(t_ms, "", Rule::Truncated, "no frame recorded at this sample time"));
            }
            Err(e) => failures.push(Failure::new(s.start_t_ms, "", Rule::Artifact, e.to_string())),
        }
    }
    let _ = handle.join();

    let end = end_check(&s.hid, &s.breakdown.submit_button, s.end_t_ms);
    let verdict = SessionVerdict::assemble(failures, validator.history().clone(), end, frames.len());
    let (fh, fm, rh, rm) = cache.counts();
    let (th, tm) = ocr.stats();
    let stats = CacheStats {
        frame_hits: fh,
        frame_misses: fm,
        region_hits: rh,
        region_misses: rm,
        text_hits: th - text_hits0,
        text_misses: tm - text_misses0,
    };
    SessionReport { verdict, setup_ms, frames, cache: stats }
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1000.0
}

/// Samples and validates a loaded session.
pub fn run_loaded(s: &LoadedSession, cfg: &EngineConfig) -> Result<SessionReport, EngineError> {
    match cfg.jobs {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build().map_err(|e| EngineError::Pool(e.to_string()))?;
            Ok(pool.install(|| run_inner(s, cfg)))
        }
        None => Ok(run_inner(s, cfg)),
    }
}

/// Loads the session artifacts named by `manifest`, then validates it.
pub fn run_session(manifest: &SessionManifest, cfg: &EngineConfig) -> Result<SessionReport, EngineError> {
    let s = LoadedSession::load(manifest)?;
    run_loaded(&s, cfg)
}
