//! Randomized capture schedule and frame acquisition.
//!
//! Intervals are drawn from a normal distribution with Box-Muller on a
//! ChaCha8 stream seeded from a `u64`, so a seed fully determines the
//! schedule on every platform.

use std::path::PathBuf;
use std::sync::mpsc::{channel, Receiver};
use std::sync::{Arc, OnceLock};
use std::thread::JoinHandle;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::context::{Frame, FrameError};

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("invalid sampler config: {0}")]
    InvalidConfig(String),
    #[error("no frame available at t={t_ms} ms")]
    Truncated { t_ms: u64 },
    #[error(transparent)]
    Frame(#[from] FrameError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    pub mean_ms: f64,
    pub std_ms: f64,
    pub exposure_limit_ms: f64,
    pub min_interval_ms: u64,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { mean_ms: 250.0, std_ms: 83.0, exposure_limit_ms: 500.0, min_interval_ms: 1, seed: 0 }
    }
}

impl SamplerConfig {
    pub fn with_seed(seed: u64) -> SamplerConfig {
        SamplerConfig { seed, ..SamplerConfig::default() }
    }

    /// A zero deviation is accepted and yields a constant interval.
    pub fn validate(&self) -> Result<(), SamplerError> {
        if !(self.mean_ms > 0.0) || !self.mean_ms.is_finite() {
            return Err(SamplerError::InvalidConfig(format!("mean must be positive, got {}", self.mean_ms)));
        }
        if !(self.std_ms >= 0.0) || !self.std_ms.is_finite() {
            return Err(SamplerError::InvalidConfig(format!("std must be non-negative, got {}", self.std_ms)));
        }
        if self.mean_ms + 3.0 * self.std_ms > self.exposure_limit_ms {
            return Err(SamplerError::InvalidConfig(format!(
                "mean + 3 std = {} exceeds the exposure limit {}",
                self.mean_ms + 3.0 * self.std_ms,
                self.exposure_limit_ms
            )));
        }
        if self.min_interval_ms == 0 {
            return Err(SamplerError::InvalidConfig("min interval must be at least 1 ms".into()));
        }
        Ok(())
    }
}

/// Stateful interval generator.
pub struct IntervalSampler {
    cfg: SamplerConfig,
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl IntervalSampler {
    pub fn new(cfg: SamplerConfig) -> IntervalSampler {
        IntervalSampler { cfg, rng: ChaCha8Rng::seed_from_u64(cfg.seed), spare: None }
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal draw; both Box-Muller outputs are used.
    pub fn next_standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn next_interval(&mut self) -> u64 {
        let z = self.next_standard_normal();
        let ms = (self.cfg.mean_ms + self.cfg.std_ms * z).round();
        if ms < self.cfg.min_interval_ms as f64 {
            self.cfg.min_interval_ms
        } else {
            ms as u64
        }
    }
}

/// Capture times in `[start, end]`: the start, every cumulative interval
/// strictly before the end, then the end itself.
pub fn schedule(cfg: &SamplerConfig, start_t_ms: u64, end_t_ms: u64) -> Vec<u64> {
    let mut sampler = IntervalSampler::new(*cfg);
    let mut times = vec![start_t_ms];
    let mut t = start_t_ms;
    loop {
        t = t.saturating_add(sampler.next_interval());
        if t >= end_t_ms {
            break;
        }
        times.push(t);
    }
    times.push(end_t_ms.max(start_t_ms));
    times
}

/// Anything that can report the screen content at a point in time.
pub trait FrameSource: Send + Sync {
    /// `Ok(None)` means the source has nothing to show at `t_ms`.
    fn frame_at(&self, t_ms: u64) -> Result<Option<Arc<Frame>>, FrameError>;
}

enum Slot {
    Ready(Arc<Frame>),
    File { path: PathBuf, cell: OnceLock<Arc<Frame>> },
}

/// Recorded frames with step-function lookup: the frame visible at `t` is
/// the last one recorded at or before `t`. Files load lazily, once.
pub struct ReplaySource {
    slots: Vec<(u64, Slot)>,
}

impl ReplaySource {
    /// Frames must be in strictly increasing time order.
    pub fn from_frames(frames: Vec<Frame>) -> ReplaySource {
        ReplaySource { slots: frames.into_iter().map(|f| (f.t_ms(), Slot::Ready(Arc::new(f)))).collect() }
    }

    pub fn from_files(files: Vec<(u64, PathBuf)>) -> ReplaySource {
        ReplaySource { slots: files.into_iter().map(|(t, path)| (t, Slot::File { path, cell: OnceLock::new() })).collect() }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }
}

impl FrameSource for ReplaySource {
    fn frame_at(&self, t_ms: u64) -> Result<Option<Arc<Frame>>, FrameError> {
        let idx = self.slots.partition_point(|(t, _)| *t <= t_ms);
        if idx == 0 {
            return Ok(None);
        }
        let (t, slot) = &self.slots[idx - 1];
        match slot {
            Slot::Ready(f) => Ok(Some(f.clone())),
            Slot::File { path, cell } => {
                if let Some(f) = cell.get() {
                    return Ok(Some(f.clone()));
                }
                let f = Arc::new(Frame::load(path, *t)?);
                Ok(Some(cell.get_or_init(|| f).clone()))
            }
        }
    }
}

/// One captured sample. Several samples may share a frame buffer.
#[derive(Debug, Clone)]
pub struct Sample {
    pub t_ms: u64,
    pub frame: Arc<Frame>,
}

/// Samples the source along the schedule. Stops at the first gap and
/// reports it as truncation.
pub fn acquire_context(
    cfg: &SamplerConfig,
    source: &dyn FrameSource,
    start_t_ms: u64,
    end_t_ms: u64,
) -> Result<Vec<Sample>, SamplerError> {
    cfg.validate()?;
    let mut out = Vec::new();
    for t_ms in schedule(cfg, start_t_ms, end_t_ms) {
        match source.frame_at(t_ms)? {
            Some(frame) => out.push(Sample { t_ms, frame }),
            None => return Err(SamplerError::Truncated { t_ms }),
        }
    }
    Ok(out)
}

/// Runs acquisition on its own thread. Samples arrive in schedule order
/// over an unbounded channel, so capture never waits for validation.
pub fn spawn_acquisition(
    cfg: SamplerConfig,
    source: Arc<dyn FrameSource>,
    start_t_ms: u64,
    end_t_ms: u64,
) -> (Receiver<Result<Sample, SamplerError>>, JoinHandle<()>) {
    let (tx, rx) = channel();
    let handle = std::thread::spawn(move || {
        if let Err(e) = cfg.validate() {
            let _ = tx.send(Err(e));
            return;
        }
        for t_ms in schedule(&cfg, start_t_ms, end_t_ms) {
            let item = match source.frame_at(t_ms) {
                Ok(Some(frame)) => Ok(Sample { t_ms, frame }),
                Ok(None) => Err(SamplerError::Truncated { t_ms }),
                Err(e) => Err(SamplerError::Frame(e)),
            };
            let stop = item.is_err();
            if tx.send(item).is_err() || stop {
                return;
            }
        }
    });
    (rx, handle)
}
