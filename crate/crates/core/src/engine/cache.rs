use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

use sha2::{Digest as _, Sha256};

use crate::context::{Digest, Frame, Rect};
use crate::manifest::Region;
use crate::output::RegionVerdict;

/// Region verdicts and whole-frame passes, keyed by content digests. The
/// text cache lives in the OCR service.
#[derive(Debug, Default)]
pub struct CacheSet {
    enabled: bool,
    regions: RwLock<HashMap<Digest, RegionVerdict>>,
    frames: RwLock<HashMap<(Digest, Digest), Vec<Rect>>>,
    region_hits: AtomicU64,
    region_misses: AtomicU64,
    frame_hits: AtomicU64,
    frame_misses: AtomicU64,
}

/// Key for one region validation: the local pixels the validator can read,
/// the trusted rendering, and the region itself.
pub fn region_key(local: &Frame, window: &Rect, trusted: &Digest, region: &Region) -> Digest {
    let mut h = Sha256::new();
    h.update(trusted);
    h.update(region.id.as_bytes());
    h.update([0, region.kind as u8]);
    for v in [region.rect.x, region.rect.y, region.rect.w, region.rect.h, window.x, window.y, window.w, window.h] {
        h.update(v.to_be_bytes());
    }
    let stride = local.width() as usize * 3;
    let px = local.pixels();
    for y in window.y..window.bottom() {
        let start = y as usize * stride + window.x as usize * 3;
        h.update(&px[start..start + window.w as usize * 3]);
    }
    h.finalize().into()
}

impl CacheSet {
    pub fn new(enabled: bool) -> CacheSet {
        CacheSet { enabled, ..CacheSet::default() }
    }

    pub fn enabled(&self) -> bool {
        self.enabled
    }

    pub fn region(&self, key: &Digest) -> Option<RegionVerdict> {
        if !self.enabled {
            return None;
        }
        let hit = self.regions.read().expect("region cache lock").get(key).cloned();
        let counter = if hit.is_some() { &self.region_hits } else { &self.region_misses };
        counter.fetch_add(1, Ordering::Relaxed);
        hit
    }

    pub fn put_region(&self, key: Digest, v: RegionVerdict) {
        if self.enabled {
            self.regions.write().expect("region cache lock").insert(key, v);
        }
    }

    /// Text boxes of a frame that previously passed in the same state.
    pub fn frame(&self, frame: &Digest, state: &Digest) -> Option<Vec<Rect>> {
        if !self.enabled {
            return None;
        }
        let hit = self.frames.read().expect("frame cache lock").get(&(*frame, *state)).cloned();
        let counter = if hit.is_some() { &self.frame_hits } else { &self.frame_misses };
        counter.fetch_add(1, Ordering::Relaxed);
        hit
    }

    pub fn put_frame(&self, frame: Digest, state: Digest, boxes: Vec<Rect>) {
        if self.enabled {
            self.frames.write().expect("frame cache lock").insert((frame, state), boxes);
        }
    }

    /// `(frame hits, frame misses, region hits, region misses)`.
    pub fn counts(&self) -> (u64, u64, u64, u64) {
        (
            self.frame_hits.load(Ordering::Relaxed),
            self.frame_misses.load(Ordering::Relaxed),
            self.region_hits.load(Ordering::Relaxed),
            self.region_misses.load(Ordering::Relaxed),
        )
    }
}
