//! Session-verdict engine for screen-interaction integrity.
//!
//! A recorded session (sampled frames plus a hardware-IO log) is compared
//! region by region against a trusted rendering of the same page. Text the
//! user typed is extracted by tracking the position of focus, and an outgoing
//! request is signed only when the whole session passed every check and the
//! request matches the extracted inputs.
//!
//! Module map:
//!
//! - [`context`]: rasters, geometry, HSV colour, digests, alignment.
//! - [`manifest`]: parsers for breakdowns, HID logs, requests and session manifests.
//! - [`sampler`]: randomized context-collection schedule and frame acquisition.
//! - [`output`]: text detection, OCR, text and graphics region validation.
//! - [`input`]: position-of-focus detection, edit rules, labels, HID correlation.
//! - [`engine`]: per-frame validation with diff scoping and caches, whole sessions.
//! - [`gate`]: request matching, canonical serialization and Ed25519 signing.

pub mod context;
pub mod engine;
pub mod font;
pub mod gate;
pub mod input;
pub mod manifest;
pub mod output;
pub mod sampler;
pub mod style;

pub use context::{Frame, FrameError, HsvPixel, Rect, Shift};
pub use engine::{run_session, EngineConfig, SessionReport, SessionVerdict, VerdictStatus};
pub use manifest::{HidEvent, PageBreakdown, Region, RegionKind, Request};
