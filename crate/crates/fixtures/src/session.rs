use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use trustview_core::context::{Frame, FrameError, Rect};
use trustview_core::engine::LoadedSession;
use trustview_core::font::{text_width, GLYPH_H};
use trustview_core::input::InputHistory;
use trustview_core::manifest::{serialize_hid_log, FrameRef, HidEvent, ManifestError, Request, SessionManifest};
use trustview_core::style::{INPUT_BORDER_RGB, TEXT_RGB};

use crate::attack::AttackSpec;
use crate::canvas::Canvas;
use crate::page::{render_page, render_state, PageError, PageSpec, PageState, RenderOptions};
use crate::perturb::Perturbation;
use crate::script::{oracle_extract, ScriptError, SessionScript};

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error(transparent)]
    Page(#[from] PageError),
    #[error(transparent)]
    Script(#[from] ScriptError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Invalid(String),
}

/// Opaque box drawn over the page during `[t0_ms, t1_ms)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Popup {
    pub t0_ms: u64,
    pub t1_ms: u64,
    pub rect: Rect,
    pub rgb: [u8; 3],
    pub caption: String,
}

impl Popup {
    fn draw(&self, c: &mut Canvas) {
        c.fill(&self.rect, self.rgb);
        c.outline(&self.rect, INPUT_BORDER_RGB);
        let x = self.rect.x as i64 + (self.rect.w as i64 - text_width(&self.caption) as i64) / 2;
        let y = self.rect.y as i64 + (self.rect.h as i64 - GLYPH_H as i64) / 2;
        c.text(&self.caption, x, y, TEXT_RGB);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// Whether an honest checker should let this session through.
    pub intended: bool,
    /// Inputs the user actually meant to submit.
    pub history: InputHistory,
}

/// Contents of `ground_truth.json` in a written session directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruthDoc {
    pub scenario: String,
    pub seed: u64,
    #[serde(flatten)]
    pub truth: GroundTruth,
}

impl GroundTruthDoc {
    pub fn load(path: &Path) -> Result<GroundTruthDoc, FixtureError> {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        serde_json::from_str(&text).map_err(|e| FixtureError::Invalid(format!("{}: {e}", path.display())))
    }
}

/// Everything needed to render and judge one synthetic session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSession {
    pub scenario: String,
    pub seed: u64,
    /// The page as the service intends it.
    pub spec: PageSpec,
    /// The page as the host actually draws it.
    pub local_spec: PageSpec,
    pub script: SessionScript,
    pub states: Vec<(u64, PageState)>,
    pub hid: Vec<HidEvent>,
    pub start_t_ms: u64,
    pub end_t_ms: u64,
    #[serde(default)]
    pub render: RenderOptions,
    #[serde(default)]
    pub popups: Vec<Popup>,
    #[serde(default)]
    pub perturbations: Vec<Perturbation>,
    pub request: Request,
    pub truth: GroundTruth,
    #[serde(default)]
    pub attack: Option<AttackSpec>,
}

/// Renders every visual state the script produces, ending at the script's
/// last event.
pub fn script_to_session(spec: &PageSpec, script: &SessionScript, seed: u64) -> Result<SyntheticSession, FixtureError> {
    spec.validate()?;
    let sim = script.simulate(spec)?;
    let history = oracle_extract(spec, script)?;
    let pairs = history.labelled_values();
    let request = Request::new(pairs)?;
    let end_t_ms = sim.end_t_ms.max(sim.states.last().map(|s| s.0).unwrap_or(0));
    Ok(SyntheticSession {
        scenario: "benign".into(),
        seed,
        spec: spec.clone(),
        local_spec: spec.clone(),
        script: script.clone(),
        states: sim.states,
        hid: sim.hid,
        start_t_ms: 0,
        end_t_ms,
        render: RenderOptions::default(),
        popups: Vec::new(),
        perturbations: Vec::new(),
        request,
        truth: GroundTruth { intended: true, history },
        attack: None,
    })
}

impl SyntheticSession {
    /// Times at which the picture can change.
    pub fn frame_times(&self) -> Vec<u64> {
        let mut ts: Vec<u64> = self.states.iter().map(|s| s.0).collect();
        for p in &self.popups {
            ts.push(p.t0_ms);
            ts.push(p.t1_ms);
        }
        ts.retain(|t| (self.start_t_ms..=self.end_t_ms).contains(t));
        ts.push(self.start_t_ms);
        ts.sort_unstable();
        ts.dedup();
        ts
    }

    pub fn state_at(&self, t_ms: u64) -> &PageState {
        let i = self.states.partition_point(|(t, _)| *t <= t_ms);
        &self.states[i.saturating_sub(1)].1
    }

    pub fn render_at(&self, t_ms: u64) -> Frame {
        let mut c = render_state(&self.local_spec, self.state_at(t_ms), &self.render);
        for p in self.popups.iter().filter(|p| (p.t0_ms..p.t1_ms).contains(&t_ms)) {
            p.draw(&mut c);
        }
        for p in &self.perturbations {
            p.apply(&mut c);
        }
        c.into_frame(t_ms)
    }

    pub fn frames(&self) -> Vec<Frame> {
        self.frame_times().into_iter().map(|t| self.render_at(t)).collect()
    }

    pub fn trusted(&self) -> Result<Frame, FixtureError> {
        Ok(render_page(&self.spec)?.trusted)
    }

    pub fn to_loaded(&self) -> Result<LoadedSession, FixtureError> {
        let page = render_page(&self.spec)?;
        Ok(LoadedSession::from_parts(page.breakdown, self.hid.clone(), page.trusted, self.frames(), self.start_t_ms, self.end_t_ms))
    }

    /// Writes a session directory that `verify` can consume.
    pub fn write_dir(&self, dir: &Path) -> Result<SessionManifest, FixtureError> {
        let page = render_page(&self.spec)?;
        fs::create_dir_all(dir.join("frames")).map_err(|e| io_err(&dir.join("frames"), e))?;
        let mut refs = Vec::new();
        for (i, f) in self.frames().into_iter().enumerate() {
            let rel = format!("frames/{i:04}.png");
            f.save_png(&dir.join(&rel))?;
            refs.push(FrameRef { t_ms: f.t_ms(), path: rel });
        }
        page.trusted.save_png(&dir.join("trusted.png"))?;
        let manifest = SessionManifest {
            start_t_ms: self.start_t_ms,
            end_t_ms: self.end_t_ms,
            frames: refs,
            hid: "hid.log".into(),
            trusted: "trusted.png".into(),
            breakdown: "breakdown.json".into(),
            base_dir: dir.to_path_buf(),
        };
        write(&dir.join("breakdown.json"), &page.breakdown.to_json())?;
        write(&dir.join("hid.log"), &serialize_hid_log(&self.hid))?;
        write(&dir.join("session.json"), &manifest.to_json())?;
        let doc = GroundTruthDoc { scenario: self.scenario.clone(), seed: self.seed, truth: self.truth.clone() };
        write(&dir.join("ground_truth.json"), &to_json(&doc))?;
        write(&dir.join("request.txt"), &self.request.to_text())?;
        write(&dir.join("fixture.json"), &to_json(self))?;
        if let Some(a) = &self.attack {
            write(&dir.join("attack.json"), &to_json(a))?;
        }
        Ok(manifest)
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("fixture types serialize")
}

fn io_err(path: &Path, source: std::io::Error) -> FixtureError {
    FixtureError::Io { path: path.display().to_string(), source }
}

fn write(path: &Path, text: &str) -> Result<(), FixtureError> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}
