//! Seeded generators for pages, scripts and complete labelled sessions.

use std::fmt;
use std::str::FromStr;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trustview_core::context::Rect;
use trustview_core::engine::Rule;
use trustview_core::font::text_width;

use crate::attack::{inject_attack, AttackSpec, HostTamper};
use crate::page::{Accent, Element, ElementKind, PageSpec, Pattern, TEXT_PAD};
use crate::perturb::{perturb_benign, perturb_unchecked, shift_element, ElementShift, Magnitude, Perturbation};
use crate::script::{Action, SessionScript, KEY_INTERVAL_MS};
use crate::session::{script_to_session, FixtureError, SyntheticSession};

pub const VIEWPORT_W: u32 = 360;
pub const VIEWPORT_H: u32 = 300;
pub const LOGO: Rect = Rect { x: 12, y: 10, w: 56, h: 36 };
const ROW_TOP: u32 = 84;
const ROW_PITCH: u32 = 40;
const INPUT_W: u32 = 180;

const TITLES: &[&str] = &["Transfer funds", "Send payment", "Pay invoice", "Wire money", "New transfer", "Move savings"];
const NOTES: &[&str] = &[
    "Check every field before you send.",
    "Payments leave within one day.",
    "Fees apply to foreign accounts.",
    "Your bank never asks for a PIN.",
    "Limits reset at midnight.",
];
const LABELS: &[&str] = &["Amount", "To", "Account", "Memo", "Reference", "Email", "Name", "IBAN", "City", "Phone"];
const PALETTE: &[[u8; 3]] = &[[220, 40, 40], [240, 150, 20], [120, 40, 200], [200, 30, 140], [20, 150, 150], [230, 200, 30]];
/// Characters the generated users type.
pub const TYPED: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789@.-_";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    Benign,
    MinTamper,
    ContextHide,
    HostTamper,
    Temporal,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [Scenario::Benign, Scenario::MinTamper, Scenario::ContextHide, Scenario::HostTamper, Scenario::Temporal];
    pub const ATTACKS: [Scenario; 4] = [Scenario::MinTamper, Scenario::ContextHide, Scenario::HostTamper, Scenario::Temporal];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::Benign => "benign",
            Scenario::MinTamper => "min-tamper",
            Scenario::ContextHide => "context-hide",
            Scenario::HostTamper => "host-tamper",
            Scenario::Temporal => "temporal",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Scenario, String> {
        Scenario::ALL.into_iter().find(|sc| sc.as_str() == s).ok_or_else(|| {
            format!("unknown scenario {s:?} (expected one of {})", Scenario::ALL.map(|s| s.as_str()).join(", "))
        })
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn random_word(rng: &mut ChaCha8Rng, min: usize, max: usize) -> String {
    let n = rng.random_range(min..=max);
    (0..n).map(|_| *TYPED.choose(rng).expect("alphabet is not empty") as char).collect()
}

/// Page with a logo, three lines of text, 2-3 labelled inputs and a button.
pub fn random_page(rng: &mut ChaCha8Rng) -> PageSpec {
    let mut elements = Vec::new();
    let base = *PALETTE.choose(rng).expect("palette");
    let accents = (0..rng.random_range(2..=3))
        .map(|i| Accent {
            rect: Rect { x: 4 + 16 * i, y: rng.random_range(4..=18), w: 12, h: rng.random_range(8..=14) },
            rgb: **PALETTE.iter().filter(|c| **c != base).collect::<Vec<_>>().choose(rng).expect("palette"),
        })
        .collect();
    elements.push(Element::image("logo", LOGO, Pattern { base, accents }));
    elements.push(Element::text("title", 90, 8, TITLES.choose(rng).expect("titles")));
    let acct = format!("Acct {:04}-{:02}", rng.random_range(0..10_000), rng.random_range(0..100));
    elements.push(Element::text("account", 90, 30, &acct));
    elements.push(Element::text("note", 12, 54, NOTES.choose(rng).expect("notes")));

    let n = rng.random_range(2..=3);
    let labels: Vec<&str> = LABELS.choose_multiple(rng, n).copied().collect();
    let label_w = labels.iter().map(|l| text_width(l) + 2 * TEXT_PAD).max().unwrap_or(0);
    let input_x = 16 + label_w + 24;
    for (i, label) in labels.iter().enumerate() {
        let y = ROW_TOP + i as u32 * ROW_PITCH;
        let id = label.to_lowercase();
        elements.push(Element::text(&format!("label_{id}"), 16, y + 1, label));
        elements.push(Element::input(&format!("in_{id}"), input_x, y, INPUT_W, label, rng.random_bool(0.3)));
    }
    let by = ROW_TOP + n as u32 * ROW_PITCH + 4;
    elements.push(Element::button("send", Rect { x: input_x, y: by, w: 64, h: 24 }, "Send"));
    PageSpec { width: VIEWPORT_W, height: VIEWPORT_H, elements }
}

fn button_center(spec: &PageSpec) -> (u32, u32) {
    let b = spec.button().expect("generated pages have a button").rect;
    (b.x + b.w / 2, b.y + b.h / 2)
}

/// Mix of edits a generated user performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScriptStyle {
    /// Focus and type into every input once.
    Simple,
    /// Adds refocusing, caret moves, selections, deletions and pastes.
    Rich,
}

/// User session over `spec` ending with a click on the button. Action
/// groups are at least 700 ms apart.
pub fn random_script(spec: &PageSpec, rng: &mut ChaCha8Rng, style: ScriptStyle, final_idle_ms: u64) -> SessionScript {
    let inputs: Vec<String> = spec.inputs().map(|e| e.id.clone()).collect();
    let mut s = SessionScript::default();
    let mut values: std::collections::BTreeMap<String, usize> = inputs.iter().map(|i| (i.clone(), 0)).collect();
    let gap = |rng: &mut ChaCha8Rng| rng.random_range(700..=1000);
    let mut focus: Option<String> = None;
    let mut caret = 0usize;
    for id in &inputs {
        s.then(gap(rng), Action::Focus { input: id.clone() });
        let text = random_word(rng, 2, 8);
        values.insert(id.clone(), text.len());
        caret = text.len();
        focus = Some(id.clone());
        s.then(gap(rng), Action::Type { text });
    }
    if style == ScriptStyle::Rich {
        for _ in 0..rng.random_range(1..=4) {
            let id = inputs.choose(rng).expect("inputs").clone();
            let cap = spec.capacity(&id);
            if focus.as_deref() != Some(id.as_str()) || rng.random_bool(0.3) {
                s.then(gap(rng), Action::Focus { input: id.clone() });
                focus = Some(id.clone());
                caret = values[&id];
            }
            let len = values[&id];
            match rng.random_range(0..5) {
                0 if len < cap => {
                    let t = random_word(rng, 1, (cap - len).min(4));
                    values.insert(id.clone(), len + t.len());
                    caret += t.len();
                    s.then(gap(rng), Action::Type { text: t });
                }
                1 if len > 0 && len < cap => {
                    let col = rng.random_range(0..=len);
                    s.then(gap(rng), Action::MoveCaret { column: col });
                    let t = random_word(rng, 1, (cap - len).min(3));
                    values.insert(id.clone(), len + t.len());
                    caret = col + t.len();
                    s.then(gap(rng), Action::Type { text: t });
                }
                2 if len >= 2 => {
                    let a = rng.random_range(0..len);
                    let b = rng.random_range(a + 1..=len);
                    s.then(gap(rng), Action::Select { start: a, end: b });
                    let forward = rng.random_bool(0.5);
                    s.then(gap(rng), if forward { Action::DeleteForward } else { Action::Delete });
                    values.insert(id.clone(), len - (b - a));
                    caret = a;
                }
                3 if caret > 0 => {
                    let k = rng.random_range(1..=caret.min(3));
                    for i in 0..k {
                        s.then(if i == 0 { gap(rng) } else { KEY_INTERVAL_MS }, Action::Delete);
                    }
                    values.insert(id.clone(), len - k);
                    caret -= k;
                }
                4 if len < cap => {
                    let t = random_word(rng, 2, (cap - len).clamp(2, 12));
                    if len + t.len() <= cap {
                        values.insert(id.clone(), len + t.len());
                        caret += t.len();
                        s.then(gap(rng), Action::Paste { text: t });
                    }
                }
                _ => {}
            }
        }
        if let Some(id) = &focus {
            let len = values[id];
            if len >= 2 && rng.random_bool(0.2) {
                let a = rng.random_range(0..len - 1);
                s.then(gap(rng), Action::Select { start: a, end: len });
            }
        }
    }
    let (x, y) = button_center(spec);
    s.then(final_idle_ms.max(700), Action::Click { x, y });
    s
}

/// Unperturbed honest session for `seed`; every scenario derives from it.
pub fn base_session(seed: u64) -> Result<SyntheticSession, FixtureError> {
    let mut rng = rng_for(seed, 1);
    let spec = random_page(&mut rng);
    let script = random_script(&spec, &mut rng, ScriptStyle::Simple, 2600);
    script_to_session(&spec, &script, seed)
}

/// Honest session with a rich script and no rendering noise.
pub fn rich_session(seed: u64) -> Result<SyntheticSession, FixtureError> {
    let mut rng = rng_for(seed, 2);
    let spec = random_page(&mut rng);
    let idle = rng.random_range(700..=1200);
    let script = random_script(&spec, &mut rng, ScriptStyle::Rich, idle);
    script_to_session(&spec, &script, seed)
}

/// Seeded mix of in-envelope rendering noise for `session`.
pub fn benign_magnitude(session: &SyntheticSession, rng: &mut ChaCha8Rng) -> Magnitude {
    let mut m = Magnitude::default();
    match rng.random_range(0..3) {
        0 => m.pixel.push(Perturbation::Jitter {
            dh: rng.random_range(-10.0..=10.0),
            ds: rng.random_range(-0.08..=0.08),
            dv: rng.random_range(-0.08..=0.08),
        }),
        1 => m.pixel.push(Perturbation::Jitter { dh: 0.0, ds: 0.0, dv: -0.10 }),
        _ => {}
    }
    if rng.random_bool(0.5) {
        m.pixel.push(Perturbation::Antialias { seed: rng.random(), max_blend: 0.45, fraction: 0.5 });
    }
    if rng.random_bool(0.6) {
        let movable: Vec<&Element> =
            session.local_spec.elements.iter().filter(|e| matches!(e.kind, ElementKind::Text { .. } | ElementKind::Image { .. })).collect();
        let e = movable.choose(rng).expect("generated pages have text");
        let dx = ((e.rect.w as f64 * 0.04).round() as i32).max(1);
        let dy = ((e.rect.h as f64 * 0.04).round() as i32).max(1);
        let mut dirs = [(dx, 0), (-dx, 0), (0, dy), (0, -dy)];
        dirs.shuffle(rng);
        m.shift = dirs
            .into_iter()
            .map(|(dx, dy)| ElementShift { element: e.id.clone(), dx, dy })
            .find(|s| shift_element(&session.local_spec, s).is_ok());
    }
    m
}

pub fn benign_session(seed: u64) -> Result<SyntheticSession, FixtureError> {
    let base = if seed.is_multiple_of(2) { base_session(seed)? } else { rich_session(seed)? };
    let mut rng = rng_for(seed, 3);
    let m = benign_magnitude(&base, &mut rng);
    perturb_benign(&base, &m).map_err(|e| FixtureError::Invalid(e.to_string()))
}

fn textual_ids(spec: &PageSpec) -> Vec<String> {
    spec.elements.iter().filter(|e| matches!(e.kind, ElementKind::Text { .. })).map(|e| e.id.clone()).collect()
}

/// One glyph of a random text element swapped for a different character.
pub fn random_min_tamper(spec: &PageSpec, rng: &mut ChaCha8Rng) -> AttackSpec {
    let id = textual_ids(spec).choose(rng).expect("text elements").clone();
    let Some(ElementKind::Text { content }) = spec.element(&id).map(|e| &e.kind) else { unreachable!("text id") };
    let chars: Vec<char> = content.chars().collect();
    let idx: Vec<usize> = (0..chars.len()).filter(|&i| chars[i].is_ascii_alphanumeric()).collect();
    let index = *idx.choose(rng).expect("text has letters");
    let replacement = loop {
        let c = *TYPED.choose(rng).expect("alphabet") as char;
        if c != chars[index] && c.is_ascii_alphanumeric() {
            break c;
        }
    };
    AttackSpec::MinTamper { region: id, index, replacement }
}

fn last_event_before(s: &SyntheticSession, t: u64) -> u64 {
    s.hid.iter().filter(|e| e.t_ms < t).map(|e| e.t_ms).max().unwrap_or(0)
}

fn host_tamper(base: &SyntheticSession, rng: &mut ChaCha8Rng) -> AttackSpec {
    let at = last_event_before(base, base.end_t_ms) + 1300;
    let focus = base.state_at(at).focus.clone();
    let ch = *TYPED.choose(rng).expect("alphabet") as char;
    let tamper = match rng.random_range(0..3) {
        0 => {
            let (id, len) = base
                .truth
                .history
                .fields
                .iter()
                .map(|(id, r)| (id.clone(), r.value.chars().count()))
                .max_by_key(|(_, l)| *l)
                .expect("inputs");
            HostTamper::Suppress { input: id, index: rng.random_range(0..len) }
        }
        1 => HostTamper::NoHid { input: focus.expect("an input holds the focus"), t_ms: at, ch },
        _ => {
            let others: Vec<String> = base.spec.inputs().map(|e| e.id.clone()).filter(|id| Some(id) != focus.as_ref()).collect();
            HostTamper::NonPofEdit { input: others.choose(rng).expect("at least two inputs").clone(), t_ms: at, ch }
        }
    };
    AttackSpec::HostTamper { tamper }
}

/// Session for `scenario` built on the seed's base session.
pub fn scenario_session(scenario: Scenario, seed: u64) -> Result<SyntheticSession, FixtureError> {
    if scenario == Scenario::Benign {
        return benign_session(seed);
    }
    let base = base_session(seed)?;
    let attack = attack_for(&base, scenario, seed);
    inject_attack(&base, &attack).map_err(|e| FixtureError::Invalid(e.to_string()))
}

/// Attack parameters for `scenario` against `base`.
pub fn attack_for(base: &SyntheticSession, scenario: Scenario, seed: u64) -> AttackSpec {
    let mut rng = rng_for(seed, 4);
    match scenario {
        Scenario::MinTamper => random_min_tamper(&base.spec, &mut rng),
        Scenario::ContextHide => {
            let keep = textual_ids(&base.spec).choose(&mut rng).expect("text").clone();
            AttackSpec::ContextHide { keep }
        }
        Scenario::HostTamper => host_tamper(base, &mut rng),
        Scenario::Temporal | Scenario::Benign => {
            let len = rng.random_range(600..=900);
            let t0 = rng.random_range(base.start_t_ms + 200..=base.end_t_ms - len - 100);
            AttackSpec::Temporal { t0_ms: t0, t1_ms: t0 + len, rect: Rect { x: 84, y: 4, w: 240, h: 46 }, caption: "Update now".into() }
        }
    }
}

/// Rendering deviation just past one threshold, with the rule that must
/// catch it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Probe {
    ColorPatch,
    Shift,
    Glyph,
}

impl Probe {
    pub const ALL: [Probe; 3] = [Probe::ColorPatch, Probe::Shift, Probe::Glyph];

    pub fn expected_rule(&self) -> Rule {
        match self {
            Probe::ColorPatch => Rule::ColorDifference,
            Probe::Shift => Rule::PositionDifference,
            Probe::Glyph => Rule::TextMismatch,
        }
    }
}

/// `probe` applied to the seed's base session at 1.2x its threshold.
pub fn probe_session(probe: Probe, seed: u64) -> Result<SyntheticSession, FixtureError> {
    let base = base_session(seed)?;
    let mut rng = rng_for(seed, 5);
    let invalid = |e: crate::perturb::PerturbError| FixtureError::Invalid(e.to_string());
    let mut s = match probe {
        Probe::ColorPatch => {
            let rect = Rect { x: LOGO.x + LOGO.w / 4, y: LOGO.y + LOGO.h / 4, w: LOGO.w / 2, h: LOGO.h / 2 };
            let m = Magnitude { pixel: vec![Perturbation::Patch { rect, dv: -0.18 }], shift: None };
            perturb_unchecked(&base, &m).map_err(invalid)?
        }
        Probe::Shift => {
            let d = (LOGO.w.max(LOGO.h) as f64 * 0.12).round() as i32;
            let mut dirs = [(d, 0), (-d, 0), (0, d), (0, -d)];
            dirs.shuffle(&mut rng);
            let shift = dirs
                .into_iter()
                .map(|(dx, dy)| ElementShift { element: "logo".into(), dx, dy })
                .find(|s| shift_element(&base.local_spec, s).is_ok())
                .ok_or_else(|| FixtureError::Invalid("logo cannot move".into()))?;
            perturb_unchecked(&base, &Magnitude { pixel: Vec::new(), shift: Some(shift) }).map_err(invalid)?
        }
        Probe::Glyph => {
            let a = random_min_tamper(&base.spec, &mut rng);
            inject_attack(&base, &a).map_err(|e| FixtureError::Invalid(e.to_string()))?
        }
    };
    s.scenario = format!("probe-{probe:?}").to_lowercase();
    s.truth.intended = false;
    Ok(s)
}

/// Honest session except that one input already holds text when the page
/// appears.
pub fn prefilled_session(seed: u64) -> Result<SyntheticSession, FixtureError> {
    let mut rng = rng_for(seed, 6);
    let spec = random_page(&mut rng);
    let mut script = random_script(&spec, &mut rng, ScriptStyle::Simple, 900);
    let target = spec.inputs().map(|e| e.id.clone()).collect::<Vec<_>>().choose(&mut rng).expect("inputs").clone();
    script.prefill.insert(target, random_word(&mut rng, 1, 6));
    let mut s = script_to_session(&spec, &script, seed)?;
    s.scenario = "prefilled".into();
    s.truth.intended = false;
    Ok(s)
}

/// One short entry followed by a long idle stretch, about `secs` long.
pub fn idle_session(seed: u64, secs: u64) -> Result<SyntheticSession, FixtureError> {
    let mut rng = rng_for(seed, 7);
    let spec = random_page(&mut rng);
    let first = spec.inputs().next().expect("inputs").id.clone();
    let mut script = SessionScript::default();
    script.then(600, Action::Focus { input: first }).then(700, Action::Type { text: random_word(&mut rng, 3, 5) });
    let (x, y) = button_center(&spec);
    let used = script.actions.last().map(|a| a.t_ms).unwrap_or(0);
    script.then((secs * 1000).saturating_sub(used).max(700), Action::Click { x, y });
    let mut s = script_to_session(&spec, &script, seed)?;
    s.scenario = "idle".into();
    Ok(s)
}

/// Two-field transfer form with a logo and a submit button.
pub fn example_spec() -> PageSpec {
    let pattern = Pattern {
        base: [220, 40, 40],
        accents: vec![Accent { rect: Rect { x: 6, y: 6, w: 14, h: 14 }, rgb: [240, 200, 30] }],
    };
    PageSpec {
        width: VIEWPORT_W,
        height: 220,
        elements: vec![
            Element::image("logo", LOGO, pattern),
            Element::text("title", 90, 8, "Transfer funds"),
            Element::text("account", 90, 30, "Acct 4521-88"),
            Element::text("label_amount", 16, ROW_TOP + 1, "Amount"),
            Element::input("in_amount", 96, ROW_TOP, INPUT_W, "Amount", false),
            Element::text("label_to", 16, ROW_TOP + ROW_PITCH + 1, "To"),
            Element::input("in_to", 96, ROW_TOP + ROW_PITCH, INPUT_W, "To", false),
            Element::button("send", Rect { x: 96, y: ROW_TOP + 2 * ROW_PITCH + 4, w: 64, h: 24 }, "Send"),
        ],
    }
}

/// Types "100" into Amount and "Bob" into To, then submits.
pub fn example_script(spec: &PageSpec) -> SessionScript {
    let (x, y) = button_center(spec);
    let mut s = SessionScript::default();
    s.then(600, Action::Focus { input: "in_amount".into() })
        .then(700, Action::Type { text: "100".into() })
        .then(800, Action::Focus { input: "in_to".into() })
        .then(700, Action::Type { text: "Bob".into() })
        .then(900, Action::Click { x, y });
    s
}
