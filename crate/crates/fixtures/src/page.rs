use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use trustview_core::context::{Frame, Rect};
use trustview_core::font::{text_width, GLYPH_H};
use trustview_core::manifest::{PageBreakdown, Region, RegionKind, RenderingManifest};
use trustview_core::style::{
    caret_x, input_capacity, input_text_origin, selection_rect, BACKGROUND_RGB, CARET_LEN, CARET_RGB, CARET_TOP, FOCUS_RGB,
    FOCUS_RING, INPUT_BORDER_RGB, INPUT_HEIGHT, SELECTION_RGB, TEXT_RGB,
};

use crate::canvas::Canvas;

pub const TEXT_PAD: u32 = 3;
pub const BUTTON_RGB: [u8; 3] = [225, 225, 225];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Accent {
    /// Relative to the image's own rect.
    pub rect: Rect,
    pub rgb: [u8; 3],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pattern {
    pub base: [u8; 3],
    pub accents: Vec<Accent>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ElementKind {
    Text { content: String },
    Image { pattern: Pattern },
    /// `label` is the visible label text; `hint` also puts it in the breakdown.
    Input { label: String, hint: bool },
    Button { caption: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Element {
    pub id: String,
    pub rect: Rect,
    #[serde(flatten)]
    pub kind: ElementKind,
}

impl Element {
    /// Text element whose rect hugs the string with [`TEXT_PAD`] on each side.
    pub fn text(id: &str, x: u32, y: u32, content: &str) -> Element {
        let rect = Rect { x, y, w: text_width(content) + 2 * TEXT_PAD, h: GLYPH_H + 2 * TEXT_PAD };
        Element { id: id.into(), rect, kind: ElementKind::Text { content: content.into() } }
    }

    pub fn input(id: &str, x: u32, y: u32, w: u32, label: &str, hint: bool) -> Element {
        Element { id: id.into(), rect: Rect { x, y, w, h: INPUT_HEIGHT }, kind: ElementKind::Input { label: label.into(), hint } }
    }

    pub fn image(id: &str, rect: Rect, pattern: Pattern) -> Element {
        Element { id: id.into(), rect, kind: ElementKind::Image { pattern } }
    }

    pub fn button(id: &str, rect: Rect, caption: &str) -> Element {
        Element { id: id.into(), rect, kind: ElementKind::Button { caption: caption.into() } }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageSpec {
    pub width: u32,
    pub height: u32,
    pub elements: Vec<Element>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PageError {
    #[error("element {0:?} lies outside the viewport")]
    OutOfViewport(String),
    #[error("input elements {0:?} and {1:?} overlap")]
    OverlappingInputs(String, String),
    #[error("duplicate element id {0:?}")]
    DuplicateId(String),
    #[error("more than one button")]
    MultipleButtons,
    #[error("viewport must be positive")]
    EmptyViewport,
}

/// Visual state of the form at one instant.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PageState {
    pub values: BTreeMap<String, String>,
    pub focus: Option<String>,
    pub caret: usize,
    pub selection: Option<(usize, usize)>,
}

/// Host-side rendering deviations.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderOptions {
    /// `(input id, char index)`: that character of the value is not drawn.
    pub suppress: Option<(String, usize)>,
}

#[derive(Debug, Clone)]
pub struct RenderedPage {
    pub trusted: Frame,
    pub breakdown: PageBreakdown,
    /// Cell rect of every drawn glyph, with its element id.
    pub glyphs: Vec<(String, char, Rect)>,
    pub strings: BTreeMap<String, String>,
}

impl PageSpec {
    pub fn validate(&self) -> Result<(), PageError> {
        if self.width == 0 || self.height == 0 {
            return Err(PageError::EmptyViewport);
        }
        let mut ids = HashSet::new();
        let mut buttons = 0;
        for e in &self.elements {
            if !ids.insert(e.id.as_str()) {
                return Err(PageError::DuplicateId(e.id.clone()));
            }
            if e.rect.w == 0 || e.rect.h == 0 || !e.rect.within(self.width, self.height) {
                return Err(PageError::OutOfViewport(e.id.clone()));
            }
            if matches!(e.kind, ElementKind::Button { .. }) {
                buttons += 1;
            }
        }
        if buttons > 1 {
            return Err(PageError::MultipleButtons);
        }
        let inputs: Vec<&Element> = self.inputs().collect();
        for (i, a) in inputs.iter().enumerate() {
            for b in &inputs[i + 1..] {
                if a.rect.intersects(&b.rect) {
                    return Err(PageError::OverlappingInputs(a.id.clone(), b.id.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn inputs(&self) -> impl Iterator<Item = &Element> {
        self.elements.iter().filter(|e| matches!(e.kind, ElementKind::Input { .. }))
    }

    pub fn element(&self, id: &str) -> Option<&Element> {
        self.elements.iter().find(|e| e.id == id)
    }

    pub fn button(&self) -> Option<&Element> {
        self.elements.iter().find(|e| matches!(e.kind, ElementKind::Button { .. }))
    }

    /// Visible label of an input.
    pub fn label_of(&self, id: &str) -> Option<&str> {
        match &self.element(id)?.kind {
            ElementKind::Input { label, .. } => Some(label),
            _ => None,
        }
    }

    pub fn capacity(&self, id: &str) -> usize {
        self.element(id).map(|e| input_capacity(&e.rect)).unwrap_or(0)
    }

    pub fn breakdown(&self, page_id: &str) -> PageBreakdown {
        let regions = self
            .elements
            .iter()
            .filter_map(|e| {
                let (kind, label_hint) = match &e.kind {
                    ElementKind::Text { .. } => (RegionKind::Textual, None),
                    ElementKind::Image { .. } => (RegionKind::Graphical, None),
                    ElementKind::Input { label, hint } => (RegionKind::Input, hint.then(|| label.clone())),
                    ElementKind::Button { .. } => return None,
                };
                Some(Region { id: e.id.clone(), kind, rect: e.rect, label_hint })
            })
            .collect();
        PageBreakdown {
            page_id: page_id.into(),
            viewport: RenderingManifest { width: self.width, height: self.height },
            regions,
            // A page without a button gets a one-pixel placeholder.
            submit_button: self.button().map(|b| b.rect).unwrap_or(Rect { x: 0, y: 0, w: 1, h: 1 }),
        }
    }
}

fn draw_element(c: &mut Canvas, e: &Element, glyphs: &mut Vec<(String, char, Rect)>) {
    let r = &e.rect;
    match &e.kind {
        ElementKind::Text { content } => {
            for (ch, cell) in c.text(content, (r.x + TEXT_PAD) as i64, (r.y + TEXT_PAD) as i64, TEXT_RGB) {
                glyphs.push((e.id.clone(), ch, cell));
            }
        }
        ElementKind::Image { pattern } => {
            c.fill(r, pattern.base);
            for a in &pattern.accents {
                c.fill(&Rect { x: r.x + a.rect.x, y: r.y + a.rect.y, ..a.rect }, a.rgb);
            }
        }
        ElementKind::Input { .. } => {
            c.fill(r, BACKGROUND_RGB);
            c.outline(r, INPUT_BORDER_RGB);
        }
        ElementKind::Button { caption } => {
            c.fill(r, BUTTON_RGB);
            c.outline(r, INPUT_BORDER_RGB);
            let x = r.x as i64 + (r.w as i64 - text_width(caption) as i64) / 2;
            let y = r.y as i64 + (r.h as i64 - GLYPH_H as i64) / 2;
            for (ch, cell) in c.text(caption, x, y, TEXT_RGB) {
                glyphs.push((e.id.clone(), ch, cell));
            }
        }
    }
}

fn draw_input_state(c: &mut Canvas, e: &Element, state: &PageState, opts: &RenderOptions) {
    let r = &e.rect;
    let value = state.values.get(&e.id).map(String::as_str).unwrap_or("");
    let mut shown: Vec<char> = value.chars().collect();
    let mut caret = state.caret;
    if let Some((id, idx)) = &opts.suppress {
        if *id == e.id && *idx < shown.len() {
            shown.remove(*idx);
            if caret > *idx {
                caret -= 1;
            }
        }
    }
    let focused = state.focus.as_deref() == Some(e.id.as_str());
    if focused {
        if let Some(sel) = state.selection.and_then(|(s, e2)| selection_rect(r, s, e2)) {
            c.fill(&sel, SELECTION_RGB);
        }
    }
    let (tx, ty) = input_text_origin(r);
    let text: String = shown.iter().collect();
    c.text(&text, tx as i64, ty as i64, TEXT_RGB);
    if focused {
        c.ring(r, FOCUS_RING, FOCUS_RGB);
        if state.selection.is_none() {
            c.fill(&Rect { x: caret_x(r, caret.min(shown.len())), y: r.y + CARET_TOP, w: 1, h: CARET_LEN }, CARET_RGB);
        }
    }
}

/// Page in the given interaction state.
pub fn render_state(spec: &PageSpec, state: &PageState, opts: &RenderOptions) -> Canvas {
    let mut c = Canvas::new(spec.width, spec.height, BACKGROUND_RGB);
    let mut glyphs = Vec::new();
    for e in &spec.elements {
        draw_element(&mut c, e, &mut glyphs);
    }
    for e in spec.inputs() {
        draw_input_state(&mut c, e, state, opts);
    }
    c
}

/// Trusted rendering of the untouched page plus its breakdown and glyph
/// ground truth.
pub fn render_page(spec: &PageSpec) -> Result<RenderedPage, PageError> {
    spec.validate()?;
    let mut c = Canvas::new(spec.width, spec.height, BACKGROUND_RGB);
    let mut glyphs = Vec::new();
    for e in &spec.elements {
        draw_element(&mut c, e, &mut glyphs);
    }
    let strings = spec
        .elements
        .iter()
        .filter_map(|e| match &e.kind {
            ElementKind::Text { content } => Some((e.id.clone(), content.clone())),
            ElementKind::Button { caption } => Some((e.id.clone(), caption.clone())),
            _ => None,
        })
        .collect();
    Ok(RenderedPage { trusted: c.into_frame(0), breakdown: spec.breakdown("page"), glyphs, strings })
}
