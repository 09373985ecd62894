use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{utf8, ManifestError};
use crate::context::Rect;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionKind {
    Textual,
    Graphical,
    Input,
}

impl RegionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionKind::Textual => "textual",
            RegionKind::Graphical => "graphical",
            RegionKind::Input => "input",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub id: String,
    pub kind: RegionKind,
    pub rect: Rect,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_hint: Option<String>,
}

/// Window resolution the trusted rendering was produced at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderingManifest {
    pub width: u32,
    pub height: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageBreakdown {
    pub page_id: String,
    pub viewport: RenderingManifest,
    pub regions: Vec<Region>,
    pub submit_button: Rect,
}

impl PageBreakdown {
    /// Checks every structural invariant of a breakdown.
    pub fn validate(&self) -> Result<(), ManifestError> {
        let RenderingManifest { width, height } = self.viewport;
        if width == 0 || height == 0 {
            return Err(ManifestError::EmptyViewport { width, height });
        }
        let mut ids = HashSet::new();
        for r in &self.regions {
            if r.rect.w == 0 || r.rect.h == 0 {
                return Err(ManifestError::EmptyRect { id: r.id.clone() });
            }
            if !r.rect.within(width, height) {
                return Err(ManifestError::OutOfViewport { id: r.id.clone(), width, height });
            }
            if !ids.insert(r.id.as_str()) {
                return Err(ManifestError::DuplicateId(r.id.clone()));
            }
        }
        let inputs: Vec<&Region> = self.inputs().collect();
        for (i, a) in inputs.iter().enumerate() {
            for b in &inputs[i + 1..] {
                if a.rect.intersects(&b.rect) {
                    return Err(ManifestError::OverlappingInputs { a: a.id.clone(), b: b.id.clone() });
                }
            }
        }
        let s = &self.submit_button;
        if s.w == 0 || s.h == 0 {
            return Err(ManifestError::EmptyRect { id: "submit_button".into() });
        }
        if !s.within(width, height) {
            return Err(ManifestError::OutOfViewport { id: "submit_button".into(), width, height });
        }
        Ok(())
    }

    pub fn inputs(&self) -> impl Iterator<Item = &Region> {
        self.regions.iter().filter(|r| r.kind == RegionKind::Input)
    }

    pub fn textual(&self) -> impl Iterator<Item = &Region> {
        self.regions.iter().filter(|r| r.kind == RegionKind::Textual)
    }

    pub fn graphical(&self) -> impl Iterator<Item = &Region> {
        self.regions.iter().filter(|r| r.kind == RegionKind::Graphical)
    }

    pub fn region(&self, id: &str) -> Option<&Region> {
        self.regions.iter().find(|r| r.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("breakdown serializes")
    }
}

pub fn parse_breakdown(bytes: &[u8]) -> Result<PageBreakdown, ManifestError> {
    let text = utf8(bytes)?;
    let b: PageBreakdown = serde_json::from_str(text).map_err(|e| ManifestError::Malformed(e.to_string()))?;
    b.validate()?;
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG3: &str = r#"{
        "page_id": "transfer",
        "viewport": {"width": 640, "height": 480},
        "regions": [
            {"id": "logo", "kind": "graphical", "rect": {"x": 20, "y": 20, "w": 120, "h": 60}},
            {"id": "title", "kind": "textual", "rect": {"x": 160, "y": 40, "w": 200, "h": 14}},
            {"id": "amount_label", "kind": "textual", "rect": {"x": 20, "y": 124, "w": 56, "h": 14}},
            {"id": "amount", "kind": "input", "rect": {"x": 120, "y": 120, "w": 200, "h": 22}},
            {"id": "to_label", "kind": "textual", "rect": {"x": 20, "y": 164, "w": 16, "h": 14}},
            {"id": "to", "kind": "input", "rect": {"x": 120, "y": 160, "w": 200, "h": 22}, "label_hint": "To"},
            {"id": "submit", "kind": "textual", "rect": {"x": 120, "y": 210, "w": 80, "h": 24}}
        ],
        "submit_button": {"x": 120, "y": 210, "w": 80, "h": 24}
    }"#;

    #[test]
    fn parses_figure_style_layout() {
        let b = parse_breakdown(FIG3.as_bytes()).unwrap();
        assert_eq!(b.regions.len(), 7);
        assert_eq!(b.inputs().count(), 2);
        assert_eq!(b.region("to").unwrap().label_hint.as_deref(), Some("To"));
        assert_eq!(b.regions[0].id, "logo");
    }

    #[test]
    fn empty_region_list_is_valid() {
        let doc = r#"{"page_id":"p","viewport":{"width":10,"height":10},"regions":[],"submit_button":{"x":0,"y":0,"w":2,"h":2}}"#;
        assert!(parse_breakdown(doc.as_bytes()).unwrap().regions.is_empty());
    }

    #[test]
    fn distinct_errors_for_each_violation() {
        let base = |regions: &str| {
            format!(r#"{{"page_id":"p","viewport":{{"width":100,"height":50}},"regions":[{regions}],"submit_button":{{"x":0,"y":0,"w":5,"h":5}}}}"#)
        };
        let past_edge = base(r#"{"id":"a","kind":"input","rect":{"x":0,"y":0,"w":101,"h":10}}"#);
        assert!(matches!(parse_breakdown(past_edge.as_bytes()), Err(ManifestError::OutOfViewport { .. })));
        let overlap = base(
            r#"{"id":"a","kind":"input","rect":{"x":0,"y":0,"w":10,"h":10}},{"id":"b","kind":"input","rect":{"x":9,"y":9,"w":10,"h":10}}"#,
        );
        assert!(matches!(parse_breakdown(overlap.as_bytes()), Err(ManifestError::OverlappingInputs { .. })));
        let dup = base(
            r#"{"id":"a","kind":"textual","rect":{"x":0,"y":0,"w":10,"h":10}},{"id":"a","kind":"graphical","rect":{"x":0,"y":0,"w":10,"h":10}}"#,
        );
        assert!(matches!(parse_breakdown(dup.as_bytes()), Err(ManifestError::DuplicateId(_))));
        let bad_kind = base(r#"{"id":"a","kind":"video","rect":{"x":0,"y":0,"w":10,"h":10}}"#);
        assert!(matches!(parse_breakdown(bad_kind.as_bytes()), Err(ManifestError::Malformed(_))));
        let empty = base(r#"{"id":"a","kind":"textual","rect":{"x":0,"y":0,"w":0,"h":10}}"#);
        assert!(matches!(parse_breakdown(empty.as_bytes()), Err(ManifestError::EmptyRect { .. })));
    }

    #[test]
    fn textual_may_overlap_graphical() {
        let doc = r#"{"page_id":"p","viewport":{"width":100,"height":50},"regions":[
            {"id":"bg","kind":"graphical","rect":{"x":0,"y":0,"w":50,"h":50}},
            {"id":"t","kind":"textual","rect":{"x":5,"y":5,"w":20,"h":14}}],
            "submit_button":{"x":0,"y":0,"w":5,"h":5}}"#;
        assert!(parse_breakdown(doc.as_bytes()).is_ok());
    }

    proptest::proptest! {
        #[test]
        fn json_round_trips(rows in proptest::collection::vec((0u32..3, 1u32..30, 1u32..20, proptest::option::of("[A-Za-z]{1,6}")), 0..6)) {
            let regions: Vec<Region> = rows
                .into_iter()
                .enumerate()
                .map(|(i, (k, w, h, hint))| {
                    let kind = [RegionKind::Textual, RegionKind::Graphical, RegionKind::Input][k as usize];
                    let label_hint = if kind == RegionKind::Input { hint } else { None };
                    Region { id: format!("r{i}"), kind, rect: crate::context::Rect { x: 0, y: i as u32 * 20, w, h }, label_hint }
                })
                .collect();
            let b = PageBreakdown {
                page_id: "p".into(),
                viewport: RenderingManifest { width: 40, height: 140 },
                regions,
                submit_button: crate::context::Rect { x: 0, y: 0, w: 4, h: 4 },
            };
            proptest::prop_assert_eq!(parse_breakdown(b.to_json().as_bytes()).unwrap(), b);
        }
    }
}
