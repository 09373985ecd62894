//! Position-of-focus tracking and extraction of user-intended input.

mod edit;
mod hid;
mod label;
mod pof;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use edit::{classify_change, classify_edit, EditClass, EditKind};
pub use hid::{correlate_hid, has_event_in_window, HID_WINDOW_MS};
pub use label::{extract_label, label_candidate, LabelError};
pub use pof::{
    caret_column, check_consistency, column_at, detect_indicators, detect_pof, input_plane, resolve_pof, selection_columns, Indicators,
    RawPof,
};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Caret {
    pub region_id: String,
    pub column: usize,
    pub x: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Selection {
    pub region_id: String,
    pub start: usize,
    pub end: usize,
}

/// Focus indicators visible in one frame.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PofState {
    pub focus_box: Option<String>,
    pub caret: Option<Caret>,
    pub selection: Option<Selection>,
}

impl PofState {
    /// The input the user is editing, if any indicator names one.
    pub fn region(&self) -> Option<&str> {
        self.caret
            .as_ref()
            .map(|c| c.region_id.as_str())
            .or(self.selection.as_ref().map(|s| s.region_id.as_str()))
            .or(self.focus_box.as_deref())
    }

    /// Edit anchor inside `region_id`: the caret column, else the start of
    /// the visible selection.
    pub fn anchor_in(&self, region_id: &str) -> Option<usize> {
        match (&self.caret, &self.selection) {
            (Some(c), _) if c.region_id == region_id => Some(c.column),
            (_, Some(s)) if s.region_id == region_id => Some(s.start),
            _ => None,
        }
    }

    pub fn selection_in(&self, region_id: &str) -> Option<(usize, usize)> {
        self.selection.as_ref().filter(|s| s.region_id == region_id).map(|s| (s.start, s.end))
    }

    pub fn is_empty(&self) -> bool {
        self.focus_box.is_none() && self.caret.is_none() && self.selection.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyViolation {
    pub rule: String,
    pub detail: String,
}

impl ConsistencyViolation {
    pub fn new(rule: &str, detail: String) -> ConsistencyViolation {
        ConsistencyViolation { rule: rule.to_string(), detail }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputRecord {
    pub label: String,
    pub value: String,
    pub last_selection: Option<(usize, usize)>,
    pub last_edit_t_ms: Option<u64>,
}

/// Accumulated user-intended values, keyed by input region id.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputHistory {
    pub fields: BTreeMap<String, InputRecord>,
}

impl InputHistory {
    pub fn get(&self, id: &str) -> Option<&InputRecord> {
        self.fields.get(id)
    }

    pub fn value(&self, id: &str) -> &str {
        self.fields.get(id).map(|r| r.value.as_str()).unwrap_or("")
    }

    /// `(label, value)` pairs in region-id order.
    pub fn labelled_values(&self) -> Vec<(String, String)> {
        self.fields.values().map(|r| (r.label.clone(), r.value.clone())).collect()
    }

    /// Copy with every edit timestamp cleared.
    pub fn without_times(&self) -> InputHistory {
        let mut h = self.clone();
        for r in h.fields.values_mut() {
            r.last_edit_t_ms = None;
        }
        h
    }
}
