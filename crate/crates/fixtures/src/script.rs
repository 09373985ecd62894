use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use trustview_core::context::Rect;
use trustview_core::font::is_printable;
use trustview_core::input::{InputHistory, InputRecord};
use trustview_core::manifest::HidEvent;

use crate::page::{PageSpec, PageState};

/// Spacing of the keystrokes within one typing or caret-movement action.
pub const KEY_INTERVAL_MS: u64 = 110;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Action {
    /// Click into an input; the caret lands after its last character.
    Focus { input: String },
    Type { text: String },
    /// Inserts all of `text` in one step, driven by a single mouse click.
    Paste { text: String },
    /// Mouse-drag selection of columns `[start, end)` in the focused input.
    Select { start: usize, end: usize },
    /// Backspace.
    Delete,
    DeleteForward,
    MoveCaret { column: usize },
    Click { x: u32, y: u32 },
    Idle { ms: u64 },
}

impl Action {
    /// Time from the action's start to its last event.
    pub fn duration_ms(&self, state: &PageState) -> u64 {
        match self {
            Action::Type { text } => KEY_INTERVAL_MS * (text.chars().count().max(1) as u64 - 1),
            Action::MoveCaret { column } => KEY_INTERVAL_MS * (column.abs_diff(state.caret).max(1) as u64 - 1),
            Action::Idle { ms } => *ms,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimedAction {
    pub t_ms: u64,
    #[serde(flatten)]
    pub action: Action,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionScript {
    /// Values already present when the page first appears.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub prefill: BTreeMap<String, String>,
    pub actions: Vec<TimedAction>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScriptError {
    #[error("action at {t_ms} ms starts before the previous one finished")]
    OutOfOrder { t_ms: u64 },
    #[error("no input named {0:?}")]
    UnknownInput(String),
    #[error("action at {t_ms} ms needs a focused input")]
    NotFocused { t_ms: u64 },
    #[error("selection [{start}, {end}) is outside the value")]
    BadSelection { start: usize, end: usize },
    #[error("caret column {0} is outside the value")]
    BadColumn(usize),
    #[error("character {0:?} cannot be typed")]
    BadChar(char),
    #[error("value of {0:?} would exceed the input's capacity")]
    Overflow(String),
}

/// Visual states over time plus the hardware events that caused them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Simulation {
    pub states: Vec<(u64, PageState)>,
    pub hid: Vec<HidEvent>,
    pub end_t_ms: u64,
    pub final_state: PageState,
}

fn center(r: &Rect) -> (u32, u32) {
    (r.x + r.w / 2, r.y + r.h / 2)
}

struct Sim<'a> {
    spec: &'a PageSpec,
    state: PageState,
    states: Vec<(u64, PageState)>,
    hid: Vec<HidEvent>,
}

impl Sim<'_> {
    fn push(&mut self, t: u64) {
        match self.states.last_mut() {
            Some((lt, s)) if *lt == t => *s = self.state.clone(),
            Some((_, s)) if *s == self.state => {}
            _ => self.states.push((t, self.state.clone())),
        }
    }

    fn focused(&self, t_ms: u64) -> Result<String, ScriptError> {
        self.state.focus.clone().ok_or(ScriptError::NotFocused { t_ms })
    }

    fn value_chars(&self, id: &str) -> Vec<char> {
        self.state.values.get(id).map(|v| v.chars().collect()).unwrap_or_default()
    }

    fn set_value(&mut self, id: &str, chars: &[char]) -> Result<(), ScriptError> {
        if chars.len() > self.spec.capacity(id) {
            return Err(ScriptError::Overflow(id.to_string()));
        }
        self.state.values.insert(id.to_string(), chars.iter().collect());
        Ok(())
    }

    fn focus(&mut self, id: &str) {
        self.state.caret = self.value_chars(id).len();
        self.state.focus = Some(id.to_string());
        self.state.selection = None;
    }

    /// Inserts at the caret, replacing an active selection.
    fn insert(&mut self, t_ms: u64, text: &str) -> Result<(), ScriptError> {
        let id = self.focused(t_ms)?;
        if let Some(c) = text.chars().find(|c| !is_printable(*c) || c.is_whitespace()) {
            return Err(ScriptError::BadChar(c));
        }
        let mut v = self.value_chars(&id);
        if let Some((s, e)) = self.state.selection.take() {
            v.drain(s..e);
            self.state.caret = s;
        }
        let at = self.state.caret;
        v.splice(at..at, text.chars());
        self.set_value(&id, &v)?;
        self.state.caret = at + text.chars().count();
        Ok(())
    }

    fn delete(&mut self, t_ms: u64, forward: bool) -> Result<(), ScriptError> {
        let id = self.focused(t_ms)?;
        let mut v = self.value_chars(&id);
        if let Some((s, e)) = self.state.selection.take() {
            v.drain(s..e);
            self.state.caret = s;
        } else if forward {
            if self.state.caret < v.len() {
                v.remove(self.state.caret);
            }
        } else if self.state.caret > 0 {
            self.state.caret -= 1;
            v.remove(self.state.caret);
        }
        self.set_value(&id, &v)
    }

    fn apply(&mut self, t: u64, action: &Action) -> Result<(), ScriptError> {
        match action {
            Action::Focus { input } => {
                let e = self.spec.inputs().find(|e| e.id == *input).ok_or_else(|| ScriptError::UnknownInput(input.clone()))?;
                let (x, y) = center(&e.rect);
                self.hid.push(HidEvent::mouse_move(t, x, y));
                self.hid.push(HidEvent::click(t, x, y));
                self.focus(input);
                self.push(t);
            }
            Action::Type { text } => {
                for (i, ch) in text.chars().enumerate() {
                    let ti = t + i as u64 * KEY_INTERVAL_MS;
                    self.hid.push(HidEvent::key(ti));
                    self.insert(ti, &ch.to_string())?;
                    self.push(ti);
                }
            }
            Action::Paste { text } => {
                let id = self.focused(t)?;
                let (x, y) = center(&self.spec.element(&id).expect("focused input exists").rect);
                self.hid.push(HidEvent::click(t, x, y));
                self.insert(t, text)?;
                self.push(t);
            }
            Action::Select { start, end } => {
                let id = self.focused(t)?;
                if start >= end || *end > self.value_chars(&id).len() {
                    return Err(ScriptError::BadSelection { start: *start, end: *end });
                }
                let (x, y) = center(&self.spec.element(&id).expect("focused input exists").rect);
                self.hid.push(HidEvent::mouse_move(t, x, y));
                self.hid.push(HidEvent::click(t, x, y));
                self.state.selection = Some((*start, *end));
                self.state.caret = *end;
                self.push(t);
            }
            Action::Delete | Action::DeleteForward => {
                self.hid.push(HidEvent::key(t));
                self.delete(t, matches!(action, Action::DeleteForward))?;
                self.push(t);
            }
            Action::MoveCaret { column } => {
                let id = self.focused(t)?;
                if *column > self.value_chars(&id).len() {
                    return Err(ScriptError::BadColumn(*column));
                }
                let steps = column.abs_diff(self.state.caret).max(1);
                for i in 0..steps {
                    let ti = t + i as u64 * KEY_INTERVAL_MS;
                    self.hid.push(HidEvent::key(ti));
                    self.state.selection = None;
                    if self.state.caret < *column {
                        self.state.caret += 1;
                    } else if self.state.caret > *column {
                        self.state.caret -= 1;
                    }
                    self.push(ti);
                }
            }
            Action::Click { x, y } => {
                self.hid.push(HidEvent::click(t, *x, *y));
                let hit = self.spec.inputs().find(|e| e.rect.contains_point(*x as i64, *y as i64)).map(|e| e.id.clone());
                let on_button = self.spec.button().is_some_and(|b| b.rect.contains_point(*x as i64, *y as i64));
                match hit {
                    Some(id) => self.focus(&id),
                    None if on_button => {}
                    None => {
                        self.state.focus = None;
                        self.state.selection = None;
                    }
                }
                self.push(t);
            }
            Action::Idle { .. } => {}
        }
        Ok(())
    }
}

impl SessionScript {
    /// Appends `action` starting `gap_ms` after the previous action ends.
    pub fn then(&mut self, gap_ms: u64, action: Action) -> &mut SessionScript {
        let t_ms = self.end_hint() + gap_ms;
        self.actions.push(TimedAction { t_ms, action });
        self
    }

    /// End of the last action, counting keystroke runs at their full length.
    fn end_hint(&self) -> u64 {
        self.actions
            .last()
            .map(|a| {
                a.t_ms
                    + match &a.action {
                        Action::Type { text } => KEY_INTERVAL_MS * (text.chars().count().max(1) as u64 - 1),
                        Action::Idle { ms } => *ms,
                        Action::MoveCaret { .. } => KEY_INTERVAL_MS * 24,
                        _ => 0,
                    }
            })
            .unwrap_or(0)
    }

    /// Replays the script over `spec`, starting from an empty form at t = 0.
    pub fn simulate(&self, spec: &PageSpec) -> Result<Simulation, ScriptError> {
        let mut sim = Sim { spec, state: PageState::default(), states: Vec::new(), hid: Vec::new() };
        for e in spec.inputs() {
            sim.state.values.insert(e.id.clone(), String::new());
        }
        for (id, v) in &self.prefill {
            if spec.label_of(id).is_none() {
                return Err(ScriptError::UnknownInput(id.clone()));
            }
            let chars: Vec<char> = v.chars().collect();
            sim.set_value(id, &chars)?;
        }
        sim.push(0);
        let mut busy_until = 0u64;
        let mut end = 0u64;
        for (i, a) in self.actions.iter().enumerate() {
            if i > 0 && a.t_ms <= busy_until {
                return Err(ScriptError::OutOfOrder { t_ms: a.t_ms });
            }
            let dur = a.action.duration_ms(&sim.state);
            sim.apply(a.t_ms, &a.action)?;
            busy_until = a.t_ms + dur;
            end = end.max(busy_until);
        }
        Ok(Simulation { final_state: sim.state.clone(), states: sim.states, hid: sim.hid, end_t_ms: end })
    }
}

/// Expected extraction result: final field strings by direct replay, the
/// visible labels, and the selection still highlighted at the end.
pub fn oracle_extract(spec: &PageSpec, script: &SessionScript) -> Result<InputHistory, ScriptError> {
    let sim = script.simulate(spec)?;
    let st = &sim.final_state;
    let mut h = InputHistory::default();
    for e in spec.inputs() {
        let focused = st.focus.as_deref() == Some(e.id.as_str());
        h.fields.insert(
            e.id.clone(),
            InputRecord {
                label: spec.label_of(&e.id).unwrap_or_default().to_string(),
                value: st.values.get(&e.id).cloned().unwrap_or_default(),
                last_selection: if focused { st.selection } else { None },
                last_edit_t_ms: None,
            },
        );
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::page::Element;

    fn spec() -> PageSpec {
        PageSpec {
            width: 300,
            height: 120,
            elements: vec![
                Element::text("l1", 10, 10, "Amount"),
                Element::input("amount", 90, 10, 150, "Amount", false),
                Element::text("l2", 10, 50, "To"),
                Element::input("to", 90, 50, 150, "To", false),
            ],
        }
    }

    #[test]
    fn typing_emits_one_key_and_one_state_per_char() {
        let mut s = SessionScript::default();
        s.then(200, Action::Focus { input: "amount".into() }).then(300, Action::Type { text: "100".into() });
        let sim = s.simulate(&spec()).unwrap();
        assert_eq!(sim.hid.iter().filter(|e| e.device == trustview_core::manifest::Device::Keyboard).count(), 3);
        assert!(sim.states.len() >= 4);
        assert_eq!(oracle_extract(&spec(), &s).unwrap().value("amount"), "100");
    }

    #[test]
    fn paste_is_one_state_change_and_one_click() {
        let mut s = SessionScript::default();
        s.then(200, Action::Focus { input: "to".into() }).then(700, Action::Paste { text: "user@mail.com".into() });
        let sim = s.simulate(&spec()).unwrap();
        assert_eq!(sim.states.len(), 3);
        assert_eq!(sim.hid.iter().filter(|e| e.is_click()).count(), 2);
        assert_eq!(sim.final_state.values["to"], "user@mail.com");
    }

    #[test]
    fn hand_computed_edits() {
        let mut s = SessionScript::default();
        s.then(100, Action::Focus { input: "to".into() })
            .then(100, Action::Type { text: "hello".into() })
            .then(700, Action::Select { start: 1, end: 4 })
            .then(700, Action::Delete)
            .then(700, Action::Type { text: "XY".into() })
            .then(700, Action::MoveCaret { column: 0 })
            .then(700, Action::DeleteForward);
        assert_eq!(oracle_extract(&spec(), &s).unwrap().value("to"), "XYo");
        let mut s2 = SessionScript::default();
        s2.then(100, Action::Focus { input: "to".into() }).then(100, Action::Type { text: "abc".into() }).then(700, Action::Select { start: 0, end: 2 });
        let h = oracle_extract(&spec(), &s2).unwrap();
        assert_eq!(h.get("to").unwrap().last_selection, Some((0, 2)));
        assert_eq!(h.value("to"), "abc");
    }

    #[test]
    fn empty_script_leaves_fields_empty_and_errors_are_reported() {
        let h = oracle_extract(&spec(), &SessionScript::default()).unwrap();
        assert!(h.fields.values().all(|r| r.value.is_empty()));
        let mut s = SessionScript::default();
        s.then(100, Action::Type { text: "x".into() });
        assert_eq!(s.simulate(&spec()), Err(ScriptError::NotFocused { t_ms: 100 }));
    }
}
