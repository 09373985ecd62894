use serde::{Deserialize, Serialize};
use thiserror::Error;
use trustview_core::context::Rect;
use trustview_core::font::is_printable;
use trustview_core::input::HID_WINDOW_MS;
use trustview_core::manifest::Request;

use crate::page::{Accent, ElementKind, Pattern};
use crate::session::{Popup, SyntheticSession};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum HostTamper {
    /// Character `index` of the final value is never drawn.
    Suppress { input: String, index: usize },
    /// `ch` appears at the end of the value with no input event behind it.
    NoHid { input: String, t_ms: u64, ch: char },
    /// `ch` is appended to an input that does not hold the focus.
    NonPofEdit { input: String, t_ms: u64, ch: char },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum AttackSpec {
    MinTamper { region: String, index: usize, replacement: char },
    ContextHide { keep: String },
    HostTamper { tamper: HostTamper },
    Temporal { t0_ms: u64, t1_ms: u64, rect: Rect, caption: String },
}

impl AttackSpec {
    pub fn name(&self) -> &'static str {
        match self {
            AttackSpec::MinTamper { .. } => "min-tamper",
            AttackSpec::ContextHide { .. } => "context-hide",
            AttackSpec::HostTamper { .. } => "host-tamper",
            AttackSpec::Temporal { .. } => "temporal",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AttackError {
    #[error("no suitable element {0:?}")]
    UnknownTarget(String),
    #[error("invalid attack parameter: {0}")]
    BadParameter(String),
}

fn bad(msg: impl Into<String>) -> AttackError {
    AttackError::BadParameter(msg.into())
}

/// Replacement text of the same length that shares no character with `s`.
pub fn disguise(s: &str) -> String {
    s.chars()
        .map(|c| match c {
            'a'..='y' | 'A'..='Y' | '0'..='8' => (c as u8 + 1) as char,
            'z' => 'a',
            'Z' => 'A',
            '9' => '0',
            _ => c,
        })
        .collect()
}

fn disguise_pattern(p: &Pattern) -> Pattern {
    let flip = |rgb: [u8; 3]| [255 - rgb[0], 255 - rgb[1], 255 - rgb[2]];
    Pattern {
        base: flip(p.base),
        accents: p.accents.iter().map(|a| Accent { rect: a.rect, rgb: flip(a.rgb) }).collect(),
    }
}

/// Appends `ch` to `input` from `t_ms` on, in every later state.
fn inject_char(s: &mut SyntheticSession, input: &str, t_ms: u64, ch: char, need_focus: bool) -> Result<(), AttackError> {
    if !is_printable(ch) || ch.is_whitespace() {
        return Err(bad(format!("character {ch:?}")));
    }
    if s.spec.label_of(input).is_none() {
        return Err(AttackError::UnknownTarget(input.into()));
    }
    if !(s.start_t_ms < t_ms && t_ms < s.end_t_ms) {
        return Err(bad(format!("injection time {t_ms} outside the session")));
    }
    let lo = t_ms.saturating_sub(HID_WINDOW_MS);
    if s.hid.iter().any(|e| e.t_ms > lo && e.t_ms <= t_ms) {
        return Err(bad(format!("input events within {HID_WINDOW_MS} ms before {t_ms}")));
    }
    let i = s.states.partition_point(|(t, _)| *t <= t_ms);
    let mut base = s.states[i - 1].1.clone();
    let focused = base.focus.as_deref() == Some(input);
    if focused != need_focus {
        return Err(bad(format!("input {input:?} focus is {focused} at {t_ms}")));
    }
    if s.states[i..].iter().any(|(_, st)| st.values.get(input) != base.values.get(input)) {
        return Err(bad(format!("input {input:?} is edited after {t_ms}")));
    }
    let cap = s.spec.capacity(input);
    let step = |st: &mut crate::page::PageState| -> Result<(), AttackError> {
        let v = st.values.entry(input.to_string()).or_default();
        let len = v.chars().count();
        if len + 1 > cap {
            return Err(bad("value would overflow the input"));
        }
        v.push(ch);
        if st.focus.as_deref() == Some(input) && st.caret == len && st.selection.is_none() {
            st.caret += 1;
        }
        Ok(())
    };
    step(&mut base)?;
    for (_, st) in s.states[i..].iter_mut() {
        step(st)?;
    }
    s.states.insert(i, (t_ms, base));
    let label = s.spec.label_of(input).expect("checked above");
    let pairs = s.request.pairs.iter().map(|(l, v)| if l == label { (l.clone(), format!("{v}{ch}")) } else { (l.clone(), v.clone()) }).collect();
    s.request = Request::new(pairs).map_err(|e| bad(e.to_string()))?;
    Ok(())
}

/// Derives the tampered session. The user's intended inputs in the ground
/// truth are left alone; the session is marked as one that must not pass.
pub fn inject_attack(session: &SyntheticSession, attack: &AttackSpec) -> Result<SyntheticSession, AttackError> {
    let mut s = session.clone();
    match attack {
        AttackSpec::MinTamper { region, index, replacement } => {
            let e = s.local_spec.elements.iter_mut().find(|e| e.id == *region).ok_or_else(|| AttackError::UnknownTarget(region.clone()))?;
            let ElementKind::Text { content } = &mut e.kind else { return Err(AttackError::UnknownTarget(region.clone())) };
            let mut chars: Vec<char> = content.chars().collect();
            let old = *chars.get(*index).ok_or_else(|| bad(format!("index {index} past the text")))?;
            if old == *replacement || old == ' ' || *replacement == ' ' || !is_printable(*replacement) {
                return Err(bad(format!("replacing {old:?} with {replacement:?}")));
            }
            chars[*index] = *replacement;
            *content = chars.into_iter().collect();
        }
        AttackSpec::ContextHide { keep } => {
            if s.local_spec.element(keep).is_none() {
                return Err(AttackError::UnknownTarget(keep.clone()));
            }
            let mut changed = 0;
            for e in s.local_spec.elements.iter_mut().filter(|e| e.id != *keep) {
                match &mut e.kind {
                    ElementKind::Text { content } => *content = disguise(content),
                    ElementKind::Image { pattern } => *pattern = disguise_pattern(pattern),
                    _ => continue,
                }
                changed += 1;
            }
            if changed == 0 {
                return Err(bad("nothing left to hide"));
            }
        }
        AttackSpec::HostTamper { tamper } => match tamper {
            HostTamper::Suppress { input, index } => {
                let v = s.truth.history.value(input).chars().count();
                if s.spec.label_of(input).is_none() || *index >= v {
                    return Err(bad(format!("no character {index} in {input:?}")));
                }
                s.render.suppress = Some((input.clone(), *index));
            }
            HostTamper::NoHid { input, t_ms, ch } => inject_char(&mut s, input, *t_ms, *ch, true)?,
            HostTamper::NonPofEdit { input, t_ms, ch } => inject_char(&mut s, input, *t_ms, *ch, false)?,
        },
        AttackSpec::Temporal { t0_ms, t1_ms, rect, caption } => {
            if t0_ms >= t1_ms || *t0_ms < s.start_t_ms || *t1_ms > s.end_t_ms || !rect.within(s.spec.width, s.spec.height) {
                return Err(bad(format!("popup window [{t0_ms}, {t1_ms})")));
            }
            s.popups.push(Popup { t0_ms: *t0_ms, t1_ms: *t1_ms, rect: *rect, rgb: [250, 235, 120], caption: caption.clone() });
        }
    }
    s.scenario = attack.name().into();
    s.truth.intended = false;
    s.attack = Some(attack.clone());
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disguise_changes_every_alphanumeric() {
        let d = disguise("Acct 4519-z9");
        assert_eq!(d, "Bddu 5620-a0");
        assert!(d.chars().zip("Acct 4519-z9".chars()).all(|(a, b)| a != b || !b.is_alphanumeric()));
    }
}
