use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{utf8, ManifestError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Device {
    Keyboard,
    Mouse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HidAction {
    Key,
    Click,
    Move,
}

/// One hardware input event. Mouse events carry the pointer position,
/// keyboard events never do.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HidEvent {
    pub t_ms: u64,
    pub device: Device,
    pub action: HidAction,
    pub pos: Option<(u32, u32)>,
}

impl HidEvent {
    pub fn key(t_ms: u64) -> HidEvent {
        HidEvent { t_ms, device: Device::Keyboard, action: HidAction::Key, pos: None }
    }

    pub fn click(t_ms: u64, x: u32, y: u32) -> HidEvent {
        HidEvent { t_ms, device: Device::Mouse, action: HidAction::Click, pos: Some((x, y)) }
    }

    pub fn mouse_move(t_ms: u64, x: u32, y: u32) -> HidEvent {
        HidEvent { t_ms, device: Device::Mouse, action: HidAction::Move, pos: Some((x, y)) }
    }

    pub fn is_click(&self) -> bool {
        self.action == HidAction::Click
    }
}

fn line_err(line: usize, reason: impl Into<String>) -> ManifestError {
    ManifestError::HidLine { line, reason: reason.into() }
}

/// Parses `<t_ms> <keyboard|mouse> <key|click|move> [<x> <y>]` lines.
/// Blank lines are skipped; line numbers in errors are 1-based.
pub fn parse_hid_log(bytes: &[u8]) -> Result<Vec<HidEvent>, ManifestError> {
    let text = utf8(bytes)?;
    let mut events: Vec<HidEvent> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() < 3 {
            return Err(line_err(line, "expected at least three fields"));
        }
        let t_ms: u64 = tokens[0].parse().map_err(|_| line_err(line, format!("bad timestamp {:?}", tokens[0])))?;
        let device = match tokens[1] {
            "keyboard" => Device::Keyboard,
            "mouse" => Device::Mouse,
            other => return Err(line_err(line, format!("unknown device {other:?}"))),
        };
        let action = match tokens[2] {
            "key" => HidAction::Key,
            "click" => HidAction::Click,
            "move" => HidAction::Move,
            other => return Err(line_err(line, format!("unknown action {other:?}"))),
        };
        let pos = match (device, action) {
            (Device::Keyboard, HidAction::Key) => {
                if tokens.len() != 3 {
                    return Err(line_err(line, "keyboard events take no position"));
                }
                None
            }
            (Device::Mouse, HidAction::Click | HidAction::Move) => {
                if tokens.len() != 5 {
                    return Err(line_err(line, "mouse events need x and y"));
                }
                let coord = |s: &str| s.parse::<u32>().map_err(|_| line_err(line, format!("bad coordinate {s:?}")));
                Some((coord(tokens[3])?, coord(tokens[4])?))
            }
            _ => return Err(line_err(line, format!("{} cannot {}", tokens[1], tokens[2]))),
        };
        if events.last().is_some_and(|prev| prev.t_ms > t_ms) {
            return Err(ManifestError::HidOrder { line });
        }
        events.push(HidEvent { t_ms, device, action, pos });
    }
    Ok(events)
}

pub fn serialize_hid_log(events: &[HidEvent]) -> String {
    let mut out = String::new();
    for e in events {
        let device = match e.device {
            Device::Keyboard => "keyboard",
            Device::Mouse => "mouse",
        };
        let action = match e.action {
            HidAction::Key => "key",
            HidAction::Click => "click",
            HidAction::Move => "move",
        };
        let _ = write!(out, "{} {device} {action}", e.t_ms);
        if let Some((x, y)) = e.pos {
            let _ = write!(out, " {x} {y}");
        }
        out.push('\n');
    }
    out
}
