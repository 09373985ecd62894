use serde::{Deserialize, Serialize};

use super::{InputHistory, PofState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EditKind {
    None,
    LeftInsert,
    AdjacentDelete,
    SelectionDelete,
    Violation,
}

impl EditKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EditKind::None => "none",
            EditKind::LeftInsert => "left_insert",
            EditKind::AdjacentDelete => "adjacent_delete",
            EditKind::SelectionDelete => "selection_delete",
            EditKind::Violation => "violation",
        }
    }

    pub fn accepted(&self) -> bool {
        !matches!(self, EditKind::Violation)
    }
}

/// Outcome of comparing two successive readings of one input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditClass {
    pub kind: EditKind,
    pub region_id: String,
    /// Inserted or deleted text, or the reason for a violation.
    pub payload: String,
}

fn common_prefix(a: &[char], b: &[char]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

fn common_suffix(a: &[char], b: &[char]) -> usize {
    a.iter().rev().zip(b.iter().rev()).take_while(|(x, y)| x == y).count()
}

/// Shape check on character sequences. `anchor` is the caret column in the
/// new reading (or the start of a visible selection); `last_selection` is the
/// range highlighted in an earlier frame. With `relax`, an insertion may end
/// one character right of the caret.
pub fn classify_change(old: &str, new: &str, anchor: Option<usize>, last_selection: Option<(usize, usize)>, relax: bool) -> (EditKind, String) {
    if old == new {
        return (EditKind::None, String::new());
    }
    let Some(c) = anchor else {
        return (EditKind::Violation, "text changed without a caret or selection".into());
    };
    let (o, n): (Vec<char>, Vec<char>) = (old.chars().collect(), new.chars().collect());
    let (pre, suf) = (common_prefix(&o, &n), common_suffix(&o, &n));
    if n.len() > o.len() {
        let k = n.len() - o.len();
        // Insertion points p with n = o[..p] + ins + o[p..].
        let lo = o.len().saturating_sub(suf);
        if let Some(p) = (lo..=pre.min(o.len())).find(|p| p + k == c || (relax && p + k == c + 1)) {
            return (EditKind::LeftInsert, n[p..p + k].iter().collect());
        }
        return (EditKind::Violation, format!("insertion of {k} char(s) not left of caret column {c}"));
    }
    if n.len() < o.len() {
        let k = o.len() - n.len();
        let lo = n.len().saturating_sub(suf);
        let valid = |p: usize| p >= lo && p <= pre.min(n.len());
        if let Some((s, e)) = last_selection {
            if e > s && e - s == k && valid(s) {
                return (EditKind::SelectionDelete, o[s..e].iter().collect());
            }
        }
        if valid(c) {
            return (EditKind::AdjacentDelete, o[c..c + k].iter().collect());
        }
        return (EditKind::Violation, format!("deletion of {k} char(s) not adjacent to caret column {c}"));
    }
    (EditKind::Violation, "characters replaced in place".into())
}

/// Classifies the change of input `region_id` from `old` to `new` given the
/// focus state of the new frame.
pub fn classify_edit(region_id: &str, old: &str, new: &str, pof: &PofState, history: &InputHistory) -> EditClass {
    let last_selection = history.get(region_id).and_then(|r| r.last_selection);
    let (kind, payload) = classify_change(old, new, pof.anchor_in(region_id), last_selection, true);
    EditClass { kind, region_id: region_id.to_string(), payload }
}
