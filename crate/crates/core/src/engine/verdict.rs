use serde::{Deserialize, Serialize};

use crate::input::InputHistory;
use crate::output::{RegionStatus, RegionVerdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    ContentDifference,
    ColorDifference,
    PositionDifference,
    TextMismatch,
    Consistency,
    EditViolation,
    HidViolation,
    PrefilledInput,
    InputUnreadable,
    LabelMissing,
    EndCheck,
    Artifact,
    Truncated,
}

impl Rule {
    pub fn as_str(&self) -> &'static str {
        match self {
            Rule::ContentDifference => "content_difference",
            Rule::ColorDifference => "color_difference",
            Rule::PositionDifference => "position_difference",
            Rule::TextMismatch => "text_mismatch",
            Rule::Consistency => "consistency",
            Rule::EditViolation => "edit_violation",
            Rule::HidViolation => "hid_violation",
            Rule::PrefilledInput => "prefilled_input",
            Rule::InputUnreadable => "input_unreadable",
            Rule::LabelMissing => "label_missing",
            Rule::EndCheck => "end_check",
            Rule::Artifact => "artifact",
            Rule::Truncated => "truncated",
        }
    }

    pub fn from_status(s: RegionStatus) -> Option<Rule> {
        match s {
            RegionStatus::Pass => None,
            RegionStatus::ContentDifference => Some(Rule::ContentDifference),
            RegionStatus::ColorDifference => Some(Rule::ColorDifference),
            RegionStatus::PositionDifference => Some(Rule::PositionDifference),
            RegionStatus::TextMismatch => Some(Rule::TextMismatch),
        }
    }
}

/// One recorded problem. `region_id` is empty for page-level findings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Failure {
    pub t_ms: u64,
    pub region_id: String,
    pub rule: Rule,
    pub detail: String,
}

impl Failure {
    pub fn new(t_ms: u64, region_id: &str, rule: Rule, detail: impl Into<String>) -> Failure {
        Failure { t_ms, region_id: region_id.to_string(), rule, detail: detail.into() }
    }

    /// `None` for passing verdicts.
    pub fn from_region(t_ms: u64, v: &RegionVerdict) -> Option<Failure> {
        Rule::from_status(v.status).map(|rule| Failure::new(t_ms, &v.region_id, rule, v.detail.clone()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictStatus {
    Intended,
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndCheck {
    pub passed: bool,
    pub detail: String,
}

/// Session-level decision. Contains nothing timing-dependent, so two runs
/// over the same artifacts serialize identically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionVerdict {
    pub status: VerdictStatus,
    pub failures: Vec<Failure>,
    pub input_history: InputHistory,
    pub end_check: EndCheck,
    pub frames_validated: usize,
}

impl SessionVerdict {
    pub fn assemble(failures: Vec<Failure>, input_history: InputHistory, end_check: EndCheck, frames_validated: usize) -> SessionVerdict {
        let status = if failures.is_empty() && end_check.passed { VerdictStatus::Intended } else { VerdictStatus::Rejected };
        SessionVerdict { status, failures, input_history, end_check, frames_validated }
    }

    pub fn intended(&self) -> bool {
        self.status == VerdictStatus::Intended
    }

    /// Distinct rule names, in rule order.
    pub fn rules(&self) -> Vec<Rule> {
        let mut r: Vec<Rule> = self.failures.iter().map(|f| f.rule).collect();
        if !self.end_check.passed {
            r.push(Rule::EndCheck);
        }
        r.sort();
        r.dedup();
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdict serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameStat {
    pub t_ms: u64,
    pub latency_ms: f64,
    pub frame_cache_hit: bool,
    pub regions_validated: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheStats {
    pub frame_hits: u64,
    pub frame_misses: u64,
    pub region_hits: u64,
    pub region_misses: u64,
    pub text_hits: u64,
    pub text_misses: u64,
}

impl CacheStats {
    pub fn hit_rate(&self) -> f64 {
        let hits = self.frame_hits + self.region_hits + self.text_hits;
        let total = hits + self.frame_misses + self.region_misses + self.text_misses;
        if total == 0 {
            0.0
        } else {
            hits as f64 / total as f64
        }
    }
}

/// Verdict plus the measurements taken while producing it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionReport {
    pub verdict: SessionVerdict,
    pub setup_ms: f64,
    pub frames: Vec<FrameStat>,
    pub cache: CacheStats,
}

impl SessionReport {
    pub fn first_frame_ms(&self) -> Option<f64> {
        self.frames.first().map(|f| f.latency_ms)
    }

    pub fn mean_subsequent_ms(&self) -> Option<f64> {
        let rest = self.frames.get(1..)?;
        if rest.is_empty() {
            return None;
        }
        Some(rest.iter().map(|f| f.latency_ms).sum::<f64>() / rest.len() as f64)
    }
}
