//! Recorded move sequences and their independent replay.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{apply_move, Presentation, TietzeMove};

pub const TRACE_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("malformed trace: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported trace version {0}")]
    Version(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    #[serde(flatten)]
    pub mv: TietzeMove,
    /// Name of the macro this move belongs to, e.g. `corkscrew`.
    #[serde(rename = "macro", default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
    /// Set on the last move of a named stage.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoint: Option<String>,
}

impl TraceStep {
    pub fn new(mv: TietzeMove, tag: &str) -> Self {
        TraceStep {
            mv,
            tag: Some(tag.to_string()),
            checkpoint: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationTrace {
    pub v: u32,
    pub start: Presentation,
    pub moves: Vec<TraceStep>,
    pub end: Presentation,
}

impl DerivationTrace {
    pub fn from_json(text: &str) -> Result<Self, TraceError> {
        let t: DerivationTrace = serde_json::from_str(text)?;
        if t.v != TRACE_SCHEMA_VERSION {
            return Err(TraceError::Version(t.v));
        }
        Ok(t)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StepOutcome {
    pub index: usize,
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReplayReport {
    pub steps: Vec<StepOutcome>,
    pub failed_at: Option<usize>,
    pub end_matches: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub end_difference: Option<String>,
    pub pass: bool,
}

/// Re-applies every move from `start`, stopping at the first violation.
/// Also checks that the abelianization never changes.
pub fn replay_trace(trace: &DerivationTrace) -> ReplayReport {
    let mut steps = Vec::with_capacity(trace.moves.len());
    let mut cur = trace.start.clone();
    let invariants = cur.abelianization();
    let mut failed_at = None;
    for (index, st) in trace.moves.iter().enumerate() {
        let outcome = apply_move(&cur, &st.mv).map_err(|e| e.to_string()).and_then(|next| {
            let inv = next.abelianization();
            if inv == invariants {
                Ok(next)
            } else {
                Err(format!("abelianization changed from {invariants} to {inv}"))
            }
        });
        let ok = outcome.is_ok();
        steps.push(StepOutcome {
            index,
            kind: st.mv.kind(),
            tag: st.tag.clone(),
            ok,
            reason: outcome.as_ref().err().cloned(),
        });
        match outcome {
            Ok(next) => cur = next,
            Err(_) => {
                failed_at = Some(index);
                break;
            }
        }
    }
    let end_difference = match failed_at {
        Some(_) => Some("replay stopped early".to_string()),
        None => cur.difference(&trace.end),
    };
    let end_matches = end_difference.is_none();
    ReplayReport {
        steps,
        failed_at,
        end_matches,
        end_difference,
        pass: failed_at.is_none() && end_matches,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freegroup::Word;

    fn sample() -> DerivationTrace {
        let start = Presentation::parse("gens: a b\nrel r1: a b A B").unwrap();
        let moves = vec![
            TraceStep::new(TietzeMove::rotate("r1", 1), "demo"),
            TraceStep::new(TietzeMove::invert("r1"), "demo"),
        ];
        let end = Presentation::parse("gens: a b\nrel r1: A b a B").unwrap();
        DerivationTrace {
            v: TRACE_SCHEMA_VERSION,
            start,
            moves,
            end,
        }
    }

    #[test]
    fn replay_passes_and_round_trips() {
        let t = sample();
        assert!(replay_trace(&t).pass);
        let back = DerivationTrace::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn replay_reports_first_failure() {
        let mut t = sample();
        t.moves.insert(
            1,
            TraceStep::new(
                TietzeMove::replace("r1", Word::parse("a").unwrap(), Word::parse("b").unwrap(), "r1", false),
                "bad",
            ),
        );
        let r = replay_trace(&t);
        assert!(!r.pass);
        assert_eq!(r.failed_at, Some(1));
        assert!(r.steps[1].reason.is_some());
    }

    #[test]
    fn replay_detects_wrong_end() {
        let mut t = sample();
        t.end = Presentation::parse("gens: a b\nrel r1: a B").unwrap();
        let r = replay_trace(&t);
        assert!(!r.pass && r.failed_at.is_none() && !r.end_matches);
    }

    #[test]
    fn version_is_checked() {
        let mut t = sample();
        t.v = 9;
        assert!(matches!(DerivationTrace::from_json(&t.to_json()), Err(TraceError::Version(9))));
    }
}
