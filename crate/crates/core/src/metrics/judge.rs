use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// One tagged fact a free-text answer is expected to state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RubricField {
    /// e.g. `class`, `color`, `size`, `function`, or a motion component.
    pub tag: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Rubric {
    pub fields: Vec<RubricField>,
    /// Fields must be mentioned in this order to count.
    #[serde(default)]
    pub ordered: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct JudgeRequest<'a> {
    pub prompt: &'a str,
    pub image: Option<&'a [u8]>,
    pub reference: &'a str,
    pub candidate: &'a str,
    pub rubric: Option<&'a Rubric>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum JudgeError {
    /// Retriable: the judge could not be reached.
    #[error("judge transport failure: {0}")]
    Transport(String),
    #[error("judge returned an unusable reply: {0}")]
    Malformed(String),
    #[error("judge failed after {attempts} attempts: {last}")]
    Exhausted { attempts: u32, last: String },
}

/// Scores a free-text answer against a reference on a 0..=10 scale.
pub trait Judge {
    fn score(&mut self, req: &JudgeRequest<'_>) -> Result<f64, JudgeError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JudgeScore {
    pub score: f64,
    /// The raw score fell outside 0..=10 and was clamped.
    pub clamped: bool,
    pub attempts: u32,
}

/// Calls `judge` with up to `max_attempts` tries on transport failures and
/// clamps the result into 0..=10. Never invents a score.
pub fn judge_score(
    judge: &mut dyn Judge,
    req: &JudgeRequest<'_>,
    max_attempts: u32,
) -> Result<JudgeScore, JudgeError> {
    let max_attempts = max_attempts.max(1);
    let mut last = String::new();
    for attempt in 1..=max_attempts {
        match judge.score(req) {
            Ok(raw) if raw.is_finite() => {
                let score = raw.clamp(0.0, 10.0);
                return Ok(JudgeScore {
                    score,
                    clamped: score != raw,
                    attempts: attempt,
                });
            }
            Ok(raw) => return Err(JudgeError::Malformed(alloc::format!("score {raw}"))),
            Err(JudgeError::Transport(msg)) => last = msg,
            Err(e) => return Err(e),
        }
    }
    Err(JudgeError::Exhausted {
        attempts: max_attempts,
        last,
    })
}

fn words(s: &str) -> Vec<String> {
    s.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(|w| w.to_lowercase())
        .collect()
}

fn find_phrase(hay: &[String], needle: &[String], from: usize) -> Option<usize> {
    if needle.is_empty() || hay.len() < needle.len() {
        return None;
    }
    (from..=hay.len() - needle.len()).find(|&i| hay[i..i + needle.len()] == *needle)
}

/// Deterministic offline judge: the fraction of rubric fields the candidate
/// mentions, times ten. Without a rubric it checks word-level equality.
#[derive(Debug, Clone, Copy, Default)]
pub struct StubJudge;

impl Judge for StubJudge {
    fn score(&mut self, req: &JudgeRequest<'_>) -> Result<f64, JudgeError> {
        let cand = words(req.candidate);
        let Some(rubric) = req.rubric.filter(|r| !r.fields.is_empty()) else {
            return Ok(if cand == words(req.reference) { 10.0 } else { 0.0 });
        };
        let mut hits = 0usize;
        let mut cursor = 0usize;
        for f in &rubric.fields {
            let needle = words(&f.value);
            let start = if rubric.ordered { cursor } else { 0 };
            if let Some(at) = find_phrase(&cand, &needle, start) {
                hits += 1;
                if rubric.ordered {
                    cursor = at + needle.len();
                }
            }
        }
        Ok(10.0 * hits as f64 / rubric.fields.len() as f64)
    }
}
