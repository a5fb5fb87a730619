//! Scoring engine: static question metrics, the judge interface, composable
//! loop/capability/task aggregation and the dynamic composite score.

mod composable;
mod dynamic;
mod judge;
mod statics;

pub use composable::{capability_score, loop_score, task_score, uniform_weights, LoopWeights};
pub use dynamic::{
    composite, decision_score, efficiency_factor, perception_score, tracking_composite,
    EfficiencyParams, RatingSheet, ScoreReport, StageMarks,
};
pub use judge::{
    judge_score, Judge, JudgeError, JudgeRequest, JudgeScore, Rubric, RubricField, StubJudge,
};
pub use statics::{score_accuracy, score_completeness, score_reldis};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricError {
    #[error("input list is empty")]
    Empty,
    #[error("clock hour {0} outside 1..=12")]
    InvalidHour(u8),
    #[error("weights must be non-negative and sum to 1")]
    BadWeights,
    #[error("scores and weights differ in length")]
    LengthMismatch,
    #[error("loop has no scored component")]
    NoComponents,
    #[error("invalid efficiency parameters: {0}")]
    InvalidParams(&'static str),
    #[error("value out of range: {0}")]
    OutOfRange(&'static str),
}

/// One-decimal rounding used when reports are serialized.
pub fn round1(x: f64) -> f64 {
    crate::math::round(x * 10.0) / 10.0
}

pub(crate) fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    // sorted summation keeps means independent of input order
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    Some(v.iter().sum::<f64>() / v.len() as f64)
}
