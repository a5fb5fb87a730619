use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize, Serializer};

use super::{mean, round1, MetricError};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyParams {
    pub alpha: f64,
    /// Efficiency factor applied at or beyond the step limit.
    pub b: f64,
    pub step_limit: f64,
}

impl EfficiencyParams {
    pub const DEFAULT_ALPHA: f64 = 1.1;
    pub const DEFAULT_B: f64 = 0.5;

    pub fn with_step_limit(step_limit: f64) -> Self {
        EfficiencyParams {
            alpha: Self::DEFAULT_ALPHA,
            b: Self::DEFAULT_B,
            step_limit,
        }
    }

    pub fn validate(&self) -> Result<(), MetricError> {
        if !(self.alpha > 0.0) {
            return Err(MetricError::InvalidParams("alpha must be positive"));
        }
        if !(self.b > 0.0 && self.b < 1.0) {
            return Err(MetricError::InvalidParams("b must lie in (0, 1)"));
        }
        if !(self.step_limit >= 1.0) {
            return Err(MetricError::InvalidParams("step limit must be at least 1"));
        }
        Ok(())
    }
}

/// Exponential efficiency bonus below the step limit, the flat factor `b` from it on.
pub fn efficiency_factor(step_task: f64, p: &EfficiencyParams) -> Result<f64, MetricError> {
    p.validate()?;
    if !(step_task >= 1.0) || !step_task.is_finite() {
        return Err(MetricError::OutOfRange("step_task must be >= 1"));
    }
    Ok(if step_task < p.step_limit {
        math::exp(-p.alpha * (step_task - p.step_limit) / p.step_limit)
    } else {
        p.b
    })
}

fn one_decimal<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round1(*x))
}

/// Full-precision internally; score fields serialize rounded to one decimal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    #[serde(serialize_with = "one_decimal")]
    pub score_per: f64,
    #[serde(serialize_with = "one_decimal")]
    pub score_dec: f64,
    pub step_task: f64,
    pub beta: f64,
    #[serde(serialize_with = "one_decimal")]
    pub score_com: f64,
    #[serde(serialize_with = "one_decimal")]
    pub score_com_max: f64,
    #[serde(serialize_with = "one_decimal")]
    pub score_norm: f64,
}

fn check_score(x: f64) -> Result<(), MetricError> {
    if (0.0..=100.0).contains(&x) {
        Ok(())
    } else {
        Err(MetricError::OutOfRange("scores must lie in [0, 100]"))
    }
}

pub fn composite(
    score_per: f64,
    score_dec: f64,
    step_task: f64,
    p: &EfficiencyParams,
) -> Result<ScoreReport, MetricError> {
    check_score(score_per)?;
    check_score(score_dec)?;
    let beta = efficiency_factor(step_task, p)?;
    let score_com = beta * (score_per + score_dec);
    let score_com_max = efficiency_factor(1.0, p)? * 200.0;
    Ok(ScoreReport {
        score_per,
        score_dec,
        step_task,
        beta,
        score_com,
        score_com_max,
        score_norm: 100.0 * score_com / score_com_max,
    })
}

/// Tracking missions have no step term: the mean of the two scores.
pub fn tracking_composite(score_per: f64, score_dec: f64) -> f64 {
    (score_per + score_dec) / 2.0
}

/// Marks for one stage (or one tracking turn). `None` means the stage has
/// no such process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageMarks {
    pub stage: usize,
    pub name: String,
    pub perception: Option<f64>,
    pub decision: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RatingSheet {
    /// Sorted rater ids that contributed.
    pub raters: Vec<String>,
    /// Unfinished sessions are saved as drafts and never scored.
    #[serde(default)]
    pub draft: bool,
    pub entries: Vec<StageMarks>,
}

impl RatingSheet {
    /// A single rater's sheet only carries 0 or 100 marks.
    pub fn validate_marks(&self) -> Result<(), MetricError> {
        for e in &self.entries {
            for m in [e.perception, e.decision].into_iter().flatten() {
                if m != 0.0 && m != 100.0 {
                    return Err(MetricError::OutOfRange("rater marks must be 0 or 100"));
                }
            }
        }
        Ok(())
    }
}

fn component_score(sheet: &RatingSheet, pick: fn(&StageMarks) -> Option<f64>) -> f64 {
    let marks: Vec<f64> = sheet.entries.iter().filter_map(pick).collect();
    // stages without the process default to 100 when nothing is rated at all
    mean(&marks).unwrap_or(100.0)
}

/// Mean perception mark over the stages that have a perception process.
pub fn perception_score(sheet: &RatingSheet) -> f64 {
    component_score(sheet, |e| e.perception)
}

/// Mean decision mark over the stages that have a decision process.
pub fn decision_score(sheet: &RatingSheet) -> f64 {
    component_score(sheet, |e| e.decision)
}
