use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::MetricError;

/// Perception, decision and action weights inside one loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoopWeights {
    pub perception: f64,
    pub decision: f64,
    pub action: f64,
}

impl Default for LoopWeights {
    fn default() -> Self {
        LoopWeights {
            perception: 1.0 / 3.0,
            decision: 1.0 / 3.0,
            action: 1.0 / 3.0,
        }
    }
}

/// Weighted loop score. Absent components get weight 0 and the remaining
/// weights are renormalized.
pub fn loop_score(
    p: Option<f64>,
    d: Option<f64>,
    a: Option<f64>,
    w: &LoopWeights,
) -> Result<f64, MetricError> {
    let parts = [(p, w.perception), (d, w.decision), (a, w.action)];
    if parts.iter().any(|&(_, wt)| !(wt >= 0.0)) {
        return Err(MetricError::BadWeights);
    }
    let total: f64 = parts.iter().filter(|(s, _)| s.is_some()).map(|(_, wt)| wt).sum();
    if parts.iter().all(|(s, _)| s.is_none()) {
        return Err(MetricError::NoComponents);
    }
    if !(total > 0.0) {
        return Err(MetricError::BadWeights);
    }
    Ok(parts
        .iter()
        .filter_map(|&(s, wt)| s.map(|s| s * wt / total))
        .sum())
}

pub fn uniform_weights(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

fn weighted(scores: &[f64], weights: &[f64]) -> Result<f64, MetricError> {
    if scores.is_empty() {
        return Err(MetricError::Empty);
    }
    if scores.len() != weights.len() {
        return Err(MetricError::LengthMismatch);
    }
    let sum: f64 = weights.iter().sum();
    if weights.iter().any(|&w| !(w >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
        return Err(MetricError::BadWeights);
    }
    Ok(scores.iter().zip(weights).map(|(s, w)| s * w).sum())
}

/// Capability score over loops, e.g. perception across all loops.
pub fn capability_score(per_loop: &[f64], weights: &[f64]) -> Result<f64, MetricError> {
    weighted(per_loop, weights)
}

/// Task score as a weighted sum of loop scores.
pub fn task_score(loop_scores: &[f64], weights: &[f64]) -> Result<f64, MetricError> {
    weighted(loop_scores, weights)
}
