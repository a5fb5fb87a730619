use alloc::collections::BTreeSet;

use super::MetricError;
use crate::world::ClockHour;

/// Percentage of correct items.
pub fn score_accuracy(outcomes: &[bool]) -> Result<f64, MetricError> {
    if outcomes.is_empty() {
        return Err(MetricError::Empty);
    }
    let hits = outcomes.iter().filter(|&&b| b).count();
    Ok(100.0 * hits as f64 / outcomes.len() as f64)
}

/// Intersection over union of reference and predicted region sets.
pub fn score_completeness(
    reference: &BTreeSet<u32>,
    predicted: &BTreeSet<u32>,
) -> Result<f64, MetricError> {
    if reference.is_empty() {
        return Err(MetricError::Empty);
    }
    let inter = reference.intersection(predicted).count();
    let union = reference.union(predicted).count();
    Ok(inter as f64 / union as f64)
}

/// Circular clock-hour agreement in [0, 1].
pub fn score_reldis(t1: ClockHour, t2: ClockHour) -> Result<f64, MetricError> {
    for t in [t1, t2] {
        if !(1..=12).contains(&t) {
            return Err(MetricError::InvalidHour(t));
        }
    }
    let d = t1.abs_diff(t2);
    let d = d.min(12 - d);
    Ok(1.0 - f64::from(d) / 6.0)
}
