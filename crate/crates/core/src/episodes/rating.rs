use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{ActionOutcome, EpisodeLog, StepView, Transcript};
use crate::math;
use crate::metrics::{
    composite, decision_score, mean, perception_score, tracking_composite, EfficiencyParams,
    MetricError, RatingSheet, ScoreReport, StageMarks,
};
use crate::protocol::{to_command, AgentCommand, ParamValue};
use crate::tasks::{
    fire_in_cone, oracle_command, StepCommand, TaskKind, TaskRuntime, ToolAction,
};
use crate::world::{observe, visible_in_any_camera, Camera, MotionAction, World};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RatingError {
    #[error("the episode has not terminated")]
    NotTerminal,
    #[error("draft sheets cannot be used")]
    Draft,
    #[error("no sheets given")]
    Empty,
    #[error("sheets rate different stages")]
    ShapeMismatch,
    #[error("marks must be 0 or 100")]
    BadMark,
    #[error("every target is already rated")]
    Finished,
    #[error("`{0}` has no perception process")]
    NoPerception(String),
}

/// One unit a rater marks: a stage, or a turn in tracking runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingTarget {
    pub stage: usize,
    pub name: String,
    pub has_perception: bool,
    /// Interaction ticks attributed to this target.
    pub ticks: Vec<u64>,
    /// The stage finished successfully.
    pub completed: bool,
}

fn has_perception(kind: TaskKind, stage: usize) -> bool {
    kind == TaskKind::Tracking || stage > 0
}

/// Rating units in log order, attributed through the stage records (or,
/// for tracking, a window of `lose_tolerance` ticks from each turn).
pub fn rating_targets(t: &Transcript) -> Result<Vec<RatingTarget>, RatingError> {
    let footer = t.footer.as_ref().ok_or(RatingError::NotTerminal)?;
    let spec = &t.header.task;
    if spec.kind == TaskKind::Tracking {
        let window = u64::from(spec.goal_params.lose_tolerance.max(1));
        return Ok(footer
            .turns
            .iter()
            .map(|turn| RatingTarget {
                stage: turn.index,
                name: format!("Turn {}", turn.index + 1),
                has_perception: true,
                ticks: t
                    .steps
                    .iter()
                    .filter(|s| (turn.tick..turn.tick + window).contains(&s.event.world_tick))
                    .map(|s| s.event.tick)
                    .collect(),
                completed: true,
            })
            .collect());
    }
    Ok(footer
        .records
        .iter()
        .map(|r| RatingTarget {
            stage: r.stage,
            name: r.name.clone(),
            has_perception: has_perception(spec.kind, r.stage),
            ticks: t
                .steps
                .iter()
                .filter(|s| s.event.stage == r.stage)
                .map(|s| s.event.tick)
                .collect(),
            completed: r.completed,
        })
        .collect())
}

fn words(s: &str) -> Vec<String> {
    s.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(|w| w.to_lowercase())
        .collect()
}

fn mentions(text: &[String], phrase: &str) -> bool {
    let p = words(phrase);
    !p.is_empty() && text.len() >= p.len() && text.windows(p.len()).any(|w| w == p.as_slice())
}

/// Whether the reply's analysis or params name the target.
fn names_target(step: &StepView, rt: &TaskRuntime, world: &World) -> bool {
    let Some(a) = &step.event.action else {
        return false;
    };
    let gp = &rt.spec.goal_params;
    let mut text = a.analysis.clone();
    for v in a.params.values() {
        if let ParamValue::Text(t) = v {
            text.push(' ');
            text.push_str(t);
        }
    }
    let ws = words(&text);
    let mut forms: Vec<String> = Vec::new();
    forms.push(gp.target_id.clone());
    if let Some(e) = world.entity(&gp.target_id) {
        forms.push(e.class.noun().into());
    }
    if let Some(s) = gp.synonyms.get(&gp.target_id) {
        forms.extend(s.iter().cloned());
    }
    forms.iter().any(|f| mentions(&ws, f))
}

fn perceived(step: &StepView) -> bool {
    let rt = &step.runtime_before;
    let id = &rt.spec.goal_params.target_id;
    // the view answered, or the one the action revealed
    let in_view = observe(&step.before).contains(id) || observe(&step.after).contains(id);
    in_view && names_target(step, rt, &step.before)
}

fn horizontal(world: &World, p: (f64, f64)) -> f64 {
    world.uav.horizontal_distance(p.0, p.1)
}

fn target_xy(world: &World, id: &str) -> Option<(f64, f64)> {
    world.entity(id).map(|e| (e.position.x, e.position.y))
}

fn off_axis(world: &World, p: (f64, f64)) -> f64 {
    let b = math::bearing_deg(p.0 - world.uav.x, p.1 - world.uav.y);
    math::heading_delta(world.uav.yaw, b)
}

const EPS: f64 = 1e-6;

/// The stage oracle's admissible set: its own move, any move that closes
/// on the stage goal, or the stage-correct tool or camera operation.
fn admissible(step: &StepView) -> bool {
    let ActionOutcome::Accepted { .. } = step.event.outcome else {
        return false;
    };
    let Some(a) = &step.event.action else {
        return false;
    };
    let (rt, before, after) = (&step.runtime_before, &step.before, &step.after);
    let Ok(AgentCommand::Step(cmd)) = to_command(a, before.active_camera) else {
        return false;
    };
    if cmd == oracle_command(rt, before) {
        return true;
    }
    let gp = &rt.spec.goal_params;
    let target = target_xy(before, &gp.target_id).unwrap_or((before.uav.x, before.uav.y));
    let closes = |p: (f64, f64)| horizontal(after, p) < horizontal(before, p) - EPS;
    let turning = matches!(
        cmd,
        StepCommand::Motion(MotionAction::TurnLeft | MotionAction::TurnRight)
    );
    match (rt.spec.kind, rt.current_stage) {
        (TaskKind::CargoDelivery, 0) => gp
            .anchor_id
            .as_deref()
            .and_then(|id| target_xy(before, id))
            .is_some_and(closes),
        (TaskKind::Firefighting, 0) => gp
            .anchor_id
            .as_deref()
            .and_then(|id| target_xy(before, id))
            .is_some_and(|b| {
                let az = gp.exposed_azimuth;
                let d = gp.approach_standoff;
                closes((b.0 + d * math::sin_deg(az), b.1 + d * math::cos_deg(az)))
            }),
        (TaskKind::CargoDelivery | TaskKind::Firefighting, 1) => {
            (turning && !observe(before).contains(&gp.target_id)) || closes(target)
        }
        (TaskKind::CargoDelivery, _) => match cmd {
            StepCommand::Tool {
                tool: ToolAction::ReleaseCargo,
            } => horizontal(before, target) <= gp.delivery_radius,
            StepCommand::Motion(MotionAction::SwitchCamera {
                view: Camera::Bottom,
                ..
            }) => true,
            _ => closes(target),
        },
        (TaskKind::Firefighting, _) => match cmd {
            StepCommand::Tool {
                tool: ToolAction::SprayerOn,
            } => fire_in_cone(before, gp) || !rt.sprayer_on,
            StepCommand::Tool { .. } => false,
            _ => {
                let fire = before.entity(&gp.target_id);
                let range = fire.map_or(0.0, |f| f.position.sub(before.uav.position()).norm());
                off_axis(after, target) < off_axis(before, target) - EPS
                    || (range > gp.spray.range_m && closes(target))
            }
        },
        (TaskKind::Tracking, _) => visible_in_any_camera(after, &gp.target_id),
    }
}

/// Oracle surrogate for a human rater.
pub fn auto_rate(t: &Transcript) -> Result<RatingSheet, RatingError> {
    let targets = rating_targets(t)?;
    let entries = targets
        .iter()
        .map(|target| {
            let steps: Vec<&StepView> = t
                .steps
                .iter()
                .filter(|s| target.ticks.contains(&s.event.tick))
                .collect();
            let mark = |ok: bool| if ok { 100.0 } else { 0.0 };
            let (perception, decision) = if steps.is_empty() {
                // a stage passed through without interactions
                let m = mark(target.completed);
                (target.has_perception.then_some(m), Some(m))
            } else {
                (
                    target
                        .has_perception
                        .then(|| mark(steps.iter().any(|s| perceived(s)))),
                    Some(mark(steps.iter().all(|s| admissible(s)))),
                )
            };
            StageMarks {
                stage: target.stage,
                name: target.name.clone(),
                perception,
                decision,
            }
        })
        .collect();
    Ok(RatingSheet {
        raters: alloc::vec!["auto".into()],
        draft: false,
        entries,
    })
}

/// Step-through rating state; IO is the caller's concern.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingSession {
    pub rater: String,
    pub targets: Vec<RatingTarget>,
    marks: Vec<StageMarks>,
}

impl RatingSession {
    pub fn new(t: &Transcript, rater: &str) -> Result<Self, RatingError> {
        Ok(RatingSession {
            rater: rater.into(),
            targets: rating_targets(t)?,
            marks: Vec::new(),
        })
    }

    pub fn current(&self) -> Option<&RatingTarget> {
        self.targets.get(self.marks.len())
    }

    pub fn record(&mut self, perception: Option<bool>, decision: bool) -> Result<(), RatingError> {
        let target = self.current().ok_or(RatingError::Finished)?;
        if perception.is_some() && !target.has_perception {
            return Err(RatingError::NoPerception(target.name.clone()));
        }
        let mark = |b: bool| if b { 100.0 } else { 0.0 };
        let marks = StageMarks {
            stage: target.stage,
            name: target.name.clone(),
            perception: if target.has_perception {
                Some(mark(perception.unwrap_or(false)))
            } else {
                None
            },
            decision: Some(mark(decision)),
        };
        self.marks.push(marks);
        Ok(())
    }

    pub fn is_complete(&self) -> bool {
        self.marks.len() == self.targets.len()
    }

    /// The sheet so far; unfinished sessions come back as drafts.
    pub fn finish(self) -> RatingSheet {
        RatingSheet {
            raters: alloc::vec![self.rater.clone()],
            draft: !self.is_complete(),
            entries: self.marks,
        }
    }
}

/// Per-stage mean over raters. Independent of sheet order.
pub fn aggregate_ratings(sheets: &[RatingSheet]) -> Result<RatingSheet, RatingError> {
    let first = sheets.first().ok_or(RatingError::Empty)?;
    let shape = |s: &RatingSheet| -> Vec<(usize, String, bool, bool)> {
        s.entries
            .iter()
            .map(|e| (e.stage, e.name.clone(), e.perception.is_some(), e.decision.is_some()))
            .collect()
    };
    let want = shape(first);
    for s in sheets {
        if s.draft {
            return Err(RatingError::Draft);
        }
        if shape(s) != want {
            return Err(RatingError::ShapeMismatch);
        }
    }
    let column = |i: usize, pick: fn(&StageMarks) -> Option<f64>| -> Option<f64> {
        let v: Vec<f64> = sheets.iter().filter_map(|s| pick(&s.entries[i])).collect();
        mean(&v)
    };
    let entries = first
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| StageMarks {
            stage: e.stage,
            name: e.name.clone(),
            perception: column(i, |m| m.perception),
            decision: column(i, |m| m.decision),
        })
        .collect();
    let raters: BTreeSet<String> = sheets.iter().flat_map(|s| s.raters.iter().cloned()).collect();
    Ok(RatingSheet {
        raters: raters.into_iter().collect(),
        draft: false,
        entries,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub spec_hash: String,
    pub seed: u64,
    pub raters: Vec<String>,
    pub log_format: String,
}

/// Score report file contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreFile {
    pub task: TaskKind,
    pub score_per: f64,
    pub score_dec: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<ScoreReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tracking_composite: Option<f64>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScoreError {
    #[error(transparent)]
    Rating(#[from] RatingError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Combines a sealed log with a rating sheet. `params` defaults to the
/// stock efficiency constants with the task's own step limit.
pub fn score_episode(
    log: &EpisodeLog,
    sheet: &RatingSheet,
    params: Option<EfficiencyParams>,
) -> Result<ScoreFile, ScoreError> {
    let footer = log.footer.as_ref().ok_or(RatingError::NotTerminal)?;
    if sheet.draft {
        return Err(RatingError::Draft.into());
    }
    sheet.entries.iter().try_for_each(|e| {
        [e.perception, e.decision]
            .into_iter()
            .flatten()
            .all(|m| (0.0..=100.0).contains(&m))
            .then_some(())
            .ok_or(RatingError::BadMark)
    })?;
    let spec = &log.header.task;
    let per = perception_score(sheet);
    let dec = decision_score(sheet);
    let (report, tracking) = if spec.kind == TaskKind::Tracking {
        (None, Some(tracking_composite(per, dec)))
    } else {
        let p = params.unwrap_or_else(|| EfficiencyParams::with_step_limit(f64::from(spec.step_limit())));
        (Some(composite(per, dec, f64::from(footer.step_task), &p)?), None)
    };
    Ok(ScoreFile {
        task: spec.kind,
        score_per: per,
        score_dec: dec,
        report,
        tracking_composite: tracking,
        provenance: Provenance {
            spec_hash: log.header.spec_hash.clone(),
            seed: log.header.seed,
            raters: sheet.raters.clone(),
            log_format: log.header.format.to_string(),
        },
    })
}
