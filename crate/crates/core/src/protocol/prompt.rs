use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use super::actions::{action_spec, ActionSpec};
use super::{WireError, WireErrorCode};
use crate::tasks::{TaskError, TaskKind, TaskMode, TaskRuntime};
use crate::world::{Camera, World};

/// Bumped whenever the rendered prompt text changes.
pub const TEMPLATE_VERSION: &str = "dronebench-prompt/1";

pub fn camera_phrase(c: Camera) -> &'static str {
    match c {
        Camera::Front => "FORWARD-LOOKING",
        Camera::Rear => "BACKWARD-LOOKING",
        Camera::Left => "LEFT-LOOKING",
        Camera::Right => "RIGHT-LOOKING",
        Camera::Bottom => "DOWNWARD-LOOKING",
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PromptContext {
    pub camera: Camera,
    pub position: (f64, f64),
    pub objective: String,
    /// Current subtask in step-by-step runs.
    pub subtask: Option<String>,
    /// Named coordinates listed as known task information.
    pub known: Vec<(String, (f64, f64))>,
    /// Further named coordinates offered as environment information.
    pub environment: Vec<(String, (f64, f64))>,
    pub actions: Vec<&'static ActionSpec>,
    pub tips: Vec<String>,
}

const MOTION: [&str; 7] = [
    "turn_left",
    "turn_right",
    "fly",
    "fly_to",
    "switch_camera",
    "takeoff",
    "land",
];

fn tips_for(kind: TaskKind) -> Vec<String> {
    let mut t: Vec<String> = Vec::new();
    t.push("Coordinates are metres: x grows to the east and y to the north.".into());
    t.push("When a destination is known, a single fly_to reaches it faster than many fly steps.".into());
    match kind {
        TaskKind::CargoDelivery => {
            t.push("The image is split into numbered regions; use them to pick the right ship.".into());
            t.push("Release the cargo only when the target ship is close below or ahead.".into());
        }
        TaskKind::Firefighting => {
            t.push("Approach from the side of the building that faces the fire.".into());
            t.push("The sprayer only reaches fire straight ahead within a short range.".into());
        }
        TaskKind::Tracking => {
            t.push("The downward camera keeps a vehicle below you in view.".into());
            t.push("Expect the vehicle to turn at intersections.".into());
        }
    }
    t
}

impl PromptContext {
    pub fn from_task(rt: &TaskRuntime, world: &World) -> Result<PromptContext, TaskError> {
        let spec = &rt.spec;
        let gp = &spec.goal_params;
        let mut known = Vec::new();
        let mut environment = Vec::new();
        for l in &gp.landmarks {
            let e = world
                .entity(&l.entity_id)
                .ok_or_else(|| TaskError::GoalMissing(l.entity_id.clone()))?;
            let entry = (l.name.clone(), (e.position.x, e.position.y));
            if l.in_task {
                known.push(entry.clone());
            }
            environment.push(entry);
        }
        let tools: &[&str] = match spec.kind {
            TaskKind::CargoDelivery => &["release_cargo"],
            TaskKind::Firefighting => &["sprayer_on", "sprayer_off"],
            TaskKind::Tracking => &[],
        };
        let actions = MOTION
            .iter()
            .chain(tools)
            .chain(&["task_complete"])
            .filter_map(|n| action_spec(n))
            .collect();
        let subtask = (spec.mode == TaskMode::StepByStep)
            .then(|| spec.kind.stage_names()[rt.current_stage].into());
        Ok(PromptContext {
            camera: world.active_camera,
            position: (world.uav.x, world.uav.y),
            objective: gp.objective.clone(),
            subtask,
            known,
            environment,
            actions,
            tips: tips_for(spec.kind),
        })
    }
}

/// Whole metres print without a fraction, anything else with one decimal.
fn coord(v: f64) -> String {
    let r = crate::math::round(v * 10.0) / 10.0;
    if r == 0.0 {
        "0".into()
    } else if crate::math::floor(r) == r {
        format!("{}", r as i64)
    } else {
        format!("{r:.1}")
    }
}

fn pair(p: (f64, f64)) -> String {
    format!("({}, {})", coord(p.0), coord(p.1))
}

pub fn build_prompt(ctx: &PromptContext) -> Result<String, WireError> {
    let empty = |what: &str| {
        WireError::new(
            WireErrorCode::BadParams,
            format!("prompt component `{what}` is empty"),
        )
    };
    if ctx.objective.trim().is_empty() {
        return Err(empty("task_description"));
    }
    if ctx.actions.is_empty() {
        return Err(empty("available_actions"));
    }
    if ctx.tips.is_empty() {
        return Err(empty("task_tips"));
    }
    let mut s = String::new();
    // writing into a String cannot fail
    let _ = writeln!(s, "[{TEMPLATE_VERSION}]");
    let _ = writeln!(
        s,
        "(State Information) You are operating a drone, and this image is captured by the \
         drone's {} camera.",
        camera_phrase(ctx.camera)
    );
    let _ = write!(s, "(Task Description) Mission objective: {}.", ctx.objective);
    if let Some(sub) = &ctx.subtask {
        let _ = write!(s, " Current subtask: {sub}.");
    }
    let _ = write!(
        s,
        " Known information: 1. The current position of the drone is {}.",
        pair(ctx.position)
    );
    for (i, (name, p)) in ctx.known.iter().enumerate() {
        let _ = write!(s, " {}. The approximate coordinates of {name} are {}.", i + 2, pair(*p));
    }
    s.push('\n');
    if !ctx.environment.is_empty() {
        s.push_str("(Environment Information)");
        for (name, p) in &ctx.environment {
            let _ = write!(s, " Position of {name}: {}", pair(*p));
        }
        s.push('\n');
    }
    s.push_str("(Available Actions)\n");
    for (i, a) in ctx.actions.iter().enumerate() {
        let _ = writeln!(s, "{}. {}", i + 1, a.help);
    }
    s.push_str("(Task Tips)\n");
    for (i, t) in ctx.tips.iter().enumerate() {
        let _ = writeln!(s, "{}. {t}", i + 1);
    }
    s.push_str(
        "(Response Format Requirements) Reply with one JSON object holding `action_name`, \
         `params` and `analysis`, where `analysis` explains what you see and why you chose the \
         action. When the task is done, reply with the action task_complete. Example:\n",
    );
    s.push_str(
        r#"{"action_name": "fly_to", "params": {"x": 100, "y": 100}, "analysis": "The destination lies north-east."}"#,
    );
    s.push('\n');
    Ok(s)
}
