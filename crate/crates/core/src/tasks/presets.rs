//! Shipped mission configurations.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::{GoalParams, Landmark, TaskKind, TaskMode, TaskSpec};
use crate::world::{RouteSpec, Scenario, SceneSpec};

pub const CARGO_STEP_LIMIT: u32 = 25;
pub const CARGO_STAGE_THRESHOLDS: [u32; 3] = [5, 10, 20];
pub const FIRE_STEP_LIMIT: u32 = 25;
pub const FIRE_STAGE_THRESHOLDS: [u32; 3] = [5, 10, 10];
pub const TRACKING_STEP_LIMIT: u32 = 60;

fn synonyms(pairs: &[(&str, &[&str])]) -> BTreeMap<String, Vec<String>> {
    pairs
        .iter()
        .map(|(id, words)| (id.to_string(), words.iter().map(|w| w.to_string()).collect()))
        .collect()
}

fn landmark(name: &str, id: &str, in_task: bool) -> Landmark {
    Landmark {
        name: name.to_string(),
        entity_id: id.to_string(),
        in_task,
    }
}

pub fn cargo(mode: TaskMode, stage: Option<usize>, seed: u64) -> TaskSpec {
    TaskSpec {
        kind: TaskKind::CargoDelivery,
        mode,
        stage_thresholds: CARGO_STAGE_THRESHOLDS.to_vec(),
        overall_step_limit: CARGO_STEP_LIMIT,
        scene: SceneSpec::new(Scenario::CargoPort, seed),
        goal_params: GoalParams {
            target_id: "target_vessel".into(),
            anchor_id: Some("bruce_port".into()),
            objective: "deliver the cargo to the red container ship moored at Bruce Port".into(),
            landmarks: vec![
                landmark("Bruce Port", "bruce_port", true),
                landmark("Guanghua Building", "guanghua_building", false),
            ],
            synonyms: synonyms(&[
                ("target_vessel", &["vessel", "cargo ship", "ship", "freighter", "boat"]),
                ("bruce_port", &["port", "harbor", "harbour"]),
            ]),
            ..GoalParams::default()
        },
        stage: stage.filter(|_| mode == TaskMode::StepByStep),
    }
}

pub fn firefighting(mode: TaskMode, stage: Option<usize>, seed: u64) -> TaskSpec {
    TaskSpec {
        kind: TaskKind::Firefighting,
        mode,
        stage_thresholds: FIRE_STAGE_THRESHOLDS.to_vec(),
        overall_step_limit: FIRE_STEP_LIMIT,
        scene: SceneSpec::new(Scenario::UrbanFire, seed),
        goal_params: GoalParams {
            target_id: "fire_source".into(),
            anchor_id: Some("burning_building".into()),
            objective: "reach the burning tower from its fire-exposed east side, find the \
                        flames and put them out with the onboard sprayer"
                .into(),
            landmarks: vec![landmark("Burning tower", "burning_building", true)],
            synonyms: synonyms(&[
                ("fire_source", &["fire", "flame", "flames", "blaze", "smoke"]),
                ("burning_building", &["building", "tower"]),
            ]),
            ..GoalParams::default()
        },
        stage: stage.filter(|_| mode == TaskMode::StepByStep),
    }
}

/// Tracking preset; `route` of `None` draws a seeded random route.
pub fn tracking(route: Option<RouteSpec>, seed: u64) -> TaskSpec {
    let mut scene = SceneSpec::new(Scenario::Tracking, seed);
    scene.route = route;
    TaskSpec {
        kind: TaskKind::Tracking,
        mode: TaskMode::EndToEnd,
        stage_thresholds: Vec::new(),
        overall_step_limit: TRACKING_STEP_LIMIT,
        scene,
        goal_params: GoalParams {
            target_id: "target_vehicle".into(),
            objective: "keep the red sedan in view and follow it through the street grid".into(),
            synonyms: synonyms(&[(
                "target_vehicle",
                &["vehicle", "car", "sedan", "target"],
            )]),
            ..GoalParams::default()
        },
        stage: None,
    }
}

pub const PRESET_NAMES: [&str; 6] = [
    "cargo_end_to_end",
    "cargo_step_by_step",
    "firefighting_end_to_end",
    "firefighting_step_by_step",
    "tracking",
    "tracking_square",
];

/// Looks up a preset by name; step-by-step presets start at stage 0.
pub fn by_name(name: &str, seed: u64) -> Option<TaskSpec> {
    Some(match name {
        "cargo_end_to_end" => cargo(TaskMode::EndToEnd, None, seed),
        "cargo_step_by_step" => cargo(TaskMode::StepByStep, Some(0), seed),
        "firefighting_end_to_end" => firefighting(TaskMode::EndToEnd, None, seed),
        "firefighting_step_by_step" => firefighting(TaskMode::StepByStep, Some(0), seed),
        "tracking" => tracking(None, seed),
        "tracking_square" => tracking(Some(RouteSpec::Square), seed),
        _ => return None,
    })
}
