use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CanonicalAnswer, ImageRef, QAItem, QType};
use crate::math;
use crate::metrics::{Rubric, RubricField};
use crate::tasks::{GoalParams, SprayCone};
use crate::world::{
    build_scene, observe_camera, Camera, EntityOverride, Pose, PositionOverride, Region, Scenario,
    SceneSpec, World, WorldError,
};

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    /// Items wanted per question type; types absent from the map get none.
    pub per_type: BTreeMap<QType, usize>,
    /// Region pairs whose ranges differ by less than this are not asked about.
    pub tie_margin_m: f64,
    /// Targets this close to a half-hour boundary get no clock question.
    pub bearing_margin_deg: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            per_type: QType::ALL.into_iter().map(|q| (q, 1)).collect(),
            tie_margin_m: 5.0,
            bearing_margin_deg: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedType {
    pub qtype: QType,
    pub reason: &'static str,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Generated {
    pub items: Vec<QAItem>,
    pub skipped: Vec<SkippedType>,
}

fn pick<'a>(rng: &mut ChaCha8Rng, bank: &[&'a str]) -> &'a str {
    bank[rng.random_range(0..bank.len())]
}

fn fill(template: &str, subs: &[(&str, String)]) -> String {
    let mut s = String::from(template);
    for (k, v) in subs {
        s = s.replace(k, v);
    }
    s
}

const INFODIS: [&str; 3] = [
    "What kind of object is shown in Region {k}?",
    "Identify the category of the object in Region {k}.",
    "Which class does the object labelled Region {k} belong to?",
];
const INFODES: [&str; 3] = [
    "Describe the object in Region {k}.",
    "Give a short description of what Region {k} shows.",
    "What does the object in Region {k} look like, and what is it for?",
];
const INFODET: [&str; 3] = [
    "Which regions contain a {noun}?",
    "List every region that shows a {noun}.",
    "In which regions can you find a {noun}?",
];
const POSRELDIS: [&str; 3] = [
    "Relative to the drone's heading, at which clock direction is the object in Region {k}?",
    "Using clock directions with 12 o'clock straight ahead, where is Region {k}?",
    "In what clock direction from the drone does the object in Region {k} lie?",
];
const RELDIS: [&str; 3] = [
    "Which is closer to the drone, Region {a} or Region {b}?",
    "Between Region {a} and Region {b}, which object is nearer to the drone?",
    "Is Region {a} or Region {b} at the shorter distance from the drone?",
];
const MOTION: [&str; 2] = [
    "How should the drone move to get a centred close view of the object in Region {k}?",
    "Describe the adjustments that bring Region {k} into the centre of a close view.",
];
const TOOL_RELEASE: [&str; 2] = [
    "If the cargo were released right now, would it land on the object in Region {k}?",
    "Is the object in Region {k} within the cargo drop radius?",
];
const TOOL_SPRAY: [&str; 2] = [
    "Would the sprayer reach the object in Region {k} if switched on now?",
    "Is Region {k} inside the sprayer's reach?",
];
const PLAN: [&str; 2] = [
    "Outline a plan for the drone to reach the object in Region {k}.",
    "What sequence of actions takes the drone to Region {k}?",
];

struct Geo {
    /// Clockwise from the heading, in [0, 360).
    rel_bearing: f64,
    horizontal: f64,
    dz: f64,
}

fn geo(world: &World, r: &Region) -> Option<Geo> {
    let e = world.entity(&r.entity_id)?;
    let dx = e.position.x - world.uav.x;
    let dy = e.position.y - world.uav.y;
    Some(Geo {
        rel_bearing: math::wrap_deg(math::bearing_deg(dx, dy) - world.uav.yaw),
        horizontal: math::hypot(dx, dy),
        dz: e.position.z - world.uav.z,
    })
}

fn turn_phrase(rel: f64) -> &'static str {
    if rel <= 15.0 || rel >= 345.0 {
        "keep heading"
    } else if rel <= 180.0 {
        "turn right"
    } else {
        "turn left"
    }
}

fn field(tag: &str, value: &str) -> RubricField {
    RubricField {
        tag: tag.into(),
        value: value.into(),
    }
}

fn text_answer(text: String, fields: Vec<RubricField>, ordered: bool) -> CanonicalAnswer {
    CanonicalAnswer::Text {
        text,
        rubric: Some(Rubric { fields, ordered }),
    }
}

fn describe(r: &Region) -> CanonicalAnswer {
    let noun = r.class.noun();
    let mut fields = alloc::vec![
        field("size", r.size_class.as_str()),
        field("color", r.color.as_str()),
        field("class", noun),
    ];
    let text = if r.function_tag.is_empty() {
        format!(
            "A {} {} {noun}.",
            r.size_class.as_str(),
            r.color.as_str()
        )
    } else {
        fields.push(field("function", &r.function_tag));
        format!(
            "A {} {} {noun}, {}.",
            r.size_class.as_str(),
            r.color.as_str(),
            r.function_tag
        )
    };
    text_answer(text, fields, false)
}

/// Vertical, horizontal, forward/backward, then zoom.
fn motion_answer(r: &Region, g: &Geo) -> CanonicalAnswer {
    let vertical = if g.dz < -10.0 {
        "descend"
    } else if g.dz > 10.0 {
        "ascend"
    } else {
        "hold altitude"
    };
    let horizontal = turn_phrase(g.rel_bearing);
    let forward = if g.horizontal > 50.0 {
        "move forward"
    } else if g.horizontal < 10.0 {
        "move backward"
    } else {
        "hold position"
    };
    let zoom = if r.range_m > 150.0 { "zoom in" } else { "no zoom" };
    let text = format!("{vertical}, then {horizontal}, then {forward}, then {zoom}.");
    let fields = alloc::vec![
        field("vertical", vertical),
        field("horizontal", horizontal),
        field("forward", forward),
        field("zoom", zoom),
    ];
    let mut chars = text.chars();
    let text = match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => text,
    };
    text_answer(text, fields, true)
}

fn plan_answer(r: &Region, g: &Geo) -> CanonicalAnswer {
    let turn = turn_phrase(g.rel_bearing);
    let noun = r.class.noun();
    let metres = math::round(g.horizontal) as i64;
    let text = format!(
        "First {turn} toward the {noun}, then fly forward about {metres} metres, then hover \
         above the {noun} and inspect it."
    );
    let fields = alloc::vec![
        field("heading", turn),
        field("motion", "fly forward"),
        field("target", noun),
    ];
    text_answer(text, fields, true)
}

enum ToolRule {
    Release { radius: f64 },
    Spray(SprayCone),
}

impl ToolRule {
    fn for_scenario(s: Scenario) -> Option<ToolRule> {
        let gp = GoalParams::default();
        match s {
            Scenario::CargoPort => Some(ToolRule::Release {
                radius: gp.delivery_radius,
            }),
            Scenario::UrbanFire => Some(ToolRule::Spray(gp.spray)),
            Scenario::Tracking => None,
        }
    }

    /// `None` when the target sits too close to the threshold to call.
    fn reaches(&self, r: &Region, g: &Geo) -> Option<bool> {
        let clear = |v: f64, limit: f64, margin: f64| {
            (math::abs(v - limit) >= margin).then_some(v <= limit)
        };
        match self {
            ToolRule::Release { radius } => clear(g.horizontal, *radius, 1.0),
            ToolRule::Spray(c) => {
                let off_axis = math::heading_delta(0.0, g.rel_bearing);
                Some(clear(r.range_m, c.range_m, 1.0)? && clear(off_axis, c.half_angle_deg, 1.0)?)
            }
        }
    }
}

fn near_half_hour(rel: f64, margin: f64) -> bool {
    let phase = math::wrap_deg(rel + 15.0) % 30.0;
    phase < margin || phase > 30.0 - margin
}

/// Derives QA items from the regions `camera` sees in `world`.
pub fn generate_qa(
    world: &World,
    camera: Camera,
    seed: u64,
    image_ref: &ImageRef,
    cfg: &GenConfig,
) -> Generated {
    let obs = observe_camera(world, camera);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Generated::default();
    let tool = ToolRule::for_scenario(world.scenario);
    for (&qtype, &want) in &cfg.per_type {
        if want == 0 {
            continue;
        }
        // (question, reference) candidates for this type
        let mut cands: Vec<(String, CanonicalAnswer)> = Vec::new();
        let mut skip_reason = "no visible regions";
        let k = |r: &Region| (("{k}"), format!("{}", r.index));
        for r in &obs.regions {
            let Some(g) = geo(world, r) else { continue };
            let q = |rng: &mut ChaCha8Rng, bank: &[&str]| fill(pick(rng, bank), &[k(r)]);
            match qtype {
                QType::InfoDis => cands.push((
                    q(&mut rng, &INFODIS),
                    CanonicalAnswer::Class {
                        label: r.class.noun().into(),
                    },
                )),
                QType::InfoDes => cands.push((q(&mut rng, &INFODES), describe(r))),
                QType::PosRelDis => {
                    if g.horizontal < 1.0 || near_half_hour(g.rel_bearing, cfg.bearing_margin_deg) {
                        skip_reason = "every target sits on a clock-hour boundary";
                        continue;
                    }
                    cands.push((
                        q(&mut rng, &POSRELDIS),
                        CanonicalAnswer::Clock { hour: r.clock_hour },
                    ));
                }
                QType::Motion => cands.push((q(&mut rng, &MOTION), motion_answer(r, &g))),
                QType::Plan => cands.push((q(&mut rng, &PLAN), plan_answer(r, &g))),
                QType::Tool => {
                    let Some(rule) = &tool else {
                        skip_reason = "scenario has no tool";
                        break;
                    };
                    let Some(yes) = rule.reaches(r, &g) else {
                        skip_reason = "every target sits on the tool threshold";
                        continue;
                    };
                    let bank: &[&str] = match rule {
                        ToolRule::Release { .. } => &TOOL_RELEASE,
                        ToolRule::Spray(_) => &TOOL_SPRAY,
                    };
                    cands.push((q(&mut rng, bank), CanonicalAnswer::YesNo { yes }));
                }
                QType::InfoDet | QType::RelDisRelDis => {}
            }
        }
        match qtype {
            QType::InfoDet => {
                let classes: BTreeSet<_> = obs.regions.iter().map(|r| r.class).collect();
                for c in classes {
                    let ids = obs
                        .regions
                        .iter()
                        .filter(|r| r.class == c)
                        .map(|r| r.index as u32)
                        .collect();
                    let question = fill(pick(&mut rng, &INFODET), &[("{noun}", c.noun().into())]);
                    cands.push((question, CanonicalAnswer::Regions { ids }));
                }
            }
            QType::RelDisRelDis => {
                skip_reason = "fewer than two regions";
                for (i, a) in obs.regions.iter().enumerate() {
                    for b in &obs.regions[i + 1..] {
                        if math::abs(a.range_m - b.range_m) < cfg.tie_margin_m {
                            skip_reason = "every region pair is a near tie";
                            continue;
                        }
                        let nearer = if a.range_m < b.range_m { a } else { b };
                        let question = fill(
                            pick(&mut rng, &RELDIS),
                            &[("{a}", format!("{}", a.index)), ("{b}", format!("{}", b.index))],
                        );
                        let ids = [nearer.index as u32].into_iter().collect();
                        cands.push((question, CanonicalAnswer::Regions { ids }));
                    }
                }
            }
            _ => {}
        }
        if cands.is_empty() {
            out.skipped.push(SkippedType {
                qtype,
                reason: skip_reason,
            });
            continue;
        }
        cands.shuffle(&mut rng);
        for (n, (question, reference)) in cands.into_iter().take(want).enumerate() {
            out.items.push(QAItem {
                id: format!(
                    "{}-{}-{}-{}-{}-{n:02}",
                    world.scenario.as_str(),
                    world.rng_seed,
                    camera.as_str(),
                    seed,
                    qtype.code()
                ),
                qtype,
                image_ref: image_ref.clone(),
                regions: obs.regions.clone(),
                question,
                reference,
                metric: qtype.metric(),
            });
        }
    }
    out
}

/// Builds the scene and generates items that reference it inline.
pub fn generate_for_scene(
    spec: &SceneSpec,
    camera: Camera,
    seed: u64,
    cfg: &GenConfig,
) -> Result<Generated, WorldError> {
    let world = build_scene(spec)?;
    let mut pinned = spec.clone();
    pinned.uav = Some(world.uav);
    let image_ref = ImageRef::Scene {
        scene: pinned,
        camera,
    };
    Ok(generate_qa(&world, camera, seed, &image_ref, cfg))
}

/// Street-level fire scene with two fire trucks as Regions 2 and 3.
pub fn fire_fixture() -> SceneSpec {
    let mut s = SceneSpec::new(Scenario::UrbanFire, 1);
    s.uav = Some(Pose::new(1450.0, 790.0, 30.0, 270.0));
    s.overrides.insert(
        "fire_truck_1".into(),
        EntityOverride {
            position: Some(PositionOverride {
                x: 1290.0,
                y: 735.0,
                z: None,
            }),
            ..EntityOverride::default()
        },
    );
    s
}

/// A seeded viewpoint for a scenario: the UAV hovers 60 to 300 m from a
/// random entity and faces it to within 25 degrees.
pub fn random_viewpoint(scenario: Scenario, seed: u64) -> Result<SceneSpec, WorldError> {
    let mut spec = SceneSpec::new(scenario, seed);
    let world = build_scene(&spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if world.entities.is_empty() {
        return Ok(spec);
    }
    let focus = &world.entities[rng.random_range(0..world.entities.len())];
    let dist = rng.random_range(60.0..300.0);
    let around = rng.random_range(0.0..360.0);
    let x = focus.position.x + dist * math::sin_deg(around);
    let y = focus.position.y + dist * math::cos_deg(around);
    let z = rng.random_range(25.0..80.0);
    let yaw = math::wrap_deg(math::bearing_deg(focus.position.x - x, focus.position.y - y) + rng.random_range(-25.0..25.0));
    spec.uav = Some(Pose::new(x, y, z, yaw));
    Ok(spec)
}
