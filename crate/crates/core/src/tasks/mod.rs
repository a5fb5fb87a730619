//! Mission state machines: stage tracking, tool semantics, success and
//! failure predicates, and step accounting.

mod oracle;
pub mod presets;

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::math;
use crate::world::{
    build_scene, observe, visible_in_any_camera, MotionAction, MotionOutcome, SceneSpec,
    WaypointArrival, World, WorldError,
};

pub use oracle::oracle_command;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    CargoDelivery,
    Firefighting,
    Tracking,
}

impl TaskKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::CargoDelivery => "cargo_delivery",
            TaskKind::Firefighting => "firefighting",
            TaskKind::Tracking => "tracking",
        }
    }

    pub fn stage_names(self) -> &'static [&'static str] {
        match self {
            TaskKind::CargoDelivery => &[
                "Navigate to the port",
                "Search for the cargo vessel",
                "Approach the target vessel",
            ],
            TaskKind::Firefighting => &[
                "Navigate to the fire scene",
                "Locate the fire source",
                "Execute firefighting operation",
            ],
            TaskKind::Tracking => &["Track the target vehicle"],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskMode {
    EndToEnd,
    StepByStep,
}

impl TaskMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskMode::EndToEnd => "end_to_end",
            TaskMode::StepByStep => "step_by_step",
        }
    }
}

/// A named scene location quoted to the agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Landmark {
    pub name: String,
    pub entity_id: String,
    /// Also listed as known information in the task description.
    #[serde(default)]
    pub in_task: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SprayCone {
    pub half_angle_deg: f64,
    pub range_m: f64,
    /// Intensity removed per step while the fire is inside the cone.
    pub rate: f64,
}

impl Default for SprayCone {
    fn default() -> Self {
        SprayCone {
            half_angle_deg: 20.0,
            range_m: 60.0,
            rate: 0.25,
        }
    }
}

/// Goal entities and predicate parameters. Every field has a default so
/// preset files only spell out what differs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GoalParams {
    /// Vessel, fire source or tracked vehicle.
    pub target_id: String,
    /// Port marker or burning building.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anchor_id: Option<String>,
    pub delivery_radius: f64,
    pub port_radius: f64,
    pub approach_radius: f64,
    /// Compass azimuth (from the building) of the fire-exposed side.
    pub exposed_azimuth: f64,
    pub exposed_half_width: f64,
    /// Distance from the building center the oracle approaches to.
    pub approach_standoff: f64,
    pub sighting_range: f64,
    pub spray: SprayCone,
    pub lose_tolerance: u32,
    pub turn_threshold_deg: f64,
    /// Steps the vehicle must be followed; derived from the route when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub track_steps: Option<u32>,
    /// Accepted lowercase mentions of an entity, keyed by entity id.
    pub synonyms: BTreeMap<String, Vec<String>>,
    pub objective: String,
    pub landmarks: Vec<Landmark>,
}

impl Default for GoalParams {
    fn default() -> Self {
        GoalParams {
            target_id: String::new(),
            anchor_id: None,
            delivery_radius: 15.0,
            port_radius: 300.0,
            approach_radius: 200.0,
            exposed_azimuth: 90.0,
            exposed_half_width: 60.0,
            approach_standoff: 70.0,
            sighting_range: 150.0,
            spray: SprayCone::default(),
            lose_tolerance: 3,
            turn_threshold_deg: 45.0,
            track_steps: None,
            synonyms: BTreeMap::new(),
            objective: String::new(),
            landmarks: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub kind: TaskKind,
    pub mode: TaskMode,
    #[serde(default)]
    pub stage_thresholds: Vec<u32>,
    pub overall_step_limit: u32,
    pub scene: SceneSpec,
    #[serde(default)]
    pub goal_params: GoalParams,
    /// Subtask under test in step-by-step mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<usize>,
}

impl TaskSpec {
    pub fn validate(&self) -> Result<(), TaskError> {
        if self.kind == TaskKind::Tracking {
            if self.mode == TaskMode::StepByStep {
                return Err(TaskError::UnsupportedMode);
            }
            if !self.stage_thresholds.is_empty() {
                return Err(TaskError::InvalidSpec("tracking has no stage thresholds"));
            }
        } else if self.stage_thresholds.len() != 3 {
            return Err(TaskError::InvalidSpec("expected three stage thresholds"));
        }
        if self.stage_thresholds.contains(&0) || self.overall_step_limit == 0 {
            return Err(TaskError::InvalidSpec("thresholds must be positive"));
        }
        if self.mode == TaskMode::StepByStep && self.selected_stage() >= 3 {
            return Err(TaskError::InvalidSpec("stage index out of range"));
        }
        Ok(())
    }

    pub fn selected_stage(&self) -> usize {
        match self.mode {
            TaskMode::EndToEnd => 0,
            TaskMode::StepByStep => self.stage.unwrap_or(0),
        }
    }

    /// Step′ governing failure and the efficiency factor.
    pub fn step_limit(&self) -> u32 {
        match self.mode {
            TaskMode::EndToEnd => self.overall_step_limit,
            TaskMode::StepByStep => self.stage_thresholds[self.selected_stage()],
        }
    }

    pub fn stage_count(&self) -> usize {
        self.kind.stage_names().len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TaskError {
    #[error("tracking has no step-by-step mode")]
    UnsupportedMode,
    #[error("goal entity `{0}` missing from scene")]
    GoalMissing(String),
    #[error("invalid task spec: {0}")]
    InvalidSpec(&'static str),
    #[error("episode is not running")]
    NotRunning,
    #[error("no cargo on board")]
    NoCargo,
    #[error("tool not available in this task")]
    ToolUnavailable,
    #[error("turn points exist only for tracking tasks")]
    NotTracking,
    #[error(transparent)]
    Scene(#[from] WorldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Terminal {
    Running,
    Success,
    Failure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalReason {
    Delivered,
    Extinguished,
    Tracked,
    /// Step-by-step: the subtask's stage predicate held.
    StageComplete,
    StepLimit,
    /// The agent declared `task_complete` before success.
    Incomplete,
    TargetLost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToolAction {
    ReleaseCargo,
    SprayerOn,
    SprayerOff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToolOutcome {
    Delivered,
    /// The single cargo unit fell outside the delivery radius.
    Missed,
    Activated,
    Deactivated,
    Redundant,
}

/// One accepted world-stepping command.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum StepCommand {
    Motion(MotionAction),
    Tool { tool: ToolAction },
}

/// Stage `stage` covers the interactions whose post-action world tick lies
/// in `[start_tick, end_tick)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: usize,
    pub name: String,
    pub start_tick: u64,
    pub end_tick: u64,
    pub completed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnEvent {
    pub index: usize,
    pub waypoint: usize,
    pub lap: u32,
    pub tick: u64,
    pub heading_change: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskStatus {
    pub terminal: Terminal,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<TerminalReason>,
    pub current_stage: usize,
    pub steps_used: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fire_intensity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cargo_onboard: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sprayer_on: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_visible: Option<bool>,
}

/// Result of one accepted action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub motion: Option<MotionOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tool: Option<ToolOutcome>,
    pub stage_advanced: bool,
    pub terminal: Terminal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskRuntime {
    pub spec: TaskSpec,
    pub current_stage: usize,
    pub steps_used: u32,
    pub stage_steps: Vec<u32>,
    pub cargo_onboard: bool,
    pub sprayer_on: bool,
    pub terminal: Terminal,
    pub reason: Option<TerminalReason>,
    pub records: Vec<StageRecord>,
    stage_start_tick: u64,
    delivered: bool,
    unseen_streak: u32,
    track_steps: u32,
    arrivals: Vec<WaypointArrival>,
}

impl TaskRuntime {
    /// Builds the scene and arms the mission. Step-by-step specs start from
    /// the canonical state the oracle policy reaches at the selected stage.
    pub fn load(spec: &TaskSpec) -> Result<(TaskRuntime, World), TaskError> {
        spec.validate()?;
        let mut world = build_scene(&spec.scene)?;
        let gp = &spec.goal_params;
        let target = world
            .entity(&gp.target_id)
            .ok_or_else(|| TaskError::GoalMissing(gp.target_id.clone()))?;
        let mut track_steps = 0;
        if spec.kind == TaskKind::Tracking {
            let route = target
                .motion
                .as_ref()
                .map(|m| &m.route)
                .ok_or(TaskError::InvalidSpec("tracked vehicle has no route"))?;
            track_steps = gp
                .track_steps
                .unwrap_or_else(|| math::ceil(route.length() / route.speed) as u32);
        }
        if let Some(anchor) = &gp.anchor_id {
            if world.entity(anchor).is_none() {
                return Err(TaskError::GoalMissing(anchor.clone()));
            }
        } else if spec.kind != TaskKind::Tracking {
            return Err(TaskError::InvalidSpec("anchor_id is required"));
        }
        if spec.kind == TaskKind::Firefighting
            && world.entity(&gp.target_id).and_then(|e| e.intensity).is_none()
        {
            return Err(TaskError::InvalidSpec("fire target carries no intensity"));
        }
        let n = spec.stage_count();
        let mut rt = TaskRuntime {
            spec: spec.clone(),
            current_stage: 0,
            steps_used: 0,
            stage_steps: vec![0; n],
            cargo_onboard: spec.kind == TaskKind::CargoDelivery,
            sprayer_on: false,
            terminal: Terminal::Running,
            reason: None,
            records: Vec::new(),
            stage_start_tick: world.tick + 1,
            delivered: false,
            unseen_streak: 0,
            track_steps,
            arrivals: Vec::new(),
        };
        if spec.mode == TaskMode::StepByStep {
            rt.fast_forward(&mut world)?;
        }
        Ok((rt, world))
    }

    fn fast_forward(&mut self, world: &mut World) -> Result<(), TaskError> {
        let target_stage = self.spec.selected_stage();
        if target_stage == 0 {
            return Ok(());
        }
        let mut shadow_spec = self.spec.clone();
        shadow_spec.mode = TaskMode::EndToEnd;
        let mut shadow = TaskRuntime {
            spec: shadow_spec,
            ..self.clone()
        };
        while shadow.current_stage < target_stage {
            if shadow.terminal != Terminal::Running {
                return Err(TaskError::InvalidSpec("oracle cannot reach the selected stage"));
            }
            let cmd = oracle_command(&shadow, world);
            shadow.advance(cmd, world)?;
        }
        self.current_stage = target_stage;
        self.cargo_onboard = shadow.cargo_onboard;
        self.sprayer_on = shadow.sprayer_on;
        self.stage_start_tick = world.tick + 1;
        Ok(())
    }

    fn ensure_running(&self) -> Result<(), TaskError> {
        if self.terminal == Terminal::Running {
            Ok(())
        } else {
            Err(TaskError::NotRunning)
        }
    }

    /// Applies a tool command. Rejections leave runtime and world untouched.
    pub fn tool_effect(&mut self, tool: ToolAction, world: &World) -> Result<ToolOutcome, TaskError> {
        self.ensure_running()?;
        match (self.spec.kind, tool) {
            (TaskKind::CargoDelivery, ToolAction::ReleaseCargo) => {
                if !self.cargo_onboard {
                    return Err(TaskError::NoCargo);
                }
                self.cargo_onboard = false;
                let gp = &self.spec.goal_params;
                let vessel = world
                    .entity(&gp.target_id)
                    .ok_or_else(|| TaskError::GoalMissing(gp.target_id.clone()))?;
                let d = world.uav.horizontal_distance(vessel.position.x, vessel.position.y);
                if d <= gp.delivery_radius {
                    self.delivered = true;
                    Ok(ToolOutcome::Delivered)
                } else {
                    Ok(ToolOutcome::Missed)
                }
            }
            (TaskKind::Firefighting, ToolAction::SprayerOn) => {
                let was = core::mem::replace(&mut self.sprayer_on, true);
                Ok(if was {
                    ToolOutcome::Redundant
                } else {
                    ToolOutcome::Activated
                })
            }
            (TaskKind::Firefighting, ToolAction::SprayerOff) => {
                let was = core::mem::replace(&mut self.sprayer_on, false);
                Ok(if was {
                    ToolOutcome::Deactivated
                } else {
                    ToolOutcome::Redundant
                })
            }
            _ => Err(TaskError::ToolUnavailable),
        }
    }

    /// Runs one accepted command: motion or tool, then the world tick, then
    /// the stage and terminal predicates.
    pub fn advance(&mut self, cmd: StepCommand, world: &mut World) -> Result<StepReport, TaskError> {
        self.ensure_running()?;
        let (motion, tool) = match cmd {
            StepCommand::Motion(m) => (Some(world.apply_motion(m)), None),
            StepCommand::Tool { tool } => (None, Some(self.tool_effect(tool, world)?)),
        };
        let arrivals = world.step();
        let done_before = self.records.iter().filter(|r| r.completed).count();
        self.on_step(world, &arrivals);
        Ok(StepReport {
            motion,
            tool,
            stage_advanced: self.records.iter().filter(|r| r.completed).count() > done_before,
            terminal: self.terminal,
        })
    }

    /// Post-tick bookkeeping for one accepted action.
    pub fn on_step(&mut self, world: &mut World, arrivals: &[WaypointArrival]) {
        if self.terminal != Terminal::Running {
            return;
        }
        self.steps_used += 1;
        self.stage_steps[self.current_stage] += 1;
        let tick = world.tick;
        let gp = self.spec.goal_params.clone();
        self.arrivals
            .extend(arrivals.iter().filter(|a| a.entity_id == gp.target_id).cloned());

        if self.sprayer_on && fire_in_cone(world, &gp) {
            if let Some(fire) = world.entity_mut(&gp.target_id) {
                if let Some(i) = fire.intensity.as_mut() {
                    *i = (*i - gp.spray.rate).max(0.0);
                }
            }
        }

        match self.spec.kind {
            TaskKind::CargoDelivery if self.delivered => {
                return self.finish(Terminal::Success, TerminalReason::Delivered, tick)
            }
            TaskKind::Firefighting if fire_intensity(world, &gp) == Some(0.0) => {
                return self.finish(Terminal::Success, TerminalReason::Extinguished, tick)
            }
            TaskKind::Tracking => {
                if visible_in_any_camera(world, &gp.target_id) {
                    self.unseen_streak = 0;
                } else {
                    self.unseen_streak += 1;
                    if self.unseen_streak >= gp.lose_tolerance {
                        return self.finish(Terminal::Failure, TerminalReason::TargetLost, tick);
                    }
                }
                if self.steps_used >= self.track_steps {
                    return self.finish(Terminal::Success, TerminalReason::Tracked, tick);
                }
            }
            _ => {}
        }

        if self.spec.kind != TaskKind::Tracking && self.stage_predicate(world) {
            if self.spec.mode == TaskMode::StepByStep {
                return self.finish(Terminal::Success, TerminalReason::StageComplete, tick);
            }
            self.close_stage(tick, true);
            self.current_stage += 1;
        }

        let used = match self.spec.mode {
            TaskMode::EndToEnd => self.steps_used,
            TaskMode::StepByStep => self.stage_steps[self.current_stage],
        };
        if used >= self.spec.step_limit() {
            self.finish(Terminal::Failure, TerminalReason::StepLimit, tick);
        }
    }

    /// The agent declared completion. Success is always detected eagerly, so
    /// a declaration while running means the mission is unfinished.
    pub fn declare_complete(&mut self, world: &World) -> Result<(), TaskError> {
        self.ensure_running()?;
        self.finish(Terminal::Failure, TerminalReason::Incomplete, world.tick);
        Ok(())
    }

    fn stage_predicate(&self, world: &World) -> bool {
        let gp = &self.spec.goal_params;
        let anchor = gp.anchor_id.as_deref().and_then(|a| world.entity(a));
        match (self.spec.kind, self.current_stage) {
            (TaskKind::CargoDelivery, 0) => anchor.is_some_and(|p| {
                world.uav.horizontal_distance(p.position.x, p.position.y) <= gp.port_radius
            }),
            (TaskKind::CargoDelivery, 1) => observe(world).contains(&gp.target_id),
            (TaskKind::Firefighting, 0) => anchor.is_some_and(|b| {
                let (dx, dy) = (world.uav.x - b.position.x, world.uav.y - b.position.y);
                let d = math::hypot(dx, dy);
                d > 0.0
                    && d <= gp.approach_radius
                    && math::heading_delta(math::bearing_deg(dx, dy), gp.exposed_azimuth)
                        <= gp.exposed_half_width
            }),
            (TaskKind::Firefighting, 1) => observe(world)
                .region_of(&gp.target_id)
                .is_some_and(|r| r.range_m <= gp.sighting_range),
            // final stages end only through the success predicates
            _ => false,
        }
    }

    fn close_stage(&mut self, tick: u64, completed: bool) {
        let stage = self.current_stage;
        self.records.push(StageRecord {
            stage,
            name: self.spec.kind.stage_names()[stage].to_string(),
            start_tick: self.stage_start_tick,
            end_tick: tick + 1,
            completed,
        });
        self.stage_start_tick = tick + 1;
    }

    fn finish(&mut self, terminal: Terminal, reason: TerminalReason, tick: u64) {
        let success = terminal == Terminal::Success;
        self.close_stage(tick, success);
        let last = match self.spec.mode {
            TaskMode::EndToEnd => self.spec.stage_count(),
            TaskMode::StepByStep => self.current_stage + 1,
        };
        for stage in self.current_stage + 1..last {
            self.records.push(StageRecord {
                stage,
                name: self.spec.kind.stage_names()[stage].to_string(),
                start_tick: tick + 1,
                end_tick: tick + 1,
                completed: success,
            });
        }
        self.terminal = terminal;
        self.reason = Some(reason);
    }

    /// Step count fed to the efficiency factor. Failed runs are charged the
    /// full budget.
    pub fn step_task(&self) -> u32 {
        match self.terminal {
            Terminal::Success => self.steps_used,
            _ => self.spec.step_limit().max(self.steps_used),
        }
    }

    pub fn status(&self, world: &World) -> TaskStatus {
        let gp = &self.spec.goal_params;
        let kind = self.spec.kind;
        TaskStatus {
            terminal: self.terminal,
            reason: self.reason,
            current_stage: self.current_stage,
            steps_used: self.steps_used,
            fire_intensity: (kind == TaskKind::Firefighting)
                .then(|| fire_intensity(world, gp))
                .flatten(),
            cargo_onboard: (kind == TaskKind::CargoDelivery).then_some(self.cargo_onboard),
            sprayer_on: (kind == TaskKind::Firefighting).then_some(self.sprayer_on),
            target_visible: (kind == TaskKind::Tracking)
                .then(|| visible_in_any_camera(world, &gp.target_id)),
        }
    }

    /// Turn events seen so far: arrivals at waypoints whose heading change
    /// meets the turn threshold.
    pub fn turn_points(&self, world: &World) -> Result<Vec<TurnEvent>, TaskError> {
        if self.spec.kind != TaskKind::Tracking {
            return Err(TaskError::NotTracking);
        }
        let gp = &self.spec.goal_params;
        let Some(route) = world
            .entity(&gp.target_id)
            .and_then(|e| e.motion.as_ref())
            .map(|m| &m.route)
        else {
            return Ok(Vec::new());
        };
        let mut out = Vec::new();
        for a in &self.arrivals {
            let w = a.waypoint;
            let (Some(prev), Some(next)) = (route.prev_index(w), route.next_index(w)) else {
                continue;
            };
            let (p, c, n) = (route.waypoints[prev], route.waypoints[w], route.waypoints[next]);
            let inbound = math::bearing_deg(c.0 - p.0, c.1 - p.1);
            let outbound = math::bearing_deg(n.0 - c.0, n.1 - c.1);
            let change = math::heading_delta(inbound, outbound);
            if change >= gp.turn_threshold_deg {
                out.push(TurnEvent {
                    index: out.len(),
                    waypoint: w,
                    lap: a.lap,
                    tick: a.tick,
                    heading_change: change,
                });
            }
        }
        Ok(out)
    }

    pub fn track_steps(&self) -> u32 {
        self.track_steps
    }
}

pub(crate) fn fire_intensity(world: &World, gp: &GoalParams) -> Option<f64> {
    world.entity(&gp.target_id).and_then(|e| e.intensity)
}

/// Whether the fire lies within the forward spray cone.
pub(crate) fn fire_in_cone(world: &World, gp: &GoalParams) -> bool {
    let Some(fire) = world.entity(&gp.target_id) else {
        return false;
    };
    let v = fire.position.sub(world.uav.position());
    let range = v.norm();
    if !(range > 0.0) || range > gp.spray.range_m {
        return false;
    }
    let (s, c) = (math::sin_deg(world.uav.yaw), math::cos_deg(world.uav.yaw));
    let cos_angle = (v.x * s + v.y * c) / range;
    math::acos_deg(cos_angle) <= gp.spray.half_angle_deg
}

#[cfg(test)]
mod tests;
