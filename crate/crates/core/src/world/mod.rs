//! Kinematic world: UAV pose, scene entities with scripted motion, the
//! five-camera observation model and clock-face geometry.
//!
//! Frame convention: x east, y north, z up (meters); yaw in degrees
//! clockwise from +y.

mod camera;
mod raster;
mod route;
mod scene;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::math;

pub use camera::{
    clock_direction, entity_visible, observe, observe_camera, visible_in_any_camera, ClockHour,
    Observation, Region,
};
pub use raster::{rasterize, Raster};
pub use route::{route_generate, RoadNetwork, RouteConfig};
pub use scene::{
    build_scene, square_route, EntityOverride, PositionOverride, RouteSpec, Scenario, SceneSpec,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WorldError {
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("duplicate entity id `{0}`")]
    DuplicateEntity(String),
    #[error("override targets unknown entity `{0}`")]
    UnknownEntity(String),
    #[error("target coincides with the UAV horizontal position")]
    DegenerateBearing,
    #[error("road network is disconnected")]
    DisconnectedNetwork,
    #[error("road network needs at least two nodes")]
    NetworkTooSmall,
    #[error("invalid entity `{id}`: {reason}")]
    InvalidEntity { id: String, reason: &'static str },
    #[error("invalid route: {0}")]
    InvalidRoute(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    pub fn norm(self) -> f64 {
        math::sqrt(self.x * self.x + self.y * self.y + self.z * self.z)
    }
}

/// UAV pose. `z >= 0`, `yaw` in [0, 360).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub yaw: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, z: f64, yaw: f64) -> Self {
        Pose {
            x,
            y,
            z: z.max(0.0),
            yaw: math::wrap_deg(yaw),
        }
    }

    pub fn position(&self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn horizontal_distance(&self, x: f64, y: f64) -> f64 {
        math::hypot(x - self.x, y - self.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite() && self.yaw.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityClass {
    Vessel,
    Container,
    Crane,
    Building,
    FireSource,
    Vehicle,
    FireTruck,
    RoadNode,
    PortMarker,
}

impl EntityClass {
    pub const ALL: [EntityClass; 9] = [
        EntityClass::Vessel,
        EntityClass::Container,
        EntityClass::Crane,
        EntityClass::Building,
        EntityClass::FireSource,
        EntityClass::Vehicle,
        EntityClass::FireTruck,
        EntityClass::RoadNode,
        EntityClass::PortMarker,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EntityClass::Vessel => "vessel",
            EntityClass::Container => "container",
            EntityClass::Crane => "crane",
            EntityClass::Building => "building",
            EntityClass::FireSource => "fire_source",
            EntityClass::Vehicle => "vehicle",
            EntityClass::FireTruck => "fire_truck",
            EntityClass::RoadNode => "road_node",
            EntityClass::PortMarker => "port_marker",
        }
    }

    /// Plain-language noun used in prompts and generated questions.
    pub fn noun(self) -> &'static str {
        match self {
            EntityClass::Vessel => "vessel",
            EntityClass::Container => "container",
            EntityClass::Crane => "crane",
            EntityClass::Building => "building",
            EntityClass::FireSource => "fire",
            EntityClass::Vehicle => "vehicle",
            EntityClass::FireTruck => "fire truck",
            EntityClass::RoadNode => "road intersection",
            EntityClass::PortMarker => "port marker",
        }
    }
}

impl fmt::Display for EntityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Color {
    Red,
    Orange,
    Yellow,
    Green,
    Blue,
    White,
    Gray,
    Black,
}

impl Color {
    pub const ALL: [Color; 8] = [
        Color::Red,
        Color::Orange,
        Color::Yellow,
        Color::Green,
        Color::Blue,
        Color::White,
        Color::Gray,
        Color::Black,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Color::Red => "red",
            Color::Orange => "orange",
            Color::Yellow => "yellow",
            Color::Green => "green",
            Color::Blue => "blue",
            Color::White => "white",
            Color::Gray => "gray",
            Color::Black => "black",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeClass {
    Small,
    Medium,
    Large,
}

impl SizeClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SizeClass::Small => "small",
            SizeClass::Medium => "medium",
            SizeClass::Large => "large",
        }
    }
}

/// Box dimensions in meters: width along x, depth along y, height along z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extent {
    pub width: f64,
    pub depth: f64,
    pub height: f64,
}

impl Extent {
    pub const fn new(width: f64, depth: f64, height: f64) -> Self {
        Extent {
            width,
            depth,
            height,
        }
    }
}

/// Polyline motion script. Waypoints are `(x, y)`; `speed` is meters per tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteScript {
    pub waypoints: Vec<(f64, f64)>,
    pub speed: f64,
    #[serde(rename = "loop")]
    pub looped: bool,
}

impl RouteScript {
    pub fn validate(&self) -> Result<(), WorldError> {
        if self.waypoints.len() < 2 {
            return Err(WorldError::InvalidRoute("needs at least two waypoints"));
        }
        if !(self.speed > 0.0) || !self.speed.is_finite() {
            return Err(WorldError::InvalidRoute("speed must be positive"));
        }
        Ok(())
    }

    /// Index of the waypoint that follows `i`, if any.
    pub fn next_index(&self, i: usize) -> Option<usize> {
        if i + 1 < self.waypoints.len() {
            Some(i + 1)
        } else if self.looped {
            Some(0)
        } else {
            None
        }
    }

    /// Index of the waypoint before `i`, if any.
    pub fn prev_index(&self, i: usize) -> Option<usize> {
        if i > 0 {
            Some(i - 1)
        } else if self.looped {
            Some(self.waypoints.len() - 1)
        } else {
            None
        }
    }

    /// Total length of one pass (one lap when looped).
    pub fn length(&self) -> f64 {
        let n = self.waypoints.len();
        let segs = if self.looped { n } else { n - 1 };
        (0..segs)
            .map(|i| {
                let a = self.waypoints[i];
                let b = self.waypoints[(i + 1) % n];
                math::hypot(b.0 - a.0, b.1 - a.1)
            })
            .sum()
    }
}

/// Progress of an entity along its [`RouteScript`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Motion {
    pub route: RouteScript,
    /// Index of the waypoint the current segment starts from.
    pub segment: usize,
    /// Meters travelled along the current segment.
    pub offset: f64,
    pub heading: f64,
    pub laps: u32,
    pub finished: bool,
}

impl Motion {
    pub fn new(route: RouteScript) -> Self {
        let heading = segment_heading(&route, 0);
        Motion {
            route,
            segment: 0,
            offset: 0.0,
            heading,
            laps: 0,
            finished: false,
        }
    }
}

fn segment_heading(route: &RouteScript, from: usize) -> f64 {
    match route.next_index(from) {
        Some(to) => {
            let a = route.waypoints[from];
            let b = route.waypoints[to];
            if a == b {
                0.0
            } else {
                math::bearing_deg(b.0 - a.0, b.1 - a.1)
            }
        }
        None => 0.0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entity {
    pub id: String,
    pub class: EntityClass,
    pub color: Color,
    pub size_class: SizeClass,
    pub function_tag: String,
    /// Box center.
    pub position: Vec3,
    pub extent: Extent,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub motion: Option<Motion>,
    /// Fire intensity in [0, 1]; present only for `fire_source`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intensity: Option<f64>,
}

impl Entity {
    pub fn validate(&self) -> Result<(), WorldError> {
        let e = self.extent;
        if !(e.width > 0.0 && e.depth > 0.0 && e.height > 0.0) {
            return Err(WorldError::InvalidEntity {
                id: self.id.clone(),
                reason: "extents must be strictly positive",
            });
        }
        let p = self.position;
        if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
            return Err(WorldError::InvalidEntity {
                id: self.id.clone(),
                reason: "position must be finite",
            });
        }
        match (self.class, self.intensity) {
            (EntityClass::FireSource, Some(i)) if (0.0..=1.0).contains(&i) => {}
            (EntityClass::FireSource, _) => {
                return Err(WorldError::InvalidEntity {
                    id: self.id.clone(),
                    reason: "fire_source needs intensity in [0, 1]",
                })
            }
            _ => {}
        }
        if let Some(m) = &self.motion {
            m.route.validate()?;
        }
        Ok(())
    }

    /// Axis-aligned box as (min, max) corners.
    pub fn aabb(&self) -> (Vec3, Vec3) {
        let p = self.position;
        let (hw, hd, hh) = (
            self.extent.width / 2.0,
            self.extent.depth / 2.0,
            self.extent.height / 2.0,
        );
        (
            Vec3::new(p.x - hw, p.y - hd, p.z - hh),
            Vec3::new(p.x + hw, p.y + hd, p.z + hh),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Camera {
    Front,
    Rear,
    Left,
    Right,
    Bottom,
}

impl Camera {
    pub const ALL: [Camera; 5] = [
        Camera::Front,
        Camera::Rear,
        Camera::Left,
        Camera::Right,
        Camera::Bottom,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Camera::Front => "front",
            Camera::Rear => "rear",
            Camera::Left => "left",
            Camera::Right => "right",
            Camera::Bottom => "bottom",
        }
    }

    pub fn parse(s: &str) -> Option<Camera> {
        Camera::ALL.into_iter().find(|c| c.as_str() == s)
    }

    /// Yaw offset of a lateral camera relative to the UAV heading.
    pub(crate) fn yaw_offset(self) -> Option<f64> {
        match self {
            Camera::Front => Some(0.0),
            Camera::Right => Some(90.0),
            Camera::Rear => Some(180.0),
            Camera::Left => Some(270.0),
            Camera::Bottom => None,
        }
    }
}

/// Fixed simulation constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorldConfig {
    /// Horizontal displacement of one `fly` action.
    pub step_horizontal: f64,
    /// Vertical displacement of one `fly` action.
    pub step_vertical: f64,
    pub cruise_altitude: f64,
    pub image_width: u32,
    pub image_height: u32,
    pub hfov_deg: f64,
    /// Entities farther than this are never visible.
    pub max_range: f64,
    /// Near clipping distance for lateral cameras.
    pub near: f64,
    /// Line-of-sight fraction checked for occluders.
    pub occlusion_fraction: f64,
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            step_horizontal: 50.0,
            step_vertical: 10.0,
            cruise_altitude: 50.0,
            image_width: 640,
            image_height: 480,
            hfov_deg: 90.0,
            max_range: 1000.0,
            near: 1.0,
            occlusion_fraction: 0.8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct World {
    pub scenario: Scenario,
    pub entities: Vec<Entity>,
    pub uav: Pose,
    pub active_camera: Camera,
    pub tick: u64,
    pub rng_seed: u64,
    pub config: WorldConfig,
}

/// The ten `fly` directions, relative to the UAV heading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlyDirection {
    Forward,
    Backward,
    Left,
    Right,
    Up,
    Down,
    Upleft,
    Upright,
    Downleft,
    Downright,
}

impl FlyDirection {
    pub const ALL: [FlyDirection; 10] = [
        FlyDirection::Forward,
        FlyDirection::Backward,
        FlyDirection::Left,
        FlyDirection::Right,
        FlyDirection::Up,
        FlyDirection::Down,
        FlyDirection::Upleft,
        FlyDirection::Upright,
        FlyDirection::Downleft,
        FlyDirection::Downright,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FlyDirection::Forward => "forward",
            FlyDirection::Backward => "backward",
            FlyDirection::Left => "left",
            FlyDirection::Right => "right",
            FlyDirection::Up => "up",
            FlyDirection::Down => "down",
            FlyDirection::Upleft => "upleft",
            FlyDirection::Upright => "upright",
            FlyDirection::Downleft => "downleft",
            FlyDirection::Downright => "downright",
        }
    }

    pub fn parse(s: &str) -> Option<FlyDirection> {
        FlyDirection::ALL.into_iter().find(|d| d.as_str() == s)
    }

    /// (forward, right, up) unit components.
    fn components(self) -> (f64, f64, f64) {
        match self {
            FlyDirection::Forward => (1.0, 0.0, 0.0),
            FlyDirection::Backward => (-1.0, 0.0, 0.0),
            FlyDirection::Left => (0.0, -1.0, 0.0),
            FlyDirection::Right => (0.0, 1.0, 0.0),
            FlyDirection::Up => (0.0, 0.0, 1.0),
            FlyDirection::Down => (0.0, 0.0, -1.0),
            FlyDirection::Upleft => (0.0, -1.0, 1.0),
            FlyDirection::Upright => (0.0, 1.0, 1.0),
            FlyDirection::Downleft => (0.0, -1.0, -1.0),
            FlyDirection::Downright => (0.0, 1.0, -1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MotionAction {
    TurnLeft,
    TurnRight,
    Fly { direction: FlyDirection },
    FlyTo { x: f64, y: f64 },
    /// `zoom` is accepted and recorded but has no effect on the camera model.
    SwitchCamera { view: Camera, zoom: Option<f64> },
    Takeoff,
    Land,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MotionOutcome {
    pub ground_contact: bool,
    pub redundant: bool,
}

/// A scripted entity reached a waypoint during [`World::step`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaypointArrival {
    pub entity_id: String,
    pub waypoint: usize,
    pub lap: u32,
    pub tick: u64,
}

impl World {
    pub fn entity(&self, id: &str) -> Option<&Entity> {
        self.entities.iter().find(|e| e.id == id)
    }

    pub fn entity_mut(&mut self, id: &str) -> Option<&mut Entity> {
        self.entities.iter_mut().find(|e| e.id == id)
    }

    /// Applies one UAV command. Never produces `z < 0` or non-finite fields.
    pub fn apply_motion(&mut self, act: MotionAction) -> MotionOutcome {
        let mut out = MotionOutcome::default();
        let cfg = self.config;
        match act {
            MotionAction::TurnLeft => self.uav.yaw = math::wrap_deg(self.uav.yaw - 90.0),
            MotionAction::TurnRight => self.uav.yaw = math::wrap_deg(self.uav.yaw + 90.0),
            MotionAction::Fly { direction } => {
                let (fwd, right, up) = direction.components();
                let yaw = self.uav.yaw;
                let (s, c) = (math::sin_deg(yaw), math::cos_deg(yaw));
                // forward = (sin, cos), right = (cos, -sin)
                let dx = (fwd * s + right * c) * cfg.step_horizontal;
                let dy = (fwd * c - right * s) * cfg.step_horizontal;
                self.uav.x += dx;
                self.uav.y += dy;
                let z = self.uav.z + up * cfg.step_vertical;
                if z < 0.0 {
                    out.ground_contact = true;
                    self.uav.z = 0.0;
                } else {
                    self.uav.z = z;
                }
            }
            MotionAction::FlyTo { x, y } => {
                self.uav.x = x;
                self.uav.y = y;
            }
            MotionAction::SwitchCamera { view, .. } => {
                out.redundant = view == self.active_camera;
                self.active_camera = view;
            }
            MotionAction::Takeoff => {
                out.redundant = self.uav.z > 0.0;
                self.uav.z = cfg.cruise_altitude;
            }
            MotionAction::Land => {
                out.redundant = self.uav.z == 0.0;
                self.uav.z = 0.0;
            }
        }
        out
    }

    /// Advances the clock one tick and moves every scripted entity along its route.
    pub fn step(&mut self) -> Vec<WaypointArrival> {
        self.tick += 1;
        let tick = self.tick;
        let mut arrivals = Vec::new();
        for e in &mut self.entities {
            let Some(m) = e.motion.as_mut() else { continue };
            if m.finished {
                continue;
            }
            let mut remaining = m.route.speed;
            loop {
                let Some(next) = m.route.next_index(m.segment) else {
                    m.finished = true;
                    break;
                };
                let a = m.route.waypoints[m.segment];
                let b = m.route.waypoints[next];
                let seg_len = math::hypot(b.0 - a.0, b.1 - a.1);
                let left = seg_len - m.offset;
                if remaining < left - 1e-9 {
                    m.offset += remaining;
                    break;
                }
                remaining = (remaining - left).max(0.0);
                if next == 0 {
                    m.laps += 1;
                }
                arrivals.push(WaypointArrival {
                    entity_id: e.id.clone(),
                    waypoint: next,
                    lap: m.laps,
                    tick,
                });
                m.segment = next;
                m.offset = 0.0;
                if m.route.next_index(next).is_none() {
                    m.finished = true;
                    break;
                }
                m.heading = segment_heading(&m.route, next);
                if remaining <= 1e-9 {
                    break;
                }
            }
            let (px, py) = motion_position(m);
            e.position.x = px;
            e.position.y = py;
        }
        arrivals
    }
}

fn motion_position(m: &Motion) -> (f64, f64) {
    let a = m.route.waypoints[m.segment];
    match m.route.next_index(m.segment) {
        Some(next) if !m.finished => {
            let b = m.route.waypoints[next];
            let len = math::hypot(b.0 - a.0, b.1 - a.1);
            if len == 0.0 {
                a
            } else {
                let t = m.offset / len;
                (a.0 + (b.0 - a.0) * t, a.1 + (b.1 - a.1) * t)
            }
        }
        _ => a,
    }
}
