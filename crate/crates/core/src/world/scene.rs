use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    route_generate, Camera, Color, Entity, EntityClass, Extent, Motion, Pose, RoadNetwork,
    RouteConfig, RouteScript, SizeClass, Vec3, World, WorldConfig, WorldError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    CargoPort,
    UrbanFire,
    Tracking,
}

impl Scenario {
    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::CargoPort => "cargo_port",
            Scenario::UrbanFire => "urban_fire",
            Scenario::Tracking => "tracking",
        }
    }

    pub fn parse(s: &str) -> Option<Scenario> {
        [Scenario::CargoPort, Scenario::UrbanFire, Scenario::Tracking]
            .into_iter()
            .find(|sc| sc.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PositionOverride {
    pub x: f64,
    pub y: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
}

/// Per-entity attribute overrides applied on top of a scenario template.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntityOverride {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<PositionOverride>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<Color>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size_class: Option<SizeClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function_tag: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extent: Option<Extent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intensity: Option<f64>,
}

/// Route selection for the tracked vehicle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RouteSpec {
    /// `route_generate(seed, 4x4 grid)`.
    Random,
    /// One block loop with four 90-degree corners.
    Square,
    Custom(RouteScript),
}

/// Scene description file: a scenario template plus overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub scenario: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub overrides: BTreeMap<String, EntityOverride>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub route: Option<RouteSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uav: Option<Pose>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra_entities: Vec<Entity>,
}

impl SceneSpec {
    pub fn new(scenario: Scenario, seed: u64) -> Self {
        SceneSpec {
            scenario: scenario.as_str().to_string(),
            seed,
            overrides: BTreeMap::new(),
            route: None,
            uav: None,
            extra_entities: Vec::new(),
        }
    }
}

pub(crate) const GRID_SPACING: f64 = 200.0;
pub(crate) const GRID_SIZE: usize = 4;

pub(crate) fn tracking_network() -> RoadNetwork {
    RoadNetwork::grid(GRID_SIZE, GRID_SIZE, GRID_SPACING, (0.0, 0.0))
}

/// One block loop with four 90-degree corners, 40 steps per lap.
pub fn square_route() -> RouteScript {
    RouteScript {
        waypoints: vec![(200.0, 200.0), (400.0, 200.0), (400.0, 400.0), (200.0, 400.0)],
        speed: RouteConfig::default().speed,
        looped: true,
    }
}

fn ent(
    id: impl Into<String>,
    class: EntityClass,
    color: Color,
    size: SizeClass,
    function_tag: &str,
    position: Vec3,
    extent: Extent,
) -> Entity {
    Entity {
        id: id.into(),
        class,
        color,
        size_class: size,
        function_tag: function_tag.to_string(),
        position,
        extent,
        motion: None,
        intensity: None,
    }
}

const NON_RED: [Color; 6] = [
    Color::Blue,
    Color::Green,
    Color::White,
    Color::Gray,
    Color::Yellow,
    Color::Orange,
];

fn cargo_port(rng: &mut ChaCha8Rng) -> (Vec<Entity>, Pose) {
    let vessel = Extent::new(30.0, 120.0, 16.0);
    let mut es = vec![
        ent(
            "bruce_port",
            EntityClass::PortMarker,
            Color::Yellow,
            SizeClass::Small,
            "port reference marker",
            Vec3::new(-2400.0, 400.0, 0.25),
            Extent::new(20.0, 20.0, 0.5),
        ),
        ent(
            "target_vessel",
            EntityClass::Vessel,
            Color::Red,
            SizeClass::Large,
            "cargo ship loaded with containers",
            Vec3::new(-2600.0, 350.0, 8.0),
            vessel,
        ),
        ent(
            "vessel_north",
            EntityClass::Vessel,
            NON_RED[rng.random_range(0..NON_RED.len())],
            SizeClass::Large,
            "bulk carrier",
            Vec3::new(-2600.0, 650.0, 8.0),
            vessel,
        ),
        ent(
            "vessel_south",
            EntityClass::Vessel,
            NON_RED[rng.random_range(0..NON_RED.len())],
            SizeClass::Medium,
            "tugboat",
            Vec3::new(-2620.0, 120.0, 4.0),
            Extent::new(10.0, 30.0, 8.0),
        ),
        ent(
            "crane_0",
            EntityClass::Crane,
            Color::Yellow,
            SizeClass::Large,
            "quay crane",
            Vec3::new(-2520.0, 490.0, 25.0),
            Extent::new(10.0, 10.0, 50.0),
        ),
        ent(
            "guanghua_building",
            EntityClass::Building,
            Color::Gray,
            SizeClass::Large,
            "office building",
            Vec3::new(-400.0, -590.0, 40.0),
            Extent::new(60.0, 60.0, 80.0),
        ),
    ];
    let stacks = rng.random_range(6..10usize);
    for i in 0..stacks {
        let x = -2460.0 + 16.0 * i as f64 + rng.random_range(-2.0..2.0);
        let y = 560.0 + rng.random_range(-6.0..6.0);
        es.push(ent(
            format!("container_{i}"),
            EntityClass::Container,
            Color::ALL[rng.random_range(0..Color::ALL.len())],
            SizeClass::Medium,
            "shipping container",
            Vec3::new(x, y, 3.0),
            Extent::new(12.0, 6.0, 6.0),
        ));
    }
    (es, Pose::new(0.0, 0.0, 50.0, 0.0))
}

fn urban_fire(rng: &mut ChaCha8Rng) -> (Vec<Entity>, Pose) {
    let mut es = vec![
        ent(
            "burning_building",
            EntityClass::Building,
            Color::Gray,
            SizeClass::Large,
            "residential tower",
            Vec3::new(1200.0, 800.0, 40.0),
            Extent::new(40.0, 40.0, 80.0),
        ),
        Entity {
            intensity: Some(1.0),
            ..ent(
                "fire_source",
                EntityClass::FireSource,
                Color::Orange,
                SizeClass::Small,
                "open flames on the east facade",
                Vec3::new(1221.0, 800.0, 40.0),
                Extent::new(2.0, 8.0, 8.0),
            )
        },
        ent(
            "fire_truck_0",
            EntityClass::FireTruck,
            Color::Red,
            SizeClass::Medium,
            "fire engine supplying water",
            Vec3::new(1300.0, 700.0, 1.5),
            Extent::new(3.0, 10.0, 3.0),
        ),
        ent(
            "fire_truck_1",
            EntityClass::FireTruck,
            Color::Red,
            SizeClass::Medium,
            "ladder truck",
            Vec3::new(1310.0, 880.0, 1.5),
            Extent::new(3.0, 10.0, 3.0),
        ),
    ];
    let blocks = [(1200.0, 1000.0), (1000.0, 800.0), (1200.0, 600.0), (1000.0, 1000.0)];
    for (i, (x, y)) in blocks.into_iter().enumerate() {
        let h = rng.random_range(30.0..90.0f64);
        es.push(ent(
            format!("building_{i}"),
            EntityClass::Building,
            NON_RED[rng.random_range(0..NON_RED.len())],
            SizeClass::Large,
            "apartment block",
            Vec3::new(x, y, h / 2.0),
            Extent::new(50.0, 50.0, h),
        ));
    }
    (es, Pose::new(0.0, 0.0, 50.0, 0.0))
}

fn tracking(rng: &mut ChaCha8Rng, route: RouteScript) -> (Vec<Entity>, Pose) {
    let net = tracking_network();
    let mut es = Vec::new();
    for (i, &(x, y)) in net.nodes.iter().enumerate() {
        es.push(ent(
            format!("node_{}_{}", i / GRID_SIZE, i % GRID_SIZE),
            EntityClass::RoadNode,
            Color::White,
            SizeClass::Small,
            "road intersection",
            Vec3::new(x, y, 0.1),
            Extent::new(4.0, 4.0, 0.2),
        ));
    }
    for r in 0..GRID_SIZE - 1 {
        for c in 0..GRID_SIZE - 1 {
            let h = rng.random_range(15.0..30.0f64);
            es.push(ent(
                format!("block_{r}_{c}"),
                EntityClass::Building,
                NON_RED[rng.random_range(0..NON_RED.len())],
                SizeClass::Large,
                "commercial building",
                Vec3::new(
                    100.0 + GRID_SPACING * c as f64,
                    100.0 + GRID_SPACING * r as f64,
                    h / 2.0,
                ),
                Extent::new(60.0, 60.0, h),
            ));
        }
    }
    for i in 0..3 {
        let node = net.nodes[rng.random_range(0..net.nodes.len())];
        es.push(ent(
            format!("parked_car_{i}"),
            EntityClass::Vehicle,
            NON_RED[rng.random_range(0..NON_RED.len())],
            SizeClass::Small,
            "parked car",
            Vec3::new(node.0 + 8.0, node.1 + 40.0 + 10.0 * i as f64, 0.75),
            Extent::new(2.0, 4.5, 1.5),
        ));
    }
    let start = route.waypoints[0];
    es.push(Entity {
        motion: Some(Motion::new(route)),
        ..ent(
            "target_vehicle",
            EntityClass::Vehicle,
            Color::Red,
            SizeClass::Medium,
            "tracked sedan",
            Vec3::new(start.0, start.1, 0.75),
            Extent::new(2.0, 4.5, 1.5),
        )
    });
    (es, Pose::new(start.0, start.1 - 80.0, 50.0, 0.0))
}

/// Builds a deterministic world from a scenario template.
pub fn build_scene(spec: &SceneSpec) -> Result<World, WorldError> {
    let scenario = Scenario::parse(&spec.scenario)
        .ok_or_else(|| WorldError::UnknownScenario(spec.scenario.clone()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (mut entities, mut uav) = match scenario {
        Scenario::CargoPort => cargo_port(&mut rng),
        Scenario::UrbanFire => urban_fire(&mut rng),
        Scenario::Tracking => {
            let route = match &spec.route {
                None | Some(RouteSpec::Random) => {
                    route_generate(spec.seed, &tracking_network(), RouteConfig::default())?
                }
                Some(RouteSpec::Square) => square_route(),
                Some(RouteSpec::Custom(r)) => {
                    r.validate()?;
                    r.clone()
                }
            };
            tracking(&mut rng, route)
        }
    };
    for extra in &spec.extra_entities {
        entities.push(extra.clone());
    }
    for (id, ov) in &spec.overrides {
        let e = entities
            .iter_mut()
            .find(|e| &e.id == id)
            .ok_or_else(|| WorldError::UnknownEntity(id.clone()))?;
        if let Some(p) = &ov.position {
            e.position.x = p.x;
            e.position.y = p.y;
            if let Some(z) = p.z {
                e.position.z = z;
            }
        }
        if let Some(c) = ov.color {
            e.color = c;
        }
        if let Some(s) = ov.size_class {
            e.size_class = s;
        }
        if let Some(f) = &ov.function_tag {
            e.function_tag = f.clone();
        }
        if let Some(x) = ov.extent {
            e.extent = x;
        }
        if let Some(i) = ov.intensity {
            e.intensity = Some(i);
        }
    }
    let mut seen = BTreeMap::new();
    for e in &entities {
        if seen.insert(e.id.as_str(), ()).is_some() {
            return Err(WorldError::DuplicateEntity(e.id.clone()));
        }
        e.validate()?;
    }
    if let Some(p) = spec.uav {
        uav = Pose::new(p.x, p.y, p.z, p.yaw);
    }
    Ok(World {
        scenario,
        entities,
        uav,
        active_camera: Camera::Front,
        tick: 0,
        rng_seed: spec.seed,
        config: WorldConfig::default(),
    })
}
