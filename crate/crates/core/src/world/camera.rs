use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{Camera, Color, Entity, EntityClass, Pose, SizeClass, Vec3, World, WorldError};
use crate::math;

/// Clock-face hour in 1..=12, 12 being straight ahead.
pub type ClockHour = u8;

/// Relative clock-face direction from the UAV to a horizontal target.
///
/// Exact half hours round clockwise (to the later hour).
pub fn clock_direction(uav: &Pose, target: (f64, f64)) -> Result<ClockHour, WorldError> {
    let dx = target.0 - uav.x;
    let dy = target.1 - uav.y;
    if math::abs(dx) < 1e-9 && math::abs(dy) < 1e-9 {
        return Err(WorldError::DegenerateBearing);
    }
    let rel = math::wrap_deg(math::bearing_deg(dx, dy) - uav.yaw);
    Ok(hour_from_relative(rel))
}

pub(crate) fn hour_from_relative(rel_deg: f64) -> ClockHour {
    // the epsilon absorbs atan2 noise on exact half-hour ties
    let h = math::floor(rel_deg / 30.0 + 0.5 + 1e-9) as i64;
    let h = h.rem_euclid(12);
    if h == 0 {
        12
    } else {
        h as ClockHour
    }
}

/// One labelled image area ("Region k").
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub index: usize,
    pub entity_id: String,
    pub class: EntityClass,
    pub color: Color,
    pub size_class: SizeClass,
    pub function_tag: String,
    /// Pixel rectangle `[x0, y0, x1, y1]`, half-open.
    pub bbox: [u32; 4],
    pub range_m: f64,
    pub clock_hour: ClockHour,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub camera: Camera,
    pub regions: Vec<Region>,
    pub tick: u64,
    pub uav_pose: Pose,
}

impl Observation {
    pub fn contains(&self, entity_id: &str) -> bool {
        self.regions.iter().any(|r| r.entity_id == entity_id)
    }

    pub fn region_of(&self, entity_id: &str) -> Option<&Region> {
        self.regions.iter().find(|r| r.entity_id == entity_id)
    }
}

struct Projected {
    center: (f64, f64),
    half: (f64, f64),
}

fn focal_px(world: &World) -> f64 {
    (f64::from(world.config.image_width) / 2.0) / math::tan_deg(world.config.hfov_deg / 2.0)
}

fn project(world: &World, camera: Camera, e: &Entity) -> Option<Projected> {
    let uav = world.uav;
    let rel = e.position.sub(uav.position());
    let w = f64::from(world.config.image_width);
    let h = f64::from(world.config.image_height);
    match camera.yaw_offset() {
        Some(offset) => {
            let heading = uav.yaw + offset;
            let (s, c) = (math::sin_deg(heading), math::cos_deg(heading));
            let df = rel.x * s + rel.y * c;
            let dr = rel.x * c - rel.y * s;
            if df <= world.config.near {
                return None;
            }
            let f = focal_px(world);
            let u = w / 2.0 + f * dr / df;
            let v = h / 2.0 - f * rel.z / df;
            let r_h = math::hypot(e.extent.width, e.extent.depth) / 2.0;
            Some(Projected {
                center: (u, v),
                half: (f * r_h / df, f * (e.extent.height / 2.0) / df),
            })
        }
        None => {
            let top = e.position.z + e.extent.height / 2.0;
            if top >= uav.z {
                return None;
            }
            let coverage = uav.z.max(1.0) * math::tan_deg(world.config.hfov_deg / 2.0);
            let ppm = (w / 2.0) / coverage;
            let (s, c) = (math::sin_deg(uav.yaw), math::cos_deg(uav.yaw));
            let fwd = rel.x * s + rel.y * c;
            let right = rel.x * c - rel.y * s;
            let (as_, ac) = (math::abs(s), math::abs(c));
            let (ew, ed) = (e.extent.width / 2.0, e.extent.depth / 2.0);
            Some(Projected {
                center: (w / 2.0 + right * ppm, h / 2.0 - fwd * ppm),
                half: ((ac * ew + as_ * ed) * ppm, (as_ * ew + ac * ed) * ppm),
            })
        }
    }
}

fn pixel_span(center: f64, half: f64, limit: u32) -> (u32, u32) {
    let lim = f64::from(limit);
    let lo = math::floor(center - half).clamp(0.0, lim);
    let hi = math::ceil(center + half).clamp(0.0, lim);
    let (mut lo, mut hi) = (lo as u32, hi as u32);
    if hi <= lo {
        if lo >= limit {
            lo = limit - 1;
        }
        hi = lo + 1;
    }
    (lo, hi)
}

/// Slab test: does the segment `p0 + t (p1 - p0)`, `t` in `[0, t_max]`, hit the box?
fn segment_hits_box(p0: Vec3, p1: Vec3, t_max: f64, min: Vec3, max: Vec3) -> bool {
    let d = p1.sub(p0);
    let mut t0 = 0.0f64;
    let mut t1 = t_max;
    for (o, dir, lo, hi) in [
        (p0.x, d.x, min.x, max.x),
        (p0.y, d.y, min.y, max.y),
        (p0.z, d.z, min.z, max.z),
    ] {
        if math::abs(dir) < 1e-12 {
            if o < lo || o > hi {
                return false;
            }
        } else {
            let mut ta = (lo - o) / dir;
            let mut tb = (hi - o) / dir;
            if ta > tb {
                core::mem::swap(&mut ta, &mut tb);
            }
            t0 = t0.max(ta);
            t1 = t1.min(tb);
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

fn occluded(world: &World, target: &Entity) -> bool {
    let p0 = world.uav.position();
    let frac = world.config.occlusion_fraction;
    world.entities.iter().any(|o| {
        if o.id == target.id {
            return false;
        }
        let (min, max) = o.aabb();
        segment_hits_box(p0, target.position, frac, min, max)
    })
}

fn visible_projection(world: &World, camera: Camera, e: &Entity) -> Option<(Projected, f64)> {
    let range = e.position.sub(world.uav.position()).norm();
    if !(range > 0.0) || range > world.config.max_range {
        return None;
    }
    let p = project(world, camera, e)?;
    let (u, v) = p.center;
    let w = f64::from(world.config.image_width);
    let h = f64::from(world.config.image_height);
    if !(u >= 0.0 && u < w && v >= 0.0 && v < h) {
        return None;
    }
    if occluded(world, e) {
        return None;
    }
    Some((p, range))
}

/// Whether `entity_id` is visible through `camera` under the frustum and occlusion rules.
pub fn entity_visible(world: &World, camera: Camera, entity_id: &str) -> bool {
    world
        .entity(entity_id)
        .is_some_and(|e| visible_projection(world, camera, e).is_some())
}

/// Whether the entity is visible through at least one of the five cameras.
pub fn visible_in_any_camera(world: &World, entity_id: &str) -> bool {
    Camera::ALL
        .into_iter()
        .any(|c| entity_visible(world, c, entity_id))
}

/// Projects the scene through the active camera.
pub fn observe(world: &World) -> Observation {
    observe_camera(world, world.active_camera)
}

/// Projects the scene through `camera`; regions are numbered from 1 in the
/// order of their top-left box corner, left to right then top to bottom.
pub fn observe_camera(world: &World, camera: Camera) -> Observation {
    let w = world.config.image_width;
    let h = world.config.image_height;
    let mut regions: Vec<Region> = world
        .entities
        .iter()
        .filter_map(|e| {
            let (p, range) = visible_projection(world, camera, e)?;
            let (x0, x1) = pixel_span(p.center.0, p.half.0, w);
            let (y0, y1) = pixel_span(p.center.1, p.half.1, h);
            // directly-below targets have no bearing; report them dead ahead
            let clock_hour =
                clock_direction(&world.uav, (e.position.x, e.position.y)).unwrap_or(12);
            Some(Region {
                index: 0,
                entity_id: e.id.clone(),
                class: e.class,
                color: e.color,
                size_class: e.size_class,
                function_tag: e.function_tag.clone(),
                bbox: [x0, y0, x1, y1],
                range_m: range,
                clock_hour,
            })
        })
        .collect();
    regions.sort_by(|a, b| {
        (a.bbox[0], a.bbox[1])
            .cmp(&(b.bbox[0], b.bbox[1]))
            .then_with(|| a.entity_id.cmp(&b.entity_id))
    });
    for (i, r) in regions.iter_mut().enumerate() {
        r.index = i + 1;
    }
    Observation {
        camera,
        regions,
        tick: world.tick,
        uav_pose: world.uav,
    }
}
