use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{WireError, WireErrorCode};
use crate::world::{Camera, ClockHour, Color, EntityClass, Observation, Pose, Region, SizeClass};

/// A region as the agent sees it: attributes without the scene id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionView {
    pub index: usize,
    pub class: EntityClass,
    pub color: Color,
    pub size_class: SizeClass,
    pub function_tag: String,
    pub bbox: [u32; 4],
    pub range_m: f64,
    pub clock_hour: ClockHour,
}

impl From<&Region> for RegionView {
    fn from(r: &Region) -> Self {
        RegionView {
            index: r.index,
            class: r.class,
            color: r.color,
            size_class: r.size_class,
            function_tag: r.function_tag.clone(),
            bbox: r.bbox,
            range_m: r.range_m,
            clock_hour: r.clock_hour,
        }
    }
}

/// The JSON sidecar served next to each image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationView {
    pub camera: Camera,
    pub regions: Vec<RegionView>,
    pub tick: u64,
    pub uav_pose: Pose,
}

impl From<&Observation> for ObservationView {
    fn from(o: &Observation) -> Self {
        ObservationView {
            camera: o.camera,
            regions: o.regions.iter().map(RegionView::from).collect(),
            tick: o.tick,
            uav_pose: o.uav_pose,
        }
    }
}

pub fn encode_observation(obs: &Observation) -> String {
    serde_json::to_string(&ObservationView::from(obs)).expect("observation view serializes")
}

pub fn decode_observation(s: &str) -> Result<ObservationView, WireError> {
    serde_json::from_str(s).map_err(|e| WireError::new(WireErrorCode::ParseFailure, e.to_string()))
}
