use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;

use serde::{Deserialize, Serialize, Serializer};

use super::{WireError, WireErrorCode};
use crate::tasks::{StepCommand, ToolAction};
use crate::world::{Camera, FlyDirection, MotionAction};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Bool(bool),
    Number(f64),
    Text(String),
}

impl Serialize for ParamValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ParamValue::Bool(b) => s.serialize_bool(*b),
            // whole numbers go out as integers, so `100` stays `100`
            ParamValue::Number(x) if crate::math::floor(*x) == *x && crate::math::abs(*x) < 9.0e15 => {
                s.serialize_i64(*x as i64)
            }
            ParamValue::Number(x) => s.serialize_f64(*x),
            ParamValue::Text(t) => s.serialize_str(t),
        }
    }
}

impl ParamValue {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            ParamValue::Number(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            ParamValue::Text(t) => Some(t),
            _ => None,
        }
    }
}

/// The agent's reply as it travels on the wire.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentAction {
    pub action_name: String,
    #[serde(default)]
    pub params: BTreeMap<String, ParamValue>,
    #[serde(default)]
    pub analysis: String,
}

impl AgentAction {
    pub fn new(name: &str) -> Self {
        AgentAction {
            action_name: name.into(),
            params: BTreeMap::new(),
            analysis: String::new(),
        }
    }

    pub fn with(mut self, key: &str, value: ParamValue) -> Self {
        self.params.insert(key.into(), value);
        self
    }

    pub fn with_analysis(mut self, text: &str) -> Self {
        self.analysis = text.into();
        self
    }

    /// Wire form of an engine command.
    pub fn from_command(cmd: &StepCommand) -> Self {
        match *cmd {
            StepCommand::Motion(m) => match m {
                MotionAction::TurnLeft => AgentAction::new("turn_left"),
                MotionAction::TurnRight => AgentAction::new("turn_right"),
                MotionAction::Fly { direction } => AgentAction::new("fly")
                    .with("direction", ParamValue::Text(direction.as_str().into())),
                MotionAction::FlyTo { x, y } => AgentAction::new("fly_to")
                    .with("x", ParamValue::Number(x))
                    .with("y", ParamValue::Number(y)),
                MotionAction::SwitchCamera { view, zoom } => {
                    let a = AgentAction::new("switch_camera")
                        .with("view", ParamValue::Text(view.as_str().into()));
                    match zoom {
                        Some(z) => a.with("zoom", ParamValue::Number(z)),
                        None => a,
                    }
                }
                MotionAction::Takeoff => AgentAction::new("takeoff"),
                MotionAction::Land => AgentAction::new("land"),
            },
            StepCommand::Tool { tool } => AgentAction::new(match tool {
                ToolAction::ReleaseCargo => "release_cargo",
                ToolAction::SprayerOn => "sprayer_on",
                ToolAction::SprayerOff => "sprayer_off",
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Number,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ParamKind,
    pub required: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActionSpec {
    pub name: &'static str,
    pub params: &'static [ParamSpec],
    /// One-line description used in the prompt.
    pub help: &'static str,
}

const fn num(name: &'static str, required: bool) -> ParamSpec {
    ParamSpec {
        name,
        kind: ParamKind::Number,
        required,
    }
}

const fn text(name: &'static str, required: bool) -> ParamSpec {
    ParamSpec {
        name,
        kind: ParamKind::Text,
        required,
    }
}

pub const ACTIONS: &[ActionSpec] = &[
    ActionSpec {
        name: "turn_left",
        params: &[],
        help: "turn_left: rotate the heading 90 degrees counter-clockwise in place.",
    },
    ActionSpec {
        name: "turn_right",
        params: &[],
        help: "turn_right: rotate the heading 90 degrees clockwise in place.",
    },
    ActionSpec {
        name: "fly",
        params: &[text("direction", true)],
        help: "fly {\"direction\": d}: move one fixed step; d is forward, backward, left, right, \
               up, down, upleft, upright, downleft or downright.",
    },
    ActionSpec {
        name: "fly_to",
        params: &[num("x", true), num("y", true)],
        help: "fly_to {\"x\": x, \"y\": y}: fly straight to the horizontal point (x, y) at the \
               current altitude, keeping the current heading.",
    },
    ActionSpec {
        name: "switch_camera",
        params: &[text("view", false), num("zoom", false)],
        help: "switch_camera {\"view\": v}: use camera v (front, rear, left, right or bottom); \
               without a view it toggles between front and bottom.",
    },
    ActionSpec {
        name: "takeoff",
        params: &[],
        help: "takeoff: climb back to cruise altitude.",
    },
    ActionSpec {
        name: "land",
        params: &[],
        help: "land: descend to the ground.",
    },
    ActionSpec {
        name: "release_cargo",
        params: &[],
        help: "release_cargo: drop the carried cargo straight down.",
    },
    ActionSpec {
        name: "sprayer_on",
        params: &[],
        help: "sprayer_on: start the forward water sprayer.",
    },
    ActionSpec {
        name: "sprayer_off",
        params: &[],
        help: "sprayer_off: stop the sprayer.",
    },
    ActionSpec {
        name: "task_complete",
        params: &[],
        help: "task_complete: declare the task finished.",
    },
];

pub fn action_spec(name: &str) -> Option<&'static ActionSpec> {
    ACTIONS.iter().find(|a| a.name == name)
}

/// A validated reply: either a world-stepping command or the completion claim.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AgentCommand {
    Step(StepCommand),
    TaskComplete,
}

fn camera_alias(s: &str) -> Option<Camera> {
    let s = s.trim().to_ascii_lowercase();
    Camera::parse(&s).or(match s.as_str() {
        "forward" | "front_view" => Some(Camera::Front),
        "back" | "backward" | "rear_view" => Some(Camera::Rear),
        "down" | "downward" | "bottom_view" | "downward_view" => Some(Camera::Bottom),
        _ => None,
    })
}

fn bad_params(msg: String) -> WireError {
    WireError::new(WireErrorCode::BadParams, msg)
}

/// Validates an action against the registry. `active` resolves a bare
/// `switch_camera` toggle.
pub fn to_command(a: &AgentAction, active: Camera) -> Result<AgentCommand, WireError> {
    let spec = action_spec(&a.action_name).ok_or_else(|| {
        WireError::new(
            WireErrorCode::BadAction,
            format!("unknown action `{}`", a.action_name),
        )
    })?;
    for (k, v) in &a.params {
        let p = spec
            .params
            .iter()
            .find(|p| p.name == k)
            .ok_or_else(|| bad_params(format!("`{}` takes no parameter `{k}`", spec.name)))?;
        let ok = match p.kind {
            ParamKind::Number => v.as_number().is_some_and(f64::is_finite),
            ParamKind::Text => v.as_text().is_some(),
        };
        if !ok {
            return Err(bad_params(format!("parameter `{k}` has the wrong type")));
        }
    }
    if let Some(missing) = spec
        .params
        .iter()
        .find(|p| p.required && !a.params.contains_key(p.name))
    {
        return Err(bad_params(format!(
            "`{}` needs parameter `{}`",
            spec.name, missing.name
        )));
    }
    let number = |k: &str| a.params.get(k).and_then(ParamValue::as_number);
    let text = |k: &str| a.params.get(k).and_then(ParamValue::as_text);
    let motion = |m| Ok(AgentCommand::Step(StepCommand::Motion(m)));
    let tool = |tool| Ok(AgentCommand::Step(StepCommand::Tool { tool }));
    match spec.name {
        "turn_left" => motion(MotionAction::TurnLeft),
        "turn_right" => motion(MotionAction::TurnRight),
        "fly" => {
            let d = text("direction").unwrap_or_default();
            let direction = FlyDirection::parse(&d.trim().to_ascii_lowercase())
                .ok_or_else(|| bad_params(format!("unknown direction `{d}`")))?;
            motion(MotionAction::Fly { direction })
        }
        "fly_to" => motion(MotionAction::FlyTo {
            x: number("x").unwrap_or_default(),
            y: number("y").unwrap_or_default(),
        }),
        "switch_camera" => {
            let view = match text("view") {
                Some(v) => camera_alias(v).ok_or_else(|| bad_params(format!("unknown view `{v}`")))?,
                None if active == Camera::Bottom => Camera::Front,
                None => Camera::Bottom,
            };
            motion(MotionAction::SwitchCamera {
                view,
                zoom: number("zoom"),
            })
        }
        "takeoff" => motion(MotionAction::Takeoff),
        "land" => motion(MotionAction::Land),
        "release_cargo" => tool(ToolAction::ReleaseCargo),
        "sprayer_on" => tool(ToolAction::SprayerOn),
        "sprayer_off" => tool(ToolAction::SprayerOff),
        _ => Ok(AgentCommand::TaskComplete),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_registered_action_validates_with_its_params() {
        for spec in ACTIONS {
            let mut a = AgentAction::new(spec.name);
            for p in spec.params.iter().filter(|p| p.required) {
                let v = match (p.kind, p.name) {
                    (ParamKind::Text, _) => ParamValue::Text("forward".into()),
                    (ParamKind::Number, _) => ParamValue::Number(10.0),
                };
                a = a.with(p.name, v);
            }
            assert!(to_command(&a, Camera::Front).is_ok(), "{}", spec.name);
        }
    }

    #[test]
    fn unknown_action_and_param_rejected() {
        let e = to_command(&AgentAction::new("barrel_roll"), Camera::Front).unwrap_err();
        assert_eq!(e.code, WireErrorCode::BadAction);
        let extra = AgentAction::new("turn_left").with("deg", ParamValue::Number(30.0));
        assert_eq!(to_command(&extra, Camera::Front).unwrap_err().code, WireErrorCode::BadParams);
        let missing = AgentAction::new("fly_to").with("x", ParamValue::Number(1.0));
        assert_eq!(to_command(&missing, Camera::Front).unwrap_err().code, WireErrorCode::BadParams);
        let wrong = AgentAction::new("fly").with("direction", ParamValue::Text("sideways".into()));
        assert_eq!(to_command(&wrong, Camera::Front).unwrap_err().code, WireErrorCode::BadParams);
        let nan = AgentAction::new("fly_to")
            .with("x", ParamValue::Number(f64::NAN))
            .with("y", ParamValue::Number(0.0));
        assert_eq!(to_command(&nan, Camera::Front).unwrap_err().code, WireErrorCode::BadParams);
    }

    #[test]
    fn bare_switch_toggles() {
        let a = AgentAction::new("switch_camera");
        let to = |cam| match to_command(&a, cam).unwrap() {
            AgentCommand::Step(StepCommand::Motion(MotionAction::SwitchCamera { view, .. })) => view,
            other => panic!("{other:?}"),
        };
        assert_eq!(to(Camera::Front), Camera::Bottom);
        assert_eq!(to(Camera::Bottom), Camera::Front);
        let down = a.with("view", ParamValue::Text("downward".into()));
        assert!(matches!(
            to_command(&down, Camera::Front).unwrap(),
            AgentCommand::Step(StepCommand::Motion(MotionAction::SwitchCamera {
                view: Camera::Bottom,
                ..
            }))
        ));
    }

    #[test]
    fn from_command_round_trips_through_validation() {
        let cmds = [
            StepCommand::Motion(MotionAction::FlyTo { x: -2400.0, y: 400.0 }),
            StepCommand::Motion(MotionAction::Fly {
                direction: FlyDirection::Upleft,
            }),
            StepCommand::Motion(MotionAction::SwitchCamera {
                view: Camera::Left,
                zoom: Some(2.0),
            }),
            StepCommand::Tool {
                tool: ToolAction::SprayerOff,
            },
        ];
        for c in cmds {
            let a = AgentAction::from_command(&c);
            assert_eq!(to_command(&a, Camera::Front).unwrap(), AgentCommand::Step(c));
        }
    }

    #[test]
    fn whole_numbers_serialize_as_integers() {
        let a = AgentAction::new("fly_to")
            .with("x", ParamValue::Number(100.0))
            .with("y", ParamValue::Number(-2.5));
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(
            s,
            r#"{"action_name":"fly_to","params":{"x":100,"y":-2.5},"analysis":""}"#
        );
    }
}
