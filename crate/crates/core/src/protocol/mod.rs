//! Agent wire protocol: action registry, tolerant reply parser, prompt
//! builder, observation codec and the stable error codes.

mod actions;
mod codec;
mod parse;
mod prompt;

use alloc::string::{String, ToString};

use serde::{Deserialize, Serialize};

use crate::tasks::TaskError;
use crate::world::WorldError;

pub use actions::{
    action_spec, to_command, AgentAction, AgentCommand, ActionSpec, ParamKind, ParamSpec,
    ParamValue, ACTIONS,
};
pub use codec::{decode_observation, encode_observation, ObservationView, RegionView};
pub use parse::{parse_agent_reply, parse_and_validate};
pub use prompt::{build_prompt, camera_phrase, PromptContext, TEMPLATE_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WireErrorCode {
    BadAction,
    BadParams,
    EpisodeNotRunning,
    ParseFailure,
    ToolUnavailable,
    NoCargo,
    DegenerateBearing,
    /// Another client holds the episode for mutation.
    Conflict,
}

impl WireErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            WireErrorCode::BadAction => "bad_action",
            WireErrorCode::BadParams => "bad_params",
            WireErrorCode::EpisodeNotRunning => "episode_not_running",
            WireErrorCode::ParseFailure => "parse_failure",
            WireErrorCode::ToolUnavailable => "tool_unavailable",
            WireErrorCode::NoCargo => "no_cargo",
            WireErrorCode::DegenerateBearing => "degenerate_bearing",
            WireErrorCode::Conflict => "conflict",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[error("{}: {message}", code.as_str())]
pub struct WireError {
    pub code: WireErrorCode,
    pub message: String,
}

impl WireError {
    pub fn new(code: WireErrorCode, message: impl Into<String>) -> Self {
        WireError {
            code,
            message: message.into(),
        }
    }
}

impl From<TaskError> for WireError {
    fn from(e: TaskError) -> Self {
        let code = match &e {
            TaskError::NotRunning => WireErrorCode::EpisodeNotRunning,
            TaskError::NoCargo => WireErrorCode::NoCargo,
            TaskError::ToolUnavailable => WireErrorCode::ToolUnavailable,
            TaskError::Scene(WorldError::DegenerateBearing) => WireErrorCode::DegenerateBearing,
            _ => WireErrorCode::BadParams,
        };
        WireError::new(code, e.to_string())
    }
}
