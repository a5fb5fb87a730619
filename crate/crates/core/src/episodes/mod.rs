//! Episode logs, the in-process episode driver, deterministic replay and
//! the rating workflow (auto-rater, interactive sessions, aggregation).

mod driver;
mod rating;
mod replay;

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::digest::{fnv1a64, to_hex};
use crate::protocol::{AgentAction, WireError};
use crate::tasks::{StageRecord, StepReport, TaskMode, TaskRuntime, TaskSpec, Terminal, TerminalReason, TurnEvent};
use crate::world::World;

pub use driver::{oracle_reply, run_episode, Episode, Interaction};
pub use rating::{
    aggregate_ratings, auto_rate, rating_targets, score_episode, Provenance, RatingError,
    RatingSession, RatingTarget, ScoreError, ScoreFile,
};
pub use replay::{replay, ReplayError, StepView, Transcript};

pub const LOG_FORMAT: &str = "dronebench-episode/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogHeader {
    pub format: String,
    pub spec_hash: String,
    pub seed: u64,
    pub mode: TaskMode,
    pub template_version: String,
    /// Stored whole so replay needs nothing but the log.
    pub task: TaskSpec,
    #[serde(default)]
    pub full_snapshots: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ActionOutcome {
    Accepted { report: StepReport },
    /// `task_complete` was declared.
    Completed,
    Rejected { error: WireError },
}

/// Canonical state captured after an interaction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub world: World,
    pub runtime: TaskRuntime,
}

impl Snapshot {
    pub fn digest(&self) -> String {
        snapshot_digest(&self.world, &self.runtime)
    }
}

pub(crate) fn snapshot_digest(world: &World, runtime: &TaskRuntime) -> String {
    #[derive(Serialize)]
    struct View<'a> {
        world: &'a World,
        runtime: &'a TaskRuntime,
    }
    let bytes = serde_json::to_vec(&View { world, runtime }).expect("snapshot serializes");
    to_hex(fnv1a64(&bytes))
}

pub fn spec_hash(spec: &TaskSpec) -> String {
    to_hex(fnv1a64(&serde_json::to_vec(spec).expect("spec serializes")))
}

/// One interaction. `tick` is the interaction sequence number, starting at 1;
/// `world_tick` is the simulation tick after the action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEvent {
    pub tick: u64,
    pub world_tick: u64,
    /// Stage the runtime was in when the reply arrived.
    pub stage: usize,
    pub observation_digest: String,
    pub prompt_digest: String,
    pub reply: String,
    pub action: Option<AgentAction>,
    pub outcome: ActionOutcome,
    pub snapshot_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot: Option<Snapshot>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogFooter {
    pub terminal: Terminal,
    pub reason: Option<TerminalReason>,
    pub steps_used: u32,
    pub step_task: u32,
    pub records: Vec<StageRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub turns: Vec<TurnEvent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LogLine {
    Header(LogHeader),
    Event(LogEvent),
    Footer(LogFooter),
}

impl LogLine {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("log lines serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LogError {
    #[error("log is sealed by its footer")]
    Sealed,
    #[error("event tick {got} does not follow {last}")]
    OutOfOrder { last: u64, got: u64 },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeLog {
    pub header: LogHeader,
    pub events: Vec<LogEvent>,
    pub footer: Option<LogFooter>,
}

impl EpisodeLog {
    pub fn new(header: LogHeader) -> Self {
        EpisodeLog {
            header,
            events: Vec::new(),
            footer: None,
        }
    }

    pub fn last_tick(&self) -> u64 {
        self.events.last().map_or(0, |e| e.tick)
    }

    pub fn append(&mut self, event: LogEvent) -> Result<(), LogError> {
        if self.footer.is_some() {
            return Err(LogError::Sealed);
        }
        let last = self.last_tick();
        if event.tick <= last {
            return Err(LogError::OutOfOrder {
                last,
                got: event.tick,
            });
        }
        self.events.push(event);
        Ok(())
    }

    pub fn seal(&mut self, footer: LogFooter) -> Result<(), LogError> {
        if self.footer.is_some() {
            return Err(LogError::Sealed);
        }
        self.footer = Some(footer);
        Ok(())
    }

    pub fn lines(&self) -> Vec<LogLine> {
        let mut v = Vec::with_capacity(self.events.len() + 2);
        v.push(LogLine::Header(self.header.clone()));
        v.extend(self.events.iter().cloned().map(LogLine::Event));
        if let Some(f) = &self.footer {
            v.push(LogLine::Footer(f.clone()));
        }
        v
    }

    pub fn to_jsonl(&self) -> String {
        let mut s = String::new();
        for l in self.lines() {
            s.push_str(&l.to_json());
            s.push('\n');
        }
        s
    }

    /// Parses a log, enforcing the same ordering and sealing rules as
    /// [`EpisodeLog::append`].
    pub fn from_jsonl(text: &str) -> Result<Self, LogError> {
        let mut log: Option<EpisodeLog> = None;
        for (i, raw) in text.lines().enumerate() {
            if raw.trim().is_empty() {
                continue;
            }
            let bad = |message: String| LogError::Malformed {
                line: i + 1,
                message,
            };
            let line: LogLine = serde_json::from_str(raw).map_err(|e| bad(e.to_string()))?;
            match (line, log.as_mut()) {
                (LogLine::Header(h), None) => log = Some(EpisodeLog::new(h)),
                (LogLine::Header(_), Some(_)) => return Err(bad("second header".into())),
                (_, None) => return Err(bad("missing header".into())),
                (LogLine::Event(e), Some(l)) => l.append(e)?,
                (LogLine::Footer(f), Some(l)) => l.seal(f)?,
            }
        }
        log.ok_or(LogError::Malformed {
            line: 0,
            message: "empty log".into(),
        })
    }
}

#[cfg(test)]
mod tests;
