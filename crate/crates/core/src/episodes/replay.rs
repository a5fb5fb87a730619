use alloc::string::String;
use alloc::vec::Vec;

use super::{spec_hash, Episode, EpisodeLog, LogEvent, LogFooter, LogHeader, LOG_FORMAT};
use crate::protocol::TEMPLATE_VERSION;
use crate::tasks::{TaskError, TaskRuntime};
use crate::world::World;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReplayError {
    #[error("unsupported log format `{0}`")]
    Format(String),
    #[error("header spec hash does not match the embedded task")]
    SpecHash,
    #[error("log was written with prompt template `{0}`")]
    Template(String),
    #[error("cannot load the task: {0}")]
    Load(TaskError),
    #[error("divergence at tick {tick}: `{field}` differs")]
    Divergence { tick: u64, field: String },
    #[error("stored snapshot at tick {0} does not match its digest")]
    Snapshot(u64),
    #[error("footer differs from the re-simulated outcome")]
    Footer,
}

/// One verified interaction with the states around it.
#[derive(Debug, Clone, PartialEq)]
pub struct StepView {
    pub event: LogEvent,
    pub runtime_before: TaskRuntime,
    pub before: World,
    pub after: World,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub header: LogHeader,
    pub steps: Vec<StepView>,
    pub footer: Option<LogFooter>,
}

fn first_difference(a: &LogEvent, b: &LogEvent) -> String {
    let (va, vb) = (
        serde_json::to_value(a).expect("events serialize"),
        serde_json::to_value(b).expect("events serialize"),
    );
    let keys = [
        "tick",
        "world_tick",
        "stage",
        "observation_digest",
        "prompt_digest",
        "reply",
        "action",
        "outcome",
        "snapshot_digest",
        "snapshot",
    ];
    keys.iter()
        .find(|k| va.get(**k) != vb.get(**k))
        .map_or_else(|| "event".into(), |k| String::from(*k))
}

/// Re-simulates the log from its embedded task and checks every event.
pub fn replay(log: &EpisodeLog) -> Result<Transcript, ReplayError> {
    let h = &log.header;
    if h.format != LOG_FORMAT {
        return Err(ReplayError::Format(h.format.clone()));
    }
    if spec_hash(&h.task) != h.spec_hash {
        return Err(ReplayError::SpecHash);
    }
    if h.template_version != TEMPLATE_VERSION {
        return Err(ReplayError::Template(h.template_version.clone()));
    }
    let mut ep = Episode::start(&h.task, h.full_snapshots).map_err(ReplayError::Load)?;
    let mut steps = Vec::with_capacity(log.events.len());
    for recorded in &log.events {
        if let Some(s) = &recorded.snapshot {
            if s.digest() != recorded.snapshot_digest {
                return Err(ReplayError::Snapshot(recorded.tick));
            }
        }
        let runtime_before = ep.runtime.clone();
        let before = ep.world.clone();
        ep.submit(&recorded.reply).map_err(|_| ReplayError::Divergence {
            tick: recorded.tick,
            field: "terminal".into(),
        })?;
        let produced = ep.log.events.last().expect("submit appends");
        if produced != recorded {
            return Err(ReplayError::Divergence {
                tick: recorded.tick,
                field: first_difference(produced, recorded),
            });
        }
        steps.push(StepView {
            event: recorded.clone(),
            runtime_before,
            before,
            after: ep.world.clone(),
        });
    }
    if ep.log.footer != log.footer {
        return Err(ReplayError::Footer);
    }
    Ok(Transcript {
        header: h.clone(),
        steps,
        footer: log.footer.clone(),
    })
}
