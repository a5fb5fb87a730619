use alloc::format;
use alloc::string::{String, ToString};

use super::{
    snapshot_digest, spec_hash, ActionOutcome, EpisodeLog, LogEvent, LogFooter, LogHeader,
    Snapshot, LOG_FORMAT,
};
use crate::digest::{fnv1a64, to_hex};
use crate::protocol::{
    build_prompt, encode_observation, parse_agent_reply, to_command, AgentAction, AgentCommand,
    PromptContext, WireError, WireErrorCode, TEMPLATE_VERSION,
};
use crate::tasks::{oracle_command, TaskError, TaskKind, TaskRuntime, TaskSpec, TaskStatus, Terminal};
use crate::world::{observe, Observation, World};

/// A live episode: runtime, world and the log being written.
#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    pub runtime: TaskRuntime,
    pub world: World,
    pub log: EpisodeLog,
}

/// What one submitted reply did.
#[derive(Debug, Clone, PartialEq)]
pub struct Interaction {
    pub tick: u64,
    pub action: Option<AgentAction>,
    pub outcome: ActionOutcome,
    pub status: TaskStatus,
}

impl Episode {
    pub fn start(spec: &TaskSpec, full_snapshots: bool) -> Result<Episode, TaskError> {
        let (runtime, world) = TaskRuntime::load(spec)?;
        let header = LogHeader {
            format: LOG_FORMAT.into(),
            spec_hash: spec_hash(spec),
            seed: spec.scene.seed,
            mode: spec.mode,
            template_version: TEMPLATE_VERSION.into(),
            task: spec.clone(),
            full_snapshots,
        };
        Ok(Episode {
            runtime,
            world,
            log: EpisodeLog::new(header),
        })
    }

    pub fn is_running(&self) -> bool {
        self.runtime.terminal == Terminal::Running
    }

    pub fn observation(&self) -> Observation {
        observe(&self.world)
    }

    pub fn prompt(&self) -> Result<String, WireError> {
        let ctx = PromptContext::from_task(&self.runtime, &self.world)?;
        build_prompt(&ctx)
    }

    pub fn status(&self) -> TaskStatus {
        self.runtime.status(&self.world)
    }

    /// Parses, validates and applies one verbatim agent reply, logging the
    /// interaction. Only a finished episode refuses the reply unlogged.
    pub fn submit(&mut self, reply: &str) -> Result<Interaction, WireError> {
        if !self.is_running() {
            return Err(WireError::new(
                WireErrorCode::EpisodeNotRunning,
                "episode is not running",
            ));
        }
        let observation_digest = to_hex(fnv1a64(encode_observation(&self.observation()).as_bytes()));
        let prompt_digest = match self.prompt() {
            Ok(p) => to_hex(fnv1a64(p.as_bytes())),
            Err(e) => to_hex(fnv1a64(e.to_string().as_bytes())),
        };
        let stage = self.runtime.current_stage;
        let parsed = parse_agent_reply(reply);
        let action = parsed.as_ref().ok().cloned();
        let outcome = match parsed.and_then(|a| to_command(&a, self.world.active_camera)) {
            Err(error) => ActionOutcome::Rejected { error },
            Ok(AgentCommand::TaskComplete) => match self.runtime.declare_complete(&self.world) {
                Ok(()) => ActionOutcome::Completed,
                Err(e) => ActionOutcome::Rejected { error: e.into() },
            },
            Ok(AgentCommand::Step(cmd)) => {
                // tool rejections leave both runtime and world untouched
                match self.runtime.advance(cmd, &mut self.world) {
                    Ok(report) => ActionOutcome::Accepted { report },
                    Err(e) => ActionOutcome::Rejected { error: e.into() },
                }
            }
        };
        let tick = self.log.last_tick() + 1;
        let snapshot = self.log.header.full_snapshots.then(|| Snapshot {
            world: self.world.clone(),
            runtime: self.runtime.clone(),
        });
        let event = LogEvent {
            tick,
            world_tick: self.world.tick,
            stage,
            observation_digest,
            prompt_digest,
            reply: reply.into(),
            action: action.clone(),
            outcome: outcome.clone(),
            snapshot_digest: snapshot_digest(&self.world, &self.runtime),
            snapshot,
        };
        self.log.append(event).expect("ticks increase and the log is open while running");
        if !self.is_running() {
            let turns = if self.runtime.spec.kind == TaskKind::Tracking {
                self.runtime.turn_points(&self.world).unwrap_or_default()
            } else {
                alloc::vec::Vec::new()
            };
            let footer = LogFooter {
                terminal: self.runtime.terminal,
                reason: self.runtime.reason,
                steps_used: self.runtime.steps_used,
                step_task: self.runtime.step_task(),
                records: self.runtime.records.clone(),
                turns,
            };
            self.log.seal(footer).expect("sealed exactly once");
        }
        Ok(Interaction {
            tick,
            action,
            outcome,
            status: self.status(),
        })
    }
}

/// The ground-truth policy's reply, phrased like an agent would.
pub fn oracle_reply(ep: &Episode) -> String {
    let rt = &ep.runtime;
    let world = &ep.world;
    let gp = &rt.spec.goal_params;
    let cmd = oracle_command(rt, world);
    let name = gp
        .synonyms
        .get(&gp.target_id)
        .and_then(|s| s.first().cloned())
        .or_else(|| world.entity(&gp.target_id).map(|e| e.class.noun().to_string()))
        .unwrap_or_else(|| "target".into());
    let obs = ep.observation();
    let analysis = match obs.region_of(&gp.target_id) {
        Some(r) => format!(
            "The {name} is in Region {} at {} o'clock, about {} m away.",
            r.index,
            r.clock_hour,
            crate::math::round(r.range_m) as i64
        ),
        None if rt.spec.kind != TaskKind::Tracking && rt.current_stage == 0 => {
            let place = gp.landmarks.first().map_or("the goal area", |l| l.name.as_str());
            format!("Heading for {place} first.")
        }
        None => format!("No {name} in view yet, so I keep looking for it."),
    };
    let action = AgentAction::from_command(&cmd).with_analysis(&analysis);
    serde_json::to_string(&action).expect("actions serialize")
}

/// Drives an in-process agent until the episode ends or `max_interactions`
/// replies have been submitted.
pub fn run_episode(
    spec: &TaskSpec,
    full_snapshots: bool,
    max_interactions: usize,
    agent: &mut dyn FnMut(&Episode) -> String,
) -> Result<Episode, TaskError> {
    let mut ep = Episode::start(spec, full_snapshots)?;
    for _ in 0..max_interactions {
        if !ep.is_running() {
            break;
        }
        let reply = agent(&ep);
        // a running episode always accepts a reply for logging
        let _ = ep.submit(&reply);
    }
    Ok(ep)
}
