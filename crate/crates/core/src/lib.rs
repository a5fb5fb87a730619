//! Deterministic harness core for evaluating UAV embodied agents.
//!
//! Everything in this crate is pure computation over owned data: the
//! kinematic world, the mission state machines, the agent wire protocol
//! (prompt builder and tolerant reply parser), the scoring engine, the
//! static question generator and the episode log / replay / rating logic.
//! IO, HTTP and the CLI live in the `dronebench` companion crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod math;

pub mod digest;
pub mod episodes;
pub mod metrics;
pub mod protocol;
pub mod staticeval;
pub mod tasks;
pub mod world;

pub use episodes::{Episode, EpisodeLog};
pub use metrics::{EfficiencyParams, RatingSheet, ScoreReport};
pub use protocol::{AgentAction, WireError, WireErrorCode};
pub use tasks::{TaskKind, TaskMode, TaskRuntime, TaskSpec};
pub use world::{Camera, Entity, Observation, Pose, Region, World};
