//! IO companion to `dronebench-core`: the HTTP server, file formats, remote
//! agent and judge clients, the rating terminal and the CLI commands.

pub mod commands;
pub mod files;
pub mod rate;
pub mod remote;
pub mod server;
pub mod staticrun;
