use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use dronebench::commands::{self, ServeArgs, StaticArgs};
use dronebench::server::{ADDR_ENV, DEFAULT_ADDR};

#[derive(Parser)]
#[command(name = "dronebench", version, about = "Deterministic UAV agent evaluation harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Serve one episode over HTTP.
    Serve {
        /// Preset name or TaskSpec JSON file.
        #[arg(long, default_value = "cargo_end_to_end")]
        task: String,
        /// SceneSpec JSON replacing the task's scene.
        #[arg(long)]
        scene: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "episode.jsonl")]
        log: PathBuf,
        #[arg(long, env = ADDR_ENV, default_value = DEFAULT_ADDR)]
        addr: String,
        /// Store full world snapshots in the log, not only digests.
        #[arg(long)]
        full_snapshots: bool,
    },
    /// Print a preset TaskSpec (or list the presets).
    Preset {
        name: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Score a sealed log against a rating sheet.
    Score {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        ratings: PathBuf,
        /// EfficiencyParams JSON; defaults to the task's step limit.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a static question set for one scene.
    Genqa {
        /// SceneSpec JSON file or scenario name (cargo_port, urban_fire, tracking).
        #[arg(long)]
        scene: String,
        #[arg(long, default_value = "front")]
        camera: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        per_type: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Answer and score a static dataset.
    RunStatic {
        #[arg(long)]
        data: PathBuf,
        /// Agent URL, or `echo` for the reference-echo agent.
        #[arg(long)]
        agent: String,
        #[arg(long, default_value = "stub")]
        judge: String,
        #[arg(long)]
        judge_url: Option<String>,
        #[arg(long, default_value_t = 4)]
        concurrency: usize,
        #[arg(long, default_value_t = 3)]
        attempts: u32,
        /// Per-request timeout in seconds.
        #[arg(long, default_value_t = 60)]
        timeout: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-simulate a log and verify every event.
    Replay {
        #[arg(long)]
        log: PathBuf,
    },
    /// Rate a log interactively in the terminal.
    Rate {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        rater: String,
        #[arg(long)]
        out: PathBuf,
        /// Directory for rendered PPM frames.
        #[arg(long)]
        frames: Option<PathBuf>,
    },
    /// Rate a log with the ground-truth auto-rater.
    Autorate {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Average several raters' sheets.
    Aggregate {
        #[arg(long)]
        sheets: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let result = match Cli::parse().command {
        Command::Serve {
            task,
            scene,
            seed,
            log,
            addr,
            full_snapshots,
        } => commands::serve_cmd(ServeArgs {
            task,
            scene,
            seed,
            log,
            addr,
            full_snapshots,
        }),
        Command::Preset { name, seed } => commands::preset_cmd(name.as_deref(), seed),
        Command::Score {
            log,
            ratings,
            params,
            out,
        } => commands::score_cmd(&log, &ratings, params.as_deref(), out.as_deref()),
        Command::Genqa {
            scene,
            camera,
            seed,
            per_type,
            out,
        } => commands::genqa_cmd(&scene, &camera, seed, per_type, &out),
        Command::RunStatic {
            data,
            agent,
            judge,
            judge_url,
            concurrency,
            attempts,
            timeout,
            out,
        } => commands::run_static_cmd(StaticArgs {
            data,
            agent,
            judge,
            judge_url,
            concurrency,
            attempts,
            timeout: Duration::from_secs(timeout),
            out,
        }),
        Command::Replay { log } => commands::replay_cmd(&log),
        Command::Rate {
            log,
            rater,
            out,
            frames,
        } => commands::rate_cmd(&log, &rater, &out, frames.as_deref()),
        Command::Autorate { log, out } => commands::autorate_cmd(&log, out.as_deref()),
        Command::Aggregate { sheets, out } => commands::aggregate_cmd(&sheets, out.as_deref()),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::FAILURE
    })
}
