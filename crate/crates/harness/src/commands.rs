//! Implementations behind the `dronebench` subcommands.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use dronebench_core::episodes::{aggregate_ratings, auto_rate, replay, score_episode, RatingError, ReplayError, ScoreError};
use dronebench_core::metrics::StubJudge;
use dronebench_core::staticeval::{generate_for_scene, random_viewpoint, read_dataset, write_dataset, EchoAgent, GenConfig, QType, StaticReport};
use dronebench_core::tasks::presets;
use dronebench_core::world::{Camera, Scenario, SceneSpec};
use dronebench_core::{EfficiencyParams, RatingSheet};

use crate::files::{load_task, read_json, read_log, read_text, write_json, write_text, FileError};
use crate::rate::{rate_interactive, RateError};
use crate::remote::{HttpAgent, RemoteJudge};
use crate::server::{serve, AppState, ServeError, ServerConfig};
use crate::staticrun::run_parallel;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    File(#[from] FileError),
    #[error("replay failed: {0}")]
    Replay(#[from] ReplayError),
    #[error(transparent)]
    Rating(#[from] RatingError),
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error(transparent)]
    Serve(#[from] ServeError),
    #[error(transparent)]
    Rate(#[from] RateError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
}

pub type CliResult = Result<ExitCode, CliError>;

fn emit<T: serde::Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => write_json(p, value)?,
        None => println!("{}", serde_json::to_string_pretty(value).expect("values serialize")),
    }
    Ok(())
}

pub struct ServeArgs {
    pub task: String,
    pub scene: Option<PathBuf>,
    pub seed: Option<u64>,
    pub log: PathBuf,
    pub addr: String,
    pub full_snapshots: bool,
}

pub fn serve_cmd(a: ServeArgs) -> CliResult {
    let spec = load_task(&a.task, a.scene.as_deref(), a.seed)?;
    let app = AppState::new(ServerConfig {
        spec,
        log_path: a.log,
        full_snapshots: a.full_snapshots,
    })?;
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(&a.addr).await?;
        println!("listening on http://{}", listener.local_addr()?);
        std::io::stdout().flush()?;
        serve(listener, app, async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
    })?;
    Ok(ExitCode::SUCCESS)
}

pub fn preset_cmd(name: Option<&str>, seed: u64) -> CliResult {
    let Some(name) = name else {
        presets::PRESET_NAMES.iter().for_each(|n| println!("{n}"));
        return Ok(ExitCode::SUCCESS);
    };
    let spec = presets::by_name(name, seed).ok_or_else(|| CliError::Usage(format!("unknown preset `{name}`")))?;
    emit(&spec, None)?;
    Ok(ExitCode::SUCCESS)
}

pub fn score_cmd(log: &Path, ratings: &Path, params: Option<&Path>, out: Option<&Path>) -> CliResult {
    let log = read_log(log)?;
    let sheet: RatingSheet = read_json(ratings)?;
    let params: Option<EfficiencyParams> = params.map(read_json).transpose()?;
    emit(&score_episode(&log, &sheet, params)?, out)?;
    Ok(ExitCode::SUCCESS)
}

/// A scene file, or a bare scenario name such as `cargo_port`, which gets
/// a seeded viewpoint with something in front of the camera.
fn load_scene(scene: &str, seed: u64) -> Result<SceneSpec, CliError> {
    match Scenario::parse(scene) {
        Some(s) => random_viewpoint(s, seed).map_err(|e| CliError::Usage(format!("scene: {e}"))),
        None => Ok(read_json(Path::new(scene))?),
    }
}

pub fn genqa_cmd(scene: &str, camera: &str, seed: u64, per_type: usize, out: &Path) -> CliResult {
    let camera = Camera::parse(camera).ok_or_else(|| CliError::Usage(format!("unknown camera `{camera}`")))?;
    let spec = load_scene(scene, seed)?;
    let cfg = GenConfig {
        per_type: QType::ALL.iter().map(|&q| (q, per_type)).collect(),
        ..GenConfig::default()
    };
    let generated = generate_for_scene(&spec, camera, seed, &cfg)
        .map_err(|e| CliError::Usage(format!("scene: {e}")))?;
    write_text(out, &write_dataset(&generated.items))?;
    eprintln!("wrote {} items to {}", generated.items.len(), out.display());
    for s in &generated.skipped {
        eprintln!("skipped {}: {}", s.qtype.code(), s.reason);
    }
    Ok(ExitCode::SUCCESS)
}

pub struct StaticArgs {
    pub data: PathBuf,
    pub agent: String,
    pub judge: String,
    pub judge_url: Option<String>,
    pub concurrency: usize,
    pub attempts: u32,
    pub timeout: Duration,
    pub out: Option<PathBuf>,
}

fn print_summary(r: &StaticReport) {
    eprintln!("{:<22} {:>6} {:>7} {:>9} {:>10}", "qtype", "items", "failed", "score", "fmt_err");
    for (q, t) in &r.per_type {
        let fer = t.format_error_rate.map_or("-".into(), |f| format!("{:.1}%", 100.0 * f));
        let q = serde_json::to_value(q).expect("qtypes serialize");
        eprintln!(
            "{:<22} {:>6} {:>7} {:>9.1} {:>10}",
            q.as_str().unwrap_or_default(),
            t.items,
            t.failed,
            t.score,
            fer
        );
    }
}

pub fn run_static_cmd(a: StaticArgs) -> CliResult {
    let items = read_dataset(&read_text(&a.data)?).map_err(|e| FileError::Parse {
        path: a.data.clone(),
        message: format!("line {}: {}", e.line, e.message),
    })?;
    let judge_url = match (a.judge.as_str(), &a.judge_url) {
        ("stub", _) => None,
        ("remote", Some(u)) => Some(u.clone()),
        ("remote", None) => return Err(CliError::Usage("--judge remote needs --judge-url".into())),
        (other, _) => return Err(CliError::Usage(format!("unknown judge `{other}`; use stub or remote"))),
    };
    let (n, k, t) = (a.concurrency, a.attempts, a.timeout);
    let report = match (a.agent.as_str(), judge_url) {
        ("echo", None) => run_parallel(&items, n, k, || EchoAgent, || StubJudge),
        ("echo", Some(j)) => run_parallel(&items, n, k, || EchoAgent, || RemoteJudge::new(&j, t)),
        (url, None) => run_parallel(&items, n, k, || HttpAgent::new(url, t), || StubJudge),
        (url, Some(j)) => run_parallel(&items, n, k, || HttpAgent::new(url, t), || RemoteJudge::new(&j, t)),
    };
    print_summary(&report);
    emit(&report, a.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

pub fn replay_cmd(log: &Path) -> CliResult {
    let t = replay(&read_log(log)?)?;
    let end = match &t.footer {
        Some(f) => format!(
            "terminal {:?}, {} steps used, step_task {}",
            f.terminal, f.steps_used, f.step_task
        ),
        None => "no footer (episode unfinished)".into(),
    };
    println!("verified {} interactions; {end}", t.steps.len());
    Ok(ExitCode::SUCCESS)
}

/// Exit status 3 when the rater stopped early and a draft was saved.
pub fn rate_cmd(log: &Path, rater: &str, out: &Path, frames: Option<&Path>) -> CliResult {
    let t = replay(&read_log(log)?)?;
    let stdin = std::io::stdin();
    let mut input = stdin.lock();
    let mut stdout = std::io::stdout();
    let sheet = rate_interactive(&t, rater, &mut input, &mut stdout, frames)?;
    write_json(out, &sheet)?;
    if sheet.draft {
        eprintln!("session stopped early; draft saved to {} (not usable for scoring)", out.display());
        return Ok(ExitCode::from(3));
    }
    eprintln!("sheet saved to {}", out.display());
    Ok(ExitCode::SUCCESS)
}

pub fn autorate_cmd(log: &Path, out: Option<&Path>) -> CliResult {
    let t = replay(&read_log(log)?)?;
    emit(&auto_rate(&t)?, out)?;
    Ok(ExitCode::SUCCESS)
}

pub fn aggregate_cmd(pattern: &str, out: Option<&Path>) -> CliResult {
    let paths = glob::glob(pattern).map_err(|e| CliError::Usage(format!("bad glob: {e}")))?;
    let mut files: Vec<PathBuf> = paths.filter_map(Result::ok).collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Usage(format!("no sheets match `{pattern}`")));
    }
    let sheets = files.iter().map(|p| read_json(p)).collect::<Result<Vec<RatingSheet>, _>>()?;
    emit(&aggregate_ratings(&sheets)?, out)?;
    Ok(ExitCode::SUCCESS)
}
