//! File formats: task and scene specs, episode logs, sheets and reports.

use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};

use dronebench_core::episodes::{LogLine, LOG_FORMAT};
use dronebench_core::tasks::presets;
use dronebench_core::world::SceneSpec;
use dronebench_core::{EpisodeLog, TaskSpec};
use serde::de::DeserializeOwned;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Invalid(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> FileError + '_ {
    move |source| FileError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn read_text(path: &Path) -> Result<String, FileError> {
    fs::read_to_string(path).map_err(io_err(path))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), FileError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(path, text).map_err(io_err(path))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, FileError> {
    serde_json::from_str(&read_text(path)?).map_err(|e| FileError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), FileError> {
    let mut text = serde_json::to_string_pretty(value).expect("values serialize");
    text.push('\n');
    write_text(path, &text)
}

/// `task` is a preset name or a TaskSpec file. A scene file replaces the
/// task's scene, and `seed` overrides the scene seed either way.
pub fn load_task(task: &str, scene: Option<&Path>, seed: Option<u64>) -> Result<TaskSpec, FileError> {
    let mut spec = match presets::by_name(task, seed.unwrap_or(0)) {
        Some(s) => s,
        None => read_json(Path::new(task))?,
    };
    if let Some(path) = scene {
        spec.scene = read_json::<SceneSpec>(path)?;
    }
    if let Some(seed) = seed {
        spec.scene.seed = seed;
    }
    spec.validate()
        .map_err(|e| FileError::Invalid(format!("task `{task}`: {e}")))?;
    Ok(spec)
}

pub fn read_log(path: &Path) -> Result<EpisodeLog, FileError> {
    EpisodeLog::from_jsonl(&read_text(path)?).map_err(|e| FileError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Appends log lines as the in-memory log grows, flushing after each one.
#[derive(Debug)]
pub struct LogWriter {
    path: PathBuf,
    file: File,
    events: usize,
    sealed: bool,
}

impl LogWriter {
    /// Truncates `path` and writes the header.
    pub fn create(path: &Path, log: &EpisodeLog) -> Result<Self, FileError> {
        debug_assert_eq!(log.header.format, LOG_FORMAT);
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
        let file = File::create(path).map_err(io_err(path))?;
        let mut w = LogWriter {
            path: path.to_path_buf(),
            file,
            events: 0,
            sealed: false,
        };
        w.line(&LogLine::Header(log.header.clone()))?;
        w.sync(log)?;
        Ok(w)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn line(&mut self, l: &LogLine) -> Result<(), FileError> {
        let mut s = l.to_json();
        s.push('\n');
        self.file.write_all(s.as_bytes()).map_err(io_err(&self.path))?;
        self.file.flush().map_err(io_err(&self.path))
    }

    /// Writes whatever `log` gained since the last call.
    pub fn sync(&mut self, log: &EpisodeLog) -> Result<(), FileError> {
        while self.events < log.events.len() {
            self.line(&LogLine::Event(log.events[self.events].clone()))?;
            self.events += 1;
        }
        if let (Some(f), false) = (&log.footer, self.sealed) {
            self.line(&LogLine::Footer(f.clone()))?;
            self.sealed = true;
        }
        Ok(())
    }
}

/// Path of the `n`-th episode written by one server: `run.jsonl`,
/// `run.1.jsonl`, `run.2.jsonl`, ...
pub fn numbered_log_path(base: &Path, n: u32) -> PathBuf {
    if n == 0 {
        return base.to_path_buf();
    }
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}.{n}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{n}"),
    };
    base.with_file_name(name)
}
