//! Terminal step-through rating over a verified transcript.

use std::io::{BufRead, Write};
use std::path::Path;

use dronebench_core::episodes::{ActionOutcome, RatingSession, RatingTarget, StepView, Transcript};
use dronebench_core::world::{observe, rasterize};
use dronebench_core::RatingSheet;

use crate::files::FileError;

#[derive(Debug, thiserror::Error)]
pub enum RateError {
    #[error(transparent)]
    Rating(#[from] dronebench_core::episodes::RatingError),
    #[error("terminal io: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    File(#[from] FileError),
}

enum Answer {
    Yes,
    No,
    Quit,
}

fn ask(input: &mut dyn BufRead, out: &mut dyn Write, question: &str) -> Result<Answer, RateError> {
    loop {
        write!(out, "{question} [y/n, q to stop] ")?;
        out.flush()?;
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            writeln!(out)?;
            return Ok(Answer::Quit);
        }
        match line.trim().to_ascii_lowercase().as_str() {
            "y" | "yes" | "1" => return Ok(Answer::Yes),
            "n" | "no" | "0" => return Ok(Answer::No),
            "q" | "quit" => return Ok(Answer::Quit),
            _ => writeln!(out, "please answer y or n")?,
        }
    }
}

fn show_step(out: &mut dyn Write, step: &StepView, frames: Option<&Path>) -> Result<(), RateError> {
    let e = &step.event;
    let obs = observe(&step.before);
    writeln!(out, "-- interaction {} (world tick {}) --", e.tick, e.world_tick)?;
    write!(out, "camera: {}", obs.camera.as_str())?;
    if let Some(dir) = frames {
        let w = &step.before;
        let img = rasterize(&obs, w.scenario, w.config.image_width, w.config.image_height);
        let path = dir.join(format!("interaction-{:03}.ppm", e.tick));
        std::fs::create_dir_all(dir).map_err(|source| FileError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        std::fs::write(&path, img.to_ppm()).map_err(|source| FileError::Io {
            path: path.clone(),
            source,
        })?;
        write!(out, "  frame: {}", path.display())?;
    }
    writeln!(out)?;
    if obs.regions.is_empty() {
        writeln!(out, "  nothing in view")?;
    }
    for r in &obs.regions {
        writeln!(
            out,
            "  Region {}: {} {} {}, {} o'clock, {:.0} m",
            r.index,
            r.size_class.as_str(),
            r.color.as_str(),
            r.class.noun(),
            r.clock_hour,
            r.range_m
        )?;
    }
    writeln!(out, "reply: {}", e.reply.trim())?;
    match &e.outcome {
        ActionOutcome::Accepted { .. } => writeln!(out, "outcome: accepted")?,
        ActionOutcome::Completed => writeln!(out, "outcome: task_complete declared")?,
        ActionOutcome::Rejected { error } => writeln!(out, "outcome: REJECTED {error}")?,
    }
    Ok(())
}

fn show_target(out: &mut dyn Write, t: &Transcript, target: &RatingTarget, frames: Option<&Path>) -> Result<(), RateError> {
    let done = if target.completed { "completed" } else { "not completed" };
    writeln!(out, "\n== {} (stage {}, {done}) ==", target.name, target.stage)?;
    if target.ticks.is_empty() {
        writeln!(out, "no interactions in this stage")?;
    }
    for tick in &target.ticks {
        if let Some(step) = t.steps.iter().find(|s| s.event.tick == *tick) {
            show_step(out, step, frames)?;
        }
    }
    Ok(())
}

/// Runs the session to completion or until the rater stops (q or end of
/// input), in which case the sheet comes back as a draft.
pub fn rate_interactive(
    t: &Transcript,
    rater: &str,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    frames: Option<&Path>,
) -> Result<RatingSheet, RateError> {
    let mut session = RatingSession::new(t, rater)?;
    while let Some(target) = session.current().cloned() {
        show_target(out, t, &target, frames)?;
        let perception = if target.has_perception {
            match ask(input, out, "perception correct?")? {
                Answer::Yes => Some(true),
                Answer::No => Some(false),
                Answer::Quit => break,
            }
        } else {
            writeln!(out, "(no perception process in this stage)")?;
            None
        };
        let decision = match ask(input, out, "decision correct?")? {
            Answer::Yes => true,
            Answer::No => false,
            Answer::Quit => break,
        };
        session.record(perception, decision)?;
    }
    Ok(session.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use dronebench_core::episodes::{oracle_reply, replay, run_episode};
    use dronebench_core::metrics::{decision_score, perception_score};
    use dronebench_core::tasks::presets;

    fn transcript() -> Transcript {
        let spec = presets::by_name("cargo_end_to_end", 0).unwrap();
        let ep = run_episode(&spec, false, 40, &mut oracle_reply).unwrap();
        replay(&ep.log).unwrap()
    }

    fn run(input: &str) -> (RatingSheet, String) {
        let t = transcript();
        let mut out = Vec::new();
        let sheet = rate_interactive(&t, "alice", &mut input.as_bytes(), &mut out, None).unwrap();
        (sheet, String::from_utf8(out).unwrap())
    }

    #[test]
    fn all_correct_gives_full_marks() {
        let (sheet, text) = run(&"y\n".repeat(20));
        assert!(!sheet.draft);
        assert_eq!(sheet.raters, ["alice"]);
        assert_eq!(perception_score(&sheet), 100.0);
        assert_eq!(decision_score(&sheet), 100.0);
        assert!(text.contains("reply: {"));
        assert!(text.contains("no perception process"));
    }

    #[test]
    fn garbage_reprompts_and_no_counts() {
        // stage 0 only asks for a decision
        let (sheet, text) = run("maybe\nn\ny\ny\ny\ny\n");
        assert!(text.contains("please answer y or n"));
        assert!(!sheet.draft);
        assert_eq!(sheet.entries[0].decision, Some(0.0));
        assert_eq!(decision_score(&sheet), 200.0 / 3.0);
    }

    #[test]
    fn stopping_early_leaves_a_draft() {
        let (sheet, _) = run("y\nq\n");
        assert!(sheet.draft);
        assert_eq!(sheet.entries.len(), 1);
        let (eof, _) = run("");
        assert!(eof.draft);
        assert!(eof.entries.is_empty());
    }
}
