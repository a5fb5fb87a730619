use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::metrics::{decision_score, perception_score, RatingSheet, StageMarks};
use crate::protocol::WireErrorCode;
use crate::tasks::{presets, TaskMode, TerminalReason};
use crate::world::RouteSpec;
use proptest::prelude::*;

fn oracle_run(spec: &TaskSpec, full: bool) -> Episode {
    run_episode(spec, full, 200, &mut oracle_reply).unwrap()
}

fn cargo() -> TaskSpec {
    presets::cargo(TaskMode::EndToEnd, None, 0)
}

#[test]
fn oracle_logs_are_byte_identical_and_replay() {
    let a = oracle_run(&cargo(), false).log.to_jsonl();
    let b = oracle_run(&cargo(), false).log.to_jsonl();
    assert_eq!(a, b);
    let log = EpisodeLog::from_jsonl(&a).unwrap();
    assert_eq!(log.to_jsonl(), a);
    let t = replay(&log).unwrap();
    assert_eq!(t.steps.len(), log.events.len());
}

#[test]
fn full_snapshots_hash_to_their_digests() {
    let ep = oracle_run(&presets::firefighting(TaskMode::EndToEnd, None, 2), true);
    for e in &ep.log.events {
        assert_eq!(e.snapshot.as_ref().unwrap().digest(), e.snapshot_digest);
    }
    replay(&EpisodeLog::from_jsonl(&ep.log.to_jsonl()).unwrap()).unwrap();
}

#[test]
fn edited_reply_is_caught_at_its_tick() {
    let mut log = oracle_run(&cargo(), false).log;
    log.events[1].reply = String::from(r#"{"action_name": "turn_right"}"#);
    match replay(&log) {
        Err(ReplayError::Divergence { tick, field }) => {
            assert_eq!(tick, 2);
            assert_eq!(field, "action");
        }
        other => panic!("{other:?}"),
    }
    let mut log = oracle_run(&cargo(), false).log;
    log.events[2].snapshot_digest = String::from("0000000000000000");
    assert_eq!(
        replay(&log),
        Err(ReplayError::Divergence {
            tick: 3,
            field: "snapshot_digest".into()
        })
    );
}

#[test]
fn sealed_and_ordered_log() {
    let mut log = oracle_run(&cargo(), false).log;
    let e = log.events[0].clone();
    assert_eq!(log.append(e.clone()), Err(LogError::Sealed));
    log.footer = None;
    assert!(matches!(log.append(e), Err(LogError::OutOfOrder { .. })));
    let text = oracle_run(&cargo(), false).log.to_jsonl();
    let mut lines: Vec<&str> = text.lines().collect();
    lines.swap(1, 2);
    assert!(matches!(
        EpisodeLog::from_jsonl(&lines.join("\n")),
        Err(LogError::OutOfOrder { .. })
    ));
}

#[test]
fn oracle_cargo_scores_high_and_rates_all_100() {
    let ep = oracle_run(&cargo(), false);
    let footer = ep.log.footer.clone().unwrap();
    assert_eq!(footer.reason, Some(TerminalReason::Delivered));
    assert!(footer.step_task <= 8);
    let t = replay(&ep.log).unwrap();
    let sheet = auto_rate(&t).unwrap();
    assert_eq!(sheet.entries.len(), 3);
    assert_eq!(sheet.entries[0].perception, None);
    for e in &sheet.entries {
        assert_eq!(e.decision, Some(100.0), "{}", e.name);
        assert!(e.perception.is_none_or(|p| p == 100.0), "{}", e.name);
    }
    let score = score_episode(&ep.log, &sheet, None).unwrap();
    assert!(score.report.unwrap().score_norm >= 85.0);
    assert_eq!(auto_rate(&t).unwrap(), sheet);
}

#[test]
fn oracle_fire_and_tracking() {
    let fire = oracle_run(&presets::firefighting(TaskMode::EndToEnd, None, 0), false);
    let f = fire.log.footer.clone().unwrap();
    assert_eq!(f.reason, Some(TerminalReason::Extinguished));
    assert!(f.step_task <= 10);
    let sheet = auto_rate(&replay(&fire.log).unwrap()).unwrap();
    assert!(sheet
        .entries
        .iter()
        .all(|e| e.decision == Some(100.0) && e.perception.is_none_or(|p| p == 100.0)));

    let track = oracle_run(&presets::tracking(Some(RouteSpec::Square), 0), false);
    let f = track.log.footer.clone().unwrap();
    assert_eq!(f.reason, Some(TerminalReason::Tracked));
    assert!(!f.turns.is_empty());
    let sheet = auto_rate(&replay(&track.log).unwrap()).unwrap();
    assert_eq!(sheet.entries.len(), f.turns.len());
    assert!(sheet
        .entries
        .iter()
        .all(|e| e.decision == Some(100.0) && e.perception == Some(100.0)));
    let score = score_episode(&track.log, &sheet, None).unwrap();
    assert_eq!(score.tracking_composite, Some(100.0));
}

#[test]
fn step_by_step_oracle_rates_its_stage() {
    for stage in 0..3 {
        let spec = presets::cargo(TaskMode::StepByStep, Some(stage), 0);
        let ep = oracle_run(&spec, false);
        let f = ep.log.footer.clone().unwrap();
        let expect = if stage < 2 {
            TerminalReason::StageComplete
        } else {
            TerminalReason::Delivered
        };
        assert_eq!(f.reason, Some(expect));
        let sheet = auto_rate(&replay(&ep.log).unwrap()).unwrap();
        assert_eq!(sheet.entries.len(), 1);
        assert_eq!(perception_score(&sheet), 100.0);
        assert_eq!(decision_score(&sheet), 100.0);
    }
}

#[test]
fn turning_away_after_sighting_loses_the_decision() {
    let script = [
        r#"{"action_name": "fly_to", "params": {"x": -2400, "y": 400}, "analysis": "to the port"}"#,
        r#"{"action_name": "turn_left", "analysis": "looking for the vessel"}"#,
        r#"{"action_name": "turn_right", "analysis": "the red vessel is in view, but I will look elsewhere"}"#,
        r#"{"action_name": "task_complete"}"#,
    ];
    let mut i = 0;
    let ep = run_episode(&cargo(), false, 10, &mut |_| {
        i += 1;
        String::from(script[i - 1])
    })
    .unwrap();
    let f = ep.log.footer.clone().unwrap();
    assert_eq!(f.reason, Some(TerminalReason::Incomplete));
    let sheet = auto_rate(&replay(&ep.log).unwrap()).unwrap();
    let approach = &sheet.entries[2];
    assert_eq!(approach.name, "Approach the target vessel");
    assert_eq!(approach.decision, Some(0.0));
    assert_eq!(sheet.entries[1].decision, Some(100.0));
    assert_eq!(sheet.entries[1].perception, Some(100.0));
}

#[test]
fn over_limit_agent_is_charged_25_steps() {
    let ep = run_episode(&cargo(), false, 100, &mut |_| {
        String::from(r#"{"action_name": "turn_left"}"#)
    })
    .unwrap();
    let f = ep.log.footer.clone().unwrap();
    assert_eq!(f.reason, Some(TerminalReason::StepLimit));
    assert_eq!(f.step_task, 25);
    assert_eq!(ep.log.events.len(), 25);
    let replayed = replay(&EpisodeLog::from_jsonl(&ep.log.to_jsonl()).unwrap()).unwrap();
    assert_eq!(replayed.footer.unwrap().step_task, 25);
}

#[test]
fn rejections_are_logged_without_using_steps() {
    let mut ep = Episode::start(&cargo(), false).unwrap();
    let i = ep.submit("I think I'll fly west").unwrap();
    assert!(matches!(
        i.outcome,
        ActionOutcome::Rejected { ref error } if error.code == WireErrorCode::ParseFailure
    ));
    let i = ep.submit(r#"{"action_name": "sprayer_on"}"#).unwrap();
    assert!(matches!(
        i.outcome,
        ActionOutcome::Rejected { ref error } if error.code == WireErrorCode::ToolUnavailable
    ));
    assert_eq!(ep.runtime.steps_used, 0);
    assert_eq!(ep.log.events.len(), 2);
    ep.submit(r#"{"action_name": "task_complete"}"#).unwrap();
    let e = ep.submit(r#"{"action_name": "turn_left"}"#).unwrap_err();
    assert_eq!(e.code, WireErrorCode::EpisodeNotRunning);
    assert_eq!(ep.log.events.len(), 3);
    replay(&ep.log).unwrap();
}

fn sheet(rater: &str, per: &[Option<f64>], dec: &[f64]) -> RatingSheet {
    RatingSheet {
        raters: vec![rater.into()],
        draft: false,
        entries: per
            .iter()
            .zip(dec)
            .enumerate()
            .map(|(i, (&p, &d))| StageMarks {
                stage: i,
                name: alloc::format!("s{i}"),
                perception: p,
                decision: Some(d),
            })
            .collect(),
    }
}

#[test]
fn two_raters_are_averaged_per_stage() {
    let a = sheet("a", &[Some(100.0), Some(100.0), Some(0.0)], &[100.0, 100.0, 100.0]);
    let b = sheet("b", &[Some(100.0), Some(0.0), Some(0.0)], &[0.0, 100.0, 100.0]);
    let m = aggregate_ratings(&[a.clone(), b.clone()]).unwrap();
    let per: Vec<Option<f64>> = m.entries.iter().map(|e| e.perception).collect();
    assert_eq!(per, vec![Some(100.0), Some(50.0), Some(0.0)]);
    assert_eq!(m.entries[0].decision, Some(50.0));
    assert_eq!(m.raters, vec![String::from("a"), String::from("b")]);
    assert_eq!(aggregate_ratings(&[a.clone(), a.clone()]).unwrap().entries, a.entries);
    let mut draft = b.clone();
    draft.draft = true;
    assert_eq!(aggregate_ratings(&[a.clone(), draft]), Err(RatingError::Draft));
    let short = sheet("c", &[Some(100.0)], &[100.0]);
    assert_eq!(aggregate_ratings(&[a, short]), Err(RatingError::ShapeMismatch));
}

#[test]
fn rating_session_flow() {
    let ep = oracle_run(&cargo(), false);
    let t = replay(&ep.log).unwrap();
    let mut s = RatingSession::new(&t, "alice").unwrap();
    assert_eq!(s.current().unwrap().name, "Navigate to the port");
    assert_eq!(
        s.record(Some(true), true),
        Err(RatingError::NoPerception("Navigate to the port".into()))
    );
    s.record(None, true).unwrap();
    s.record(Some(true), false).unwrap();
    let draft = s.clone().finish();
    assert!(draft.draft);
    assert_eq!(draft.entries.len(), 2);
    assert!(matches!(score_episode(&ep.log, &draft, None), Err(ScoreError::Rating(RatingError::Draft))));
    s.record(Some(true), true).unwrap();
    assert_eq!(s.record(Some(true), true), Err(RatingError::Finished));
    let done = s.finish();
    assert!(!done.draft);
    assert_eq!(perception_score(&done), 100.0);
    assert!((decision_score(&done) - 200.0 / 3.0).abs() < 1e-12);
}

proptest! {
    #[test]
    fn aggregation_commutes(
        marks in proptest::collection::vec(proptest::collection::vec(any::<(bool, bool)>(), 3), 1..6),
        rot in 0usize..6,
    ) {
        let sheets: Vec<RatingSheet> = marks.iter().enumerate().map(|(r, row)| {
            let per: Vec<Option<f64>> = row.iter().map(|m| Some(if m.0 { 100.0 } else { 0.0 })).collect();
            let dec: Vec<f64> = row.iter().map(|m| if m.1 { 100.0 } else { 0.0 }).collect();
            sheet(&alloc::format!("r{r}"), &per, &dec)
        }).collect();
        let mut rotated = sheets.clone();
        rotated.rotate_left(rot % sheets.len());
        let mut reversed = sheets.clone();
        reversed.reverse();
        let base = aggregate_ratings(&sheets).unwrap();
        prop_assert_eq!(&base, &aggregate_ratings(&rotated).unwrap());
        prop_assert_eq!(&base, &aggregate_ratings(&reversed).unwrap());
        for (i, e) in base.entries.iter().enumerate() {
            let n = marks.len() as f64;
            let brute: f64 = marks.iter().map(|row| if row[i].0 { 100.0 } else { 0.0 }).sum::<f64>() / n;
            prop_assert!((e.perception.unwrap() - brute).abs() < 1e-9);
        }
    }
}
