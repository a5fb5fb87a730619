use super::presets;
use super::*;
use crate::world::{Camera, FlyDirection, Pose, RouteScript, RouteSpec};
use alloc::vec;

fn run_oracle(rt: &mut TaskRuntime, world: &mut World, max: usize) {
    for _ in 0..max {
        if rt.terminal != Terminal::Running {
            break;
        }
        let cmd = oracle_command(rt, world);
        rt.advance(cmd, world).unwrap();
    }
}

#[test]
fn cargo_end_to_end_preset_limit() {
    let (rt, world) = TaskRuntime::load(&presets::cargo(TaskMode::EndToEnd, None, 0)).unwrap();
    assert_eq!(rt.spec.overall_step_limit, 25);
    assert_eq!(rt.spec.step_limit(), 25);
    let st = rt.status(&world);
    assert_eq!(st.terminal, Terminal::Running);
    assert_eq!((st.current_stage, st.steps_used), (0, 0));
    assert_eq!(st.cargo_onboard, Some(true));
    assert_eq!(st.fire_intensity, None);
}

#[test]
fn step_by_step_thresholds() {
    let fire = presets::firefighting(TaskMode::StepByStep, Some(0), 0);
    assert_eq!(fire.stage_thresholds, vec![5, 10, 10]);
    let cargo = presets::cargo(TaskMode::StepByStep, Some(2), 0);
    assert_eq!(cargo.stage_thresholds, vec![5, 10, 20]);
    assert_eq!(cargo.step_limit(), 20);
}

#[test]
fn tracking_rejects_step_by_step() {
    let mut spec = presets::tracking(None, 0);
    spec.mode = TaskMode::StepByStep;
    assert_eq!(TaskRuntime::load(&spec).err(), Some(TaskError::UnsupportedMode));
}

#[test]
fn missing_goal_entity_is_an_error() {
    let mut spec = presets::cargo(TaskMode::EndToEnd, None, 0);
    spec.goal_params.target_id = "ghost_ship".into();
    assert_eq!(
        TaskRuntime::load(&spec).err(),
        Some(TaskError::GoalMissing("ghost_ship".into()))
    );
}

#[test]
fn oracle_delivers_cargo_within_eight_steps() {
    let (mut rt, mut world) =
        TaskRuntime::load(&presets::cargo(TaskMode::EndToEnd, None, 0)).unwrap();
    let mut successes = 0;
    for _ in 0..25 {
        if rt.terminal != Terminal::Running {
            break;
        }
        let cmd = oracle_command(&rt, &world);
        let rep = rt.advance(cmd, &mut world).unwrap();
        if rep.terminal == Terminal::Success {
            successes += 1;
        }
    }
    assert_eq!(successes, 1);
    assert_eq!(rt.terminal, Terminal::Success);
    assert_eq!(rt.reason, Some(TerminalReason::Delivered));
    assert!(rt.steps_used <= 8, "{}", rt.steps_used);
    assert_eq!(rt.records.len(), 3);
    assert!(rt.records.iter().all(|r| r.completed));
}

#[test]
fn port_stage_ends_inside_radius() {
    let (mut rt, mut world) =
        TaskRuntime::load(&presets::cargo(TaskMode::EndToEnd, None, 0)).unwrap();
    // hop toward the port in 50 m strides until the stage flips
    world.uav = Pose::new(-2000.0, 400.0, 50.0, 270.0);
    let port = world.entity("bruce_port").unwrap().position;
    for _ in 0..10 {
        rt.advance(
            StepCommand::Motion(MotionAction::Fly {
                direction: FlyDirection::Forward,
            }),
            &mut world,
        )
        .unwrap();
        let d = libm::hypot(world.uav.x - port.x, world.uav.y - port.y);
        if rt.current_stage > 0 {
            assert!(d <= 300.0);
            break;
        }
        assert!(d > 300.0);
    }
    assert_eq!(rt.current_stage, 1);
}

#[test]
fn fire_limit_reached_is_failure_charged_full_budget() {
    let (mut rt, mut world) =
        TaskRuntime::load(&presets::firefighting(TaskMode::EndToEnd, None, 0)).unwrap();
    for _ in 0..25 {
        rt.advance(StepCommand::Motion(MotionAction::TurnLeft), &mut world)
            .unwrap();
    }
    assert_eq!(rt.terminal, Terminal::Failure);
    assert_eq!(rt.reason, Some(TerminalReason::StepLimit));
    assert_eq!(rt.step_task(), 25);
    assert_eq!(rt.steps_used, 25);
}

#[test]
fn terminal_runtime_rejects_actions_unchanged() {
    let (mut rt, mut world) =
        TaskRuntime::load(&presets::cargo(TaskMode::EndToEnd, None, 0)).unwrap();
    run_oracle(&mut rt, &mut world, 25);
    assert_eq!(rt.terminal, Terminal::Success);
    let (rt0, w0) = (rt.clone(), world.clone());
    assert_eq!(
        rt.advance(StepCommand::Motion(MotionAction::TurnLeft), &mut world),
        Err(TaskError::NotRunning)
    );
    assert_eq!(
        rt.advance(
            StepCommand::Tool {
                tool: ToolAction::ReleaseCargo
            },
            &mut world
        ),
        Err(TaskError::NotRunning)
    );
    assert_eq!((rt, world), (rt0, w0));
}

#[test]
fn release_above_vessel_delivers() {
    let (mut rt, mut world) =
        TaskRuntime::load(&presets::cargo(TaskMode::EndToEnd, None, 0)).unwrap();
    let v = world.entity("target_vessel").unwrap().position;
    let top = v.z + world.entity("target_vessel").unwrap().extent.height / 2.0;
    world.uav = Pose::new(v.x, v.y, top + 10.0, 0.0);
    assert_eq!(rt.spec.goal_params.delivery_radius, 15.0);
    let rep = rt
        .advance(
            StepCommand::Tool {
                tool: ToolAction::ReleaseCargo,
            },
            &mut world,
        )
        .unwrap();
    assert_eq!(rep.tool, Some(ToolOutcome::Delivered));
    assert_eq!(rt.terminal, Terminal::Success);
    assert_eq!(rt.status(&world).cargo_onboard, Some(false));
}

#[test]
fn missed_release_consumes_the_only_cargo() {
    let (mut rt, mut world) =
        TaskRuntime::load(&presets::cargo(TaskMode::EndToEnd, None, 0)).unwrap();
    let v = world.entity("target_vessel").unwrap().position;
    world.uav = Pose::new(v.x + 500.0, v.y, 50.0, 0.0);
    let release = StepCommand::Tool {
        tool: ToolAction::ReleaseCargo,
    };
    let rep = rt.advance(release, &mut world).unwrap();
    assert_eq!(rep.tool, Some(ToolOutcome::Missed));
    assert!(!rt.cargo_onboard);
    let before = (rt.clone(), world.clone());
    assert_eq!(rt.advance(release, &mut world), Err(TaskError::NoCargo));
    assert_eq!((rt.clone(), world.clone()), before);
    while rt.terminal == Terminal::Running {
        rt.advance(StepCommand::Motion(MotionAction::TurnRight), &mut world)
            .unwrap();
    }
    assert_eq!(rt.terminal, Terminal::Failure);
    assert_eq!(rt.steps_used, 25);
}

#[test]
fn sprayer_is_unavailable_at_the_port() {
    let (mut rt, mut world) =
        TaskRuntime::load(&presets::cargo(TaskMode::EndToEnd, None, 0)).unwrap();
    let before = (rt.clone(), world.clone());
    assert_eq!(
        rt.advance(
            StepCommand::Tool {
                tool: ToolAction::SprayerOn
            },
            &mut world
        ),
        Err(TaskError::ToolUnavailable)
    );
    assert_eq!((rt, world), before);
}

#[test]
fn four_sprays_extinguish_the_fire() {
    let (mut rt, mut world) =
        TaskRuntime::load(&presets::firefighting(TaskMode::StepByStep, Some(2), 0)).unwrap();
    let spray = StepCommand::Tool {
        tool: ToolAction::SprayerOn,
    };
    let mut seen = vec![];
    for _ in 0..4 {
        rt.advance(spray, &mut world).unwrap();
        seen.push(rt.status(&world).fire_intensity.unwrap());
    }
    assert_eq!(seen, vec![0.75, 0.5, 0.25, 0.0]);
    assert_eq!(rt.terminal, Terminal::Success);
    assert_eq!(rt.status(&world).fire_intensity, Some(0.0));
    assert_eq!(rt.step_task(), 4);
}

#[test]
fn spraying_away_from_the_fire_does_nothing() {
    let (mut rt, mut world) =
        TaskRuntime::load(&presets::firefighting(TaskMode::StepByStep, Some(2), 0)).unwrap();
    world.uav.yaw = 90.0;
    for _ in 0..4 {
        rt.advance(
            StepCommand::Tool {
                tool: ToolAction::SprayerOn,
            },
            &mut world,
        )
        .unwrap();
    }
    assert_eq!(rt.status(&world).fire_intensity, Some(1.0));
}

#[test]
fn oracle_extinguishes_within_ten_steps() {
    let (mut rt, mut world) =
        TaskRuntime::load(&presets::firefighting(TaskMode::EndToEnd, None, 0)).unwrap();
    run_oracle(&mut rt, &mut world, 25);
    assert_eq!(rt.reason, Some(TerminalReason::Extinguished));
    assert!(rt.steps_used <= 10, "{}", rt.steps_used);
}

#[test]
fn step_by_step_stages_start_from_canonical_states() {
    let (rt, world) =
        TaskRuntime::load(&presets::cargo(TaskMode::StepByStep, Some(2), 0)).unwrap();
    assert_eq!(rt.current_stage, 2);
    assert_eq!(rt.steps_used, 0);
    assert_eq!((world.uav.x, world.uav.y, world.uav.yaw), (-2400.0, 400.0, 270.0));
    assert!(observe(&world).contains("target_vessel"));

    for (stage, limit_steps) in [(0usize, 1u32), (1, 1), (2, 2)] {
        let (mut rt, mut world) =
            TaskRuntime::load(&presets::cargo(TaskMode::StepByStep, Some(stage), 0)).unwrap();
        run_oracle(&mut rt, &mut world, 30);
        assert_eq!(rt.terminal, Terminal::Success, "stage {stage}");
        assert_eq!(rt.steps_used, limit_steps, "stage {stage}");
        assert_eq!(rt.records.len(), 1);
        assert_eq!(rt.records[0].stage, stage);
    }
}

#[test]
fn task_complete_while_running_is_failure() {
    let (mut rt, world) =
        TaskRuntime::load(&presets::cargo(TaskMode::EndToEnd, None, 0)).unwrap();
    rt.declare_complete(&world).unwrap();
    assert_eq!(rt.terminal, Terminal::Failure);
    assert_eq!(rt.reason, Some(TerminalReason::Incomplete));
    assert_eq!(rt.step_task(), 25);
    assert_eq!(rt.records.len(), 3);
}

fn drive_vehicle(route: RouteScript, steps: usize) -> Vec<TurnEvent> {
    let mut spec = presets::tracking(Some(RouteSpec::Custom(route)), 0);
    spec.overall_step_limit = 1000;
    spec.goal_params.track_steps = Some(1000);
    spec.goal_params.lose_tolerance = u32::MAX;
    let (mut rt, mut world) = TaskRuntime::load(&spec).unwrap();
    for _ in 0..steps {
        rt.advance(StepCommand::Motion(MotionAction::TurnLeft), &mut world)
            .unwrap();
    }
    rt.turn_points(&world).unwrap()
}

#[test]
fn straight_route_has_no_turns() {
    let route = RouteScript {
        waypoints: vec![(0.0, 0.0), (0.0, 200.0), (0.0, 400.0), (0.0, 600.0)],
        speed: 20.0,
        looped: false,
    };
    assert!(drive_vehicle(route, 40).is_empty());
}

#[test]
fn square_route_turns_four_times_per_lap() {
    let events = drive_vehicle(crate::world::square_route(), 80);
    assert_eq!(events.len(), 8);
    assert_eq!(
        events.iter().map(|e| e.tick).collect::<Vec<_>>(),
        vec![10, 20, 30, 40, 50, 60, 70, 80]
    );
    assert!(events.iter().all(|e| (e.heading_change - 90.0).abs() < 1e-9));
}

#[test]
fn random_route_turns_match_offline_scan() {
    let route = crate::world::route_generate(
        42,
        &crate::world::RoadNetwork::grid(4, 4, 200.0, (0.0, 0.0)),
        crate::world::RouteConfig::default(),
    )
    .unwrap();
    // independent scan: direction vectors of adjacent legs are not parallel
    let mut expected = vec![];
    for i in 1..route.waypoints.len() - 1 {
        let (a, b, c) = (route.waypoints[i - 1], route.waypoints[i], route.waypoints[i + 1]);
        let (ux, uy) = (b.0 - a.0, b.1 - a.1);
        let (vx, vy) = (c.0 - b.0, c.1 - b.1);
        let cos = (ux * vx + uy * vy) / (libm::hypot(ux, uy) * libm::hypot(vx, vy));
        if cos <= libm::cos(45f64.to_radians()) + 1e-12 {
            expected.push(i);
        }
    }
    let steps = (route.length() / route.speed) as usize + 2;
    let events = drive_vehicle(route, steps);
    assert_eq!(events.iter().map(|e| e.waypoint).collect::<Vec<_>>(), expected);
}

#[test]
fn turn_points_need_a_tracking_task() {
    let (rt, world) = TaskRuntime::load(&presets::cargo(TaskMode::EndToEnd, None, 0)).unwrap();
    assert_eq!(rt.turn_points(&world), Err(TaskError::NotTracking));
}

#[test]
fn oracle_tracks_square_route_without_loss() {
    let (mut rt, mut world) =
        TaskRuntime::load(&presets::tracking(Some(RouteSpec::Square), 0)).unwrap();
    assert!(rt.status(&world).target_visible.unwrap());
    run_oracle(&mut rt, &mut world, 60);
    assert_eq!(rt.reason, Some(TerminalReason::Tracked));
    assert_eq!(rt.steps_used, 40);
    assert_eq!(rt.turn_points(&world).unwrap().len(), 4);
}

#[test]
fn losing_the_target_for_three_steps_fails() {
    let (mut rt, mut world) =
        TaskRuntime::load(&presets::tracking(Some(RouteSpec::Square), 0)).unwrap();
    // park far away with nothing in range
    let away = StepCommand::Motion(MotionAction::FlyTo {
        x: 5000.0,
        y: 5000.0,
    });
    rt.advance(away, &mut world).unwrap();
    rt.advance(away, &mut world).unwrap();
    assert_eq!(rt.terminal, Terminal::Running);
    rt.advance(away, &mut world).unwrap();
    assert_eq!(rt.terminal, Terminal::Failure);
    assert_eq!(rt.reason, Some(TerminalReason::TargetLost));
    assert_eq!(rt.status(&world).terminal, Terminal::Failure);
}

#[test]
fn sighting_resets_the_lose_counter() {
    let (mut rt, mut world) =
        TaskRuntime::load(&presets::tracking(Some(RouteSpec::Square), 0)).unwrap();
    let away = StepCommand::Motion(MotionAction::FlyTo {
        x: 5000.0,
        y: 5000.0,
    });
    rt.advance(
        StepCommand::Motion(MotionAction::SwitchCamera {
            view: Camera::Bottom,
            zoom: None,
        }),
        &mut world,
    )
    .unwrap();
    for _ in 0..2 {
        rt.advance(away, &mut world).unwrap();
    }
    let car = world.entity("target_vehicle").unwrap().position;
    rt.advance(
        StepCommand::Motion(MotionAction::FlyTo { x: car.x, y: car.y }),
        &mut world,
    )
    .unwrap();
    for _ in 0..2 {
        rt.advance(away, &mut world).unwrap();
    }
    assert_eq!(rt.terminal, Terminal::Running);
}

mod props {
    use super::*;
    use proptest::prelude::*;

    fn command() -> impl Strategy<Value = StepCommand> {
        prop_oneof![
            Just(StepCommand::Motion(MotionAction::TurnLeft)),
            Just(StepCommand::Motion(MotionAction::TurnRight)),
            (0usize..10).prop_map(|i| StepCommand::Motion(MotionAction::Fly {
                direction: FlyDirection::ALL[i]
            })),
            (-3000.0f64..2000.0, -1000.0f64..1500.0)
                .prop_map(|(x, y)| StepCommand::Motion(MotionAction::FlyTo { x, y })),
            Just(StepCommand::Tool {
                tool: ToolAction::SprayerOn
            }),
            Just(StepCommand::Tool {
                tool: ToolAction::ReleaseCargo
            }),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn stage_and_terminal_invariants(
            fire in any::<bool>(),
            cmds in proptest::collection::vec(command(), 0..40),
        ) {
            let spec = if fire {
                presets::firefighting(TaskMode::EndToEnd, None, 3)
            } else {
                presets::cargo(TaskMode::EndToEnd, None, 3)
            };
            let (mut rt, mut world) = TaskRuntime::load(&spec).unwrap();
            let mut stage = 0;
            let mut steps = 0;
            let mut intensity = 1.0;
            for cmd in cmds {
                let before = (rt.clone(), world.clone());
                match rt.advance(cmd, &mut world) {
                    Ok(_) => {}
                    Err(_) => {
                        prop_assert_eq!((rt.clone(), world.clone()), before);
                        continue;
                    }
                }
                prop_assert!(rt.current_stage >= stage);
                prop_assert!(rt.steps_used >= steps);
                stage = rt.current_stage;
                steps = rt.steps_used;
                if fire {
                    let i = rt.status(&world).fire_intensity.unwrap();
                    prop_assert!(i <= intensity);
                    intensity = i;
                }
                if rt.terminal != Terminal::Running {
                    prop_assert!(rt.steps_used <= rt.spec.overall_step_limit);
                    if rt.terminal == Terminal::Failure {
                        prop_assert_eq!(rt.steps_used, rt.spec.overall_step_limit);
                    }
                }
            }
            if rt.terminal != Terminal::Running {
                // records partition the episode ticks
                prop_assert_eq!(rt.records.len(), 3);
                for pair in rt.records.windows(2) {
                    prop_assert_eq!(pair[0].end_tick, pair[1].start_tick);
                    prop_assert!(pair[0].stage < pair[1].stage);
                }
                prop_assert_eq!(rt.records[0].start_tick, 1);
                prop_assert_eq!(rt.records[2].end_tick, world.tick + 1);
            }
        }
    }
}
