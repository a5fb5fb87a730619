//! Ground-truth scripted policy. Used to reach canonical step-by-step start
//! states and as the reference agent in tests.

use super::{fire_in_cone, StepCommand, TaskKind, TaskRuntime, ToolAction};
use crate::math;
use crate::world::{observe, Camera, MotionAction, World};

/// Turn toward a target that is not in the active view.
fn search_turn(world: &World, x: f64, y: f64) -> StepCommand {
    let rel = math::wrap_deg(math::bearing_deg(x - world.uav.x, y - world.uav.y) - world.uav.yaw);
    StepCommand::Motion(if rel > 180.0 {
        MotionAction::TurnLeft
    } else {
        MotionAction::TurnRight
    })
}

/// The oracle's next command for the runtime's current stage.
pub fn oracle_command(rt: &TaskRuntime, world: &World) -> StepCommand {
    let gp = &rt.spec.goal_params;
    let target = world.entity(&gp.target_id);
    let anchor = gp.anchor_id.as_deref().and_then(|a| world.entity(a));
    let fly_to = |x: f64, y: f64| StepCommand::Motion(MotionAction::FlyTo { x, y });
    let (tx, ty) = target.map_or((world.uav.x, world.uav.y), |t| (t.position.x, t.position.y));
    match (rt.spec.kind, rt.current_stage) {
        (TaskKind::CargoDelivery, 0) | (TaskKind::Firefighting, 0) if anchor.is_some() => {
            let a = anchor.map(|a| a.position).unwrap_or(world.uav.position());
            if rt.spec.kind == TaskKind::CargoDelivery {
                fly_to(a.x, a.y)
            } else {
                let az = gp.exposed_azimuth;
                let d = gp.approach_standoff;
                fly_to(a.x + d * math::sin_deg(az), a.y + d * math::cos_deg(az))
            }
        }
        (TaskKind::CargoDelivery, 1) => {
            if observe(world).contains(&gp.target_id) {
                fly_to(tx, ty)
            } else {
                search_turn(world, tx, ty)
            }
        }
        (TaskKind::CargoDelivery, _) => {
            if world.uav.horizontal_distance(tx, ty) <= gp.delivery_radius {
                StepCommand::Tool {
                    tool: ToolAction::ReleaseCargo,
                }
            } else {
                fly_to(tx, ty)
            }
        }
        (TaskKind::Firefighting, 1) => search_turn(world, tx, ty),
        (TaskKind::Firefighting, _) => {
            if fire_in_cone(world, gp) || !rt.sprayer_on {
                StepCommand::Tool {
                    tool: ToolAction::SprayerOn,
                }
            } else {
                search_turn(world, tx, ty)
            }
        }
        (TaskKind::Tracking, _) => {
            if world.active_camera != Camera::Bottom {
                StepCommand::Motion(MotionAction::SwitchCamera {
                    view: Camera::Bottom,
                    zoom: None,
                })
            } else {
                fly_to(tx, ty)
            }
        }
    }
}
