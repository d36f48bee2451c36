//! Prunes the discretized command grid with the safe heading set.

use mcts_vo::geometry::{Rect, Vec2};
use mcts_vo::policy::{safe_set, Pruning};
use mcts_vo::world::{action_space, restrict_actions, ObstacleState, RobotState, WorldState};

fn main() {
    let robot = RobotState::new(Vec2::new(5.0, 5.0), 0.0, 0.3, 0.3, 1.9);
    let obstacles = [Vec2::new(5.9, 5.0), Vec2::new(5.3, 5.9)]
        .into_iter()
        .map(|p| ObstacleState { position: p, radius: 0.2, v_max: 0.2, waypoint: p })
        .collect();
    let state = WorldState::new(robot, obstacles, Vec2::new(9.0, 9.0), Rect::new(Vec2::new(0.0, 0.0), Vec2::new(10.0, 10.0)));

    let all = action_space(&state.robot, 1.0, 5, 12);
    let safe = safe_set(&state, true, &Pruning::default(), 1.0);
    let kept = restrict_actions(&all, &safe);
    println!("{} of {} actions survive", kept.len(), all.len());
    for a in &kept {
        println!("  speed {:.3} heading {:+.3}", a.speed, a.heading);
    }
}
