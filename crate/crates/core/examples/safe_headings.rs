//! Safe heading sets for a robot between two moving obstacles and a wall.

use mcts_vo::geometry::Vec2;
use mcts_vo::vo::{compute_safe_velocities, ConeMode, VoObstacle, VoParams, VoRobot, WallSegment};

fn main() {
    let robot = VoRobot {
        position: Vec2::new(2.0, 2.0),
        heading: 0.0,
        radius: 0.3,
        v_max: 0.3,
        omega_max: 1.9,
    };
    let obstacles = [
        VoObstacle { position: Vec2::new(2.8, 2.1), radius: 0.2, v_max: 0.2 },
        VoObstacle { position: Vec2::new(2.3, 1.1), radius: 0.2, v_max: 0.2 },
    ];
    let walls = [WallSegment::new(Vec2::new(1.0, 3.0), Vec2::new(4.0, 3.0)).expect("non-degenerate wall")];

    for (name, cone) in [("reach-limited", ConeMode::ReachLimited), ("tangent", ConeMode::Tangent)] {
        let params = VoParams { cone, ..VoParams::default() };
        let safe = compute_safe_velocities(&robot, obstacles, &walls, 1.0, &params);
        println!("{name} cones: speeds {:?}", safe.speed_range);
        for arc in safe.headings.arcs() {
            println!("  [{:+.3}, {:+.3}] rad", arc.start, arc.end());
        }
    }

    // Inside an obstacle's reach the robot either stops or flees at full speed.
    let cornered = VoRobot { heading: std::f64::consts::PI, ..robot };
    let close = VoObstacle { position: Vec2::new(2.55, 2.0), radius: 0.2, v_max: 0.2 };
    let safe = compute_safe_velocities(&cornered, [close], &[], 1.0, &VoParams::default());
    println!("escape: speeds {:?}, headings {:?}", safe.speed_range, safe.headings.arcs());
}
