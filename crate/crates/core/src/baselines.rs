//! Reactive single-step baselines: a VO planner that samples one
//! goal-biased safe command, and a dynamic-window planner that scores every
//! command on the discrete grid.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{angle_diff, point_segment_distance};
use crate::policy::{ActionGrid, GoalBiasedPolicy, Pruning};
use crate::world::{action_space, VelocityAction, WorldState};

/// One-shot goal-biased sample from the VO-pruned safe set.
pub fn vo_planner_decide<R: Rng + ?Sized>(
    state: &WorldState,
    rng: &mut R,
    epsilon0: f64,
    delta: f64,
    grid: ActionGrid,
    pruning: Pruning,
    t_s: f64,
) -> VelocityAction {
    let policy = GoalBiasedPolicy {
        epsilon0,
        delta,
        use_vo: true,
        grid,
        pruning,
    };
    policy.sample(state, t_s, rng)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DwaConfig {
    pub w_goal: f64,
    pub w_clear: f64,
    pub w_vel: f64,
    /// Clearance beyond this many meters scores the same as this.
    pub clearance_cap: f64,
    pub grid: ActionGrid,
}

impl Default for DwaConfig {
    fn default() -> Self {
        Self {
            w_goal: 1.0,
            w_clear: 0.5,
            w_vel: 0.3,
            clearance_cap: 1.0,
            grid: ActionGrid::default(),
        }
    }
}

/// Score of every grid action; `None` marks actions whose one-step path
/// hits an obstacle (at its current position) or leaves the workspace.
pub fn dwa_scores(state: &WorldState, cfg: &DwaConfig, t_s: f64) -> Vec<(VelocityAction, Option<f64>)> {
    let robot = &state.robot;
    let p = robot.position;
    action_space(robot, t_s, cfg.grid.n_speeds, cfg.grid.n_angles)
        .into_iter()
        .map(|a| {
            let end = p + crate::geometry::Vec2::from_angle(a.heading) * (a.speed * t_s);
            let hits = state
                .obstacles
                .iter()
                .any(|o| point_segment_distance(o.position, p, end) < robot.radius + o.radius);
            if hits || !state.workspace.contains_disc(end, robot.radius) {
                return (a, None);
            }
            let to_goal = state.goal - end;
            let heading_score = if to_goal.norm() < robot.radius {
                1.0
            } else {
                1.0 - angle_diff(to_goal.angle(), a.heading).abs() / std::f64::consts::PI
            };
            let clearance = state
                .obstacles
                .iter()
                .map(|o| end.distance(o.position) - robot.radius - o.radius)
                .fold(cfg.clearance_cap, f64::min)
                .max(0.0);
            let clear_score = if cfg.clearance_cap > 0.0 { clearance / cfg.clearance_cap } else { 1.0 };
            let speed_score = if robot.v_max > 0.0 { a.speed / robot.v_max } else { 0.0 };
            let score = cfg.w_goal * heading_score + cfg.w_clear * clear_score + cfg.w_vel * speed_score;
            (a, Some(score))
        })
        .collect()
}

/// Highest-scoring collision-free grid action, first index on ties; stops in
/// place when every action collides.
pub fn dwa_decide(state: &WorldState, cfg: &DwaConfig, t_s: f64) -> VelocityAction {
    let mut best: Option<(VelocityAction, f64)> = None;
    for (a, score) in dwa_scores(state, cfg, t_s) {
        if let Some(s) = score {
            if best.map_or(true, |(_, b)| s > b) {
                best = Some((a, s));
            }
        }
    }
    best.map_or(VelocityAction::stop(state.robot.heading), |(a, _)| a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Rect, Vec2};
    use crate::world::{ObstacleState, RobotState};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn world(heading: f64, obstacles: Vec<ObstacleState>, goal: Vec2) -> WorldState {
        WorldState::new(
            RobotState::new(Vec2::new(5.0, 5.0), heading, 0.3, 0.3, 1.9),
            obstacles,
            goal,
            Rect::new(Vec2::ZERO, Vec2::new(10.0, 10.0)),
        )
    }

    fn obstacle(x: f64, y: f64) -> ObstacleState {
        ObstacleState { position: Vec2::new(x, y), radius: 0.2, v_max: 0.2, waypoint: Vec2::new(x, y) }
    }

    #[test]
    fn dwa_empty_scene_goes_full_speed_toward_goal() {
        let state = world(0.3, vec![], Vec2::new(9.0, 6.0));
        let chosen = dwa_decide(&state, &DwaConfig::default(), 1.0);
        let goal_bearing = state.goal_bearing();
        let grid = action_space(&state.robot, 1.0, 5, 12);
        let nearest = grid[..12]
            .iter()
            .map(|a| a.heading)
            .min_by(|a, b| angle_diff(*a, goal_bearing).abs().total_cmp(&angle_diff(*b, goal_bearing).abs()))
            .unwrap();
        assert_eq!(chosen.speed, 0.3);
        assert_eq!(chosen.heading, nearest);
    }

    #[test]
    fn dwa_excludes_blocked_forward_action() {
        // Obstacle centered 0.7 ahead: inside r_R + r_i + v_max·t_s = 0.8.
        let state = world(0.0, vec![obstacle(5.7, 5.0)], Vec2::new(9.0, 5.0));
        let scores = dwa_scores(&state, &DwaConfig { grid: ActionGrid { n_speeds: 5, n_angles: 11 }, ..DwaConfig::default() }, 1.0);
        let forward = scores
            .iter()
            .find(|(a, _)| a.speed == 0.3 && a.heading.abs() < 1e-12)
            .unwrap();
        assert!(forward.1.is_none());
        let chosen = dwa_decide(&state, &DwaConfig::default(), 1.0);
        assert!(chosen.heading.abs() > 0.1 || chosen.speed < 0.3);
    }

    #[test]
    fn dwa_all_blocked_stops() {
        let ring: Vec<ObstacleState> = (0..16)
            .map(|k| {
                let a = k as f64 * std::f64::consts::TAU / 16.0;
                obstacle(5.0 + 0.45 * a.cos(), 5.0 + 0.45 * a.sin())
            })
            .collect();
        let state = world(0.0, ring, Vec2::new(9.0, 5.0));
        assert_eq!(dwa_decide(&state, &DwaConfig::default(), 1.0), VelocityAction::stop(0.0));
    }

    #[test]
    fn dwa_mirror_symmetric_scene() {
        // Goal straight ahead along heading 0; obstacles mirrored about the x axis.
        let state = world(0.0, vec![obstacle(6.0, 5.4), obstacle(6.0, 4.6)], Vec2::new(9.0, 5.0));
        let cfg = DwaConfig::default();
        let scores = dwa_scores(&state, &cfg, 1.0);
        let chosen = dwa_decide(&state, &cfg, 1.0);
        let score_of = |heading: f64, speed: f64| {
            scores
                .iter()
                .find(|(a, _)| (a.heading - heading).abs() < 1e-9 && a.speed == speed)
                .and_then(|(_, s)| *s)
        };
        let own = score_of(chosen.heading, chosen.speed).unwrap();
        let mirrored = score_of(-chosen.heading, chosen.speed).unwrap();
        assert!((own - mirrored).abs() < 1e-9);
    }

    #[test]
    fn vo_planner_empty_scene_stays_in_goal_cone() {
        let state = world(0.0, vec![], Vec2::new(9.0, 7.0));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let bearing = state.goal_bearing();
        for _ in 0..500 {
            let a = vo_planner_decide(&state, &mut rng, 0.0, 1.0, ActionGrid::default(), Pruning::default(), 1.0);
            assert!(angle_diff(a.heading, bearing).abs() <= 1.0 + 1e-12);
            assert!(state.robot.admits(&a, 1.0));
        }
    }

    #[test]
    fn vo_planner_inside_case_stops() {
        let state = world(0.0, vec![obstacle(5.5, 5.0)], Vec2::new(9.0, 5.0));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for eps in [0.0, 0.2, 1.0] {
            let a = vo_planner_decide(&state, &mut rng, eps, 1.0, ActionGrid::default(), Pruning::default(), 1.0);
            assert_eq!(a.speed, 0.0);
        }
    }
}
