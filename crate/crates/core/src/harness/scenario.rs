use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Rect, Vec2};
use crate::world::{sample_point, ObstacleState, RobotState, WorldParams, WorldState};

use super::{stream_rng, STREAM_LAYOUT};

/// Rejections tolerated before obstacle placement gives up.
pub const MAX_PLACEMENT_REJECTIONS: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("could not place obstacle {placed} of {requested} after {MAX_PLACEMENT_REJECTIONS} rejections")]
    PlacementFailure { placed: usize, requested: usize },
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

/// Everything needed to build an initial world, one per scenario file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub workspace: Rect,
    pub n_obstacles: usize,
    pub obstacle_radius: f64,
    pub robot_radius: f64,
    pub v_max: f64,
    pub omega_max: f64,
    pub obstacle_v_max: f64,
    pub t_s: f64,
    pub reward_high: f64,
    pub step_cap: usize,
    pub seed: u64,
    pub robot_start: Vec2,
    /// Initial heading; `None` faces the goal.
    pub robot_heading: Option<f64>,
    pub goal: Vec2,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            workspace: Rect::new(Vec2::ZERO, Vec2::new(10.0, 10.0)),
            n_obstacles: 40,
            obstacle_radius: 0.2,
            robot_radius: 0.3,
            v_max: 0.3,
            omega_max: 1.9,
            obstacle_v_max: 0.2,
            t_s: 1.0,
            reward_high: 100.0,
            step_cap: 100,
            seed: 0,
            robot_start: Vec2::new(1.0, 1.0),
            robot_heading: None,
            goal: Vec2::new(9.0, 9.0),
        }
    }
}

impl ScenarioConfig {
    pub fn world_params(&self) -> WorldParams {
        WorldParams {
            t_s: self.t_s,
            reward_high: self.reward_high,
            step_cap: self.step_cap,
        }
    }

    /// Obstacle radius grown by the robot radius and one step of obstacle travel.
    pub fn extended_radius(&self) -> f64 {
        self.obstacle_radius + self.robot_radius + self.obstacle_v_max * self.t_s
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let invalid = |msg: &str| Err(ScenarioError::Invalid(msg.to_owned()));
        if self.workspace.is_degenerate() {
            return invalid("workspace must have positive width and height");
        }
        let positive = [
            ("obstacle_radius", self.obstacle_radius),
            ("robot_radius", self.robot_radius),
            ("v_max", self.v_max),
            ("omega_max", self.omega_max),
            ("obstacle_v_max", self.obstacle_v_max),
            ("t_s", self.t_s),
            ("reward_high", self.reward_high),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(ScenarioError::Invalid(format!("{name} must be positive, got {value}")));
            }
        }
        if !self.workspace.contains_disc(self.robot_start, self.robot_radius) {
            return invalid("robot_start must keep the robot inside the workspace");
        }
        if !self.workspace.contains_disc(self.goal, self.robot_radius) {
            return invalid("goal must lie inside the workspace");
        }
        if self.robot_start.distance(self.goal) < self.robot_radius {
            return invalid("robot starts on the goal");
        }
        if self.step_cap == 0 {
            return invalid("step_cap must be at least 1");
        }
        Ok(())
    }
}

/// Random initial world for `seed`: obstacles uniform in the workspace,
/// kept out of the robot's extended ball and off the goal; waypoints uniform.
pub fn generate_scenario(base: &ScenarioConfig, seed: u64) -> Result<WorldState, ScenarioError> {
    base.validate()?;
    let mut rng = stream_rng(seed, STREAM_LAYOUT);
    let clear_start = base.extended_radius();
    let clear_goal = base.robot_radius + base.obstacle_radius;
    let mut obstacles = Vec::with_capacity(base.n_obstacles);
    let mut rejections = 0;
    while obstacles.len() < base.n_obstacles {
        let position = sample_point(&mut rng, &base.workspace, base.obstacle_radius);
        if position.distance(base.robot_start) <= clear_start || position.distance(base.goal) <= clear_goal {
            rejections += 1;
            if rejections > MAX_PLACEMENT_REJECTIONS {
                return Err(ScenarioError::PlacementFailure {
                    placed: obstacles.len(),
                    requested: base.n_obstacles,
                });
            }
            continue;
        }
        let waypoint = sample_point(&mut rng, &base.workspace, base.obstacle_radius);
        obstacles.push(ObstacleState {
            position,
            radius: base.obstacle_radius,
            v_max: base.obstacle_v_max,
            waypoint,
        });
    }
    let heading = base
        .robot_heading
        .unwrap_or_else(|| (base.goal - base.robot_start).angle());
    let robot = RobotState::new(base.robot_start, heading, base.robot_radius, base.v_max, base.omega_max);
    Ok(WorldState::new(robot, obstacles, base.goal, base.workspace))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_scenario() {
        let cfg = ScenarioConfig { n_obstacles: 0, ..ScenarioConfig::default() };
        let world = generate_scenario(&cfg, 1).unwrap();
        assert!(world.obstacles.is_empty());
        assert_eq!(world.step_index, 0);
        assert!((world.robot.heading - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
    }

    #[test]
    fn same_seed_same_world() {
        let cfg = ScenarioConfig::default();
        assert_eq!(generate_scenario(&cfg, 42).unwrap(), generate_scenario(&cfg, 42).unwrap());
        assert_ne!(generate_scenario(&cfg, 42).unwrap(), generate_scenario(&cfg, 43).unwrap());
    }

    #[test]
    fn obstacles_clear_of_robot_extended_ball() {
        let cfg = ScenarioConfig::default();
        for seed in 0..200 {
            let world = generate_scenario(&cfg, seed).unwrap();
            assert_eq!(world.obstacles.len(), 40);
            for o in world.obstacles.iter() {
                assert!(o.position.distance(cfg.robot_start) > 0.7);
                assert!(o.position.distance(cfg.goal) > 0.5);
                assert!(cfg.workspace.contains_disc(o.position, o.radius));
            }
        }
    }

    #[test]
    fn overcrowded_workspace_fails() {
        let cfg = ScenarioConfig {
            workspace: Rect::new(Vec2::ZERO, Vec2::new(2.0, 2.0)),
            robot_start: Vec2::new(1.0, 1.0),
            goal: Vec2::new(1.5, 1.5),
            n_obstacles: 5,
            obstacle_radius: 0.2,
            obstacle_v_max: 2.0,
            ..ScenarioConfig::default()
        };
        assert!(matches!(generate_scenario(&cfg, 0), Err(ScenarioError::PlacementFailure { .. })));
    }

    #[test]
    fn rejects_bad_values() {
        let cfg = ScenarioConfig { robot_radius: 0.0, ..ScenarioConfig::default() };
        assert!(matches!(generate_scenario(&cfg, 0), Err(ScenarioError::Invalid(_))));
        let cfg = ScenarioConfig { goal: Vec2::new(11.0, 5.0), ..ScenarioConfig::default() };
        assert!(matches!(generate_scenario(&cfg, 0), Err(ScenarioError::Invalid(_))));
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = serde_json::from_str::<ScenarioConfig>(r#"{"n_obstacles": 3, "speed": 1}"#);
        assert!(err.is_err());
        let ok: ScenarioConfig = serde_json::from_str(r#"{"n_obstacles": 3}"#).unwrap();
        assert_eq!(ok.n_obstacles, 3);
        assert_eq!(ok.v_max, 0.3);
    }
}
