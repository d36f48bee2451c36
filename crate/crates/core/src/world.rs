//! The navigation MDP: robot and obstacle state, the discrete action set,
//! transitions and the reward.

use std::sync::Arc as Shared;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{angle_diff, normalize_angle, Rect, Vec2};
use crate::vo::{kinematic_arc, SafeVelocitySet, VoObstacle, VoRobot, WallSegment};

/// Heading tolerance when checking an action against the kinematic window.
pub const KINEMATIC_TOL: f64 = 1e-9;

/// Half-width of the heading noise obstacles add to their waypoint bearing.
pub const OBSTACLE_HEADING_NOISE: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WorldError {
    #[error("action {action:?} violates kinematic limits (heading {heading}, max turn {max_turn}, v_max {v_max})")]
    KinematicViolation {
        action: VelocityAction,
        heading: f64,
        max_turn: f64,
        v_max: f64,
    },
    #[error("replay supplied {got} obstacle positions for {expected} obstacles")]
    ReplayLength { expected: usize, got: usize },
}

/// Speed/heading command held for one time step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VelocityAction {
    pub speed: f64,
    pub heading: f64,
}

impl VelocityAction {
    pub fn new(speed: f64, heading: f64) -> Self {
        Self { speed, heading }
    }

    pub fn stop(heading: f64) -> Self {
        Self { speed: 0.0, heading }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub position: Vec2,
    pub heading: f64,
    pub radius: f64,
    pub v_max: f64,
    pub omega_max: f64,
    /// Last command executed, if any.
    pub velocity: Option<VelocityAction>,
}

impl RobotState {
    pub fn new(position: Vec2, heading: f64, radius: f64, v_max: f64, omega_max: f64) -> Self {
        Self {
            position,
            heading: normalize_angle(heading),
            radius,
            v_max,
            omega_max,
            velocity: None,
        }
    }

    pub fn vo(&self) -> VoRobot {
        VoRobot {
            position: self.position,
            heading: self.heading,
            radius: self.radius,
            v_max: self.v_max,
            omega_max: self.omega_max,
        }
    }

    /// True when `action` is reachable from this state within one step.
    pub fn admits(&self, action: &VelocityAction, t_s: f64) -> bool {
        let max_turn = self.omega_max * t_s;
        let turn_ok = 2.0 * max_turn >= std::f64::consts::TAU
            || angle_diff(action.heading, self.heading).abs() <= max_turn + KINEMATIC_TOL;
        turn_ok && action.speed >= 0.0 && action.speed <= self.v_max + KINEMATIC_TOL
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstacleState {
    pub position: Vec2,
    pub radius: f64,
    pub v_max: f64,
    /// Point the obstacle currently drifts toward. Planners never read it.
    pub waypoint: Vec2,
}

impl ObstacleState {
    pub fn vo(&self) -> VoObstacle {
        VoObstacle {
            position: self.position,
            radius: self.radius,
            v_max: self.v_max,
        }
    }
}

/// Full MDP state. Obstacles are shared between a state and its successors
/// until one of them moves, so cloning is cheap under a frozen model.
#[derive(Clone, Debug, PartialEq)]
pub struct WorldState {
    pub robot: RobotState,
    pub obstacles: Shared<[ObstacleState]>,
    pub goal: Vec2,
    pub workspace: Rect,
    pub step_index: usize,
}

impl WorldState {
    pub fn new(robot: RobotState, obstacles: Vec<ObstacleState>, goal: Vec2, workspace: Rect) -> Self {
        Self {
            robot,
            obstacles: obstacles.into(),
            goal,
            workspace,
            step_index: 0,
        }
    }

    pub fn vo_obstacles(&self) -> impl Iterator<Item = VoObstacle> + '_ {
        self.obstacles.iter().map(ObstacleState::vo)
    }

    pub fn workspace_walls(&self) -> Vec<WallSegment> {
        self.workspace
            .edges()
            .iter()
            .map(|&(a, b)| WallSegment { a, b })
            .collect()
    }

    pub fn goal_bearing(&self) -> f64 {
        (self.goal - self.robot.position).angle()
    }

    pub fn goal_distance(&self) -> f64 {
        self.robot.position.distance(self.goal)
    }

    /// Classifies the state itself against the terminal conditions, in
    /// reward priority order.
    pub fn terminal_cause(&self, params: &WorldParams) -> Cause {
        match classify(self) {
            Cause::None if self.step_index >= params.step_cap => Cause::StepLimit,
            cause => cause,
        }
    }

    /// Flat snapshot `[x, y, heading, o0.x, o0.y, o1.x, o1.y, ...]`.
    pub fn snapshot(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(3 + 2 * self.obstacles.len());
        out.extend([self.robot.position.x, self.robot.position.y, self.robot.heading]);
        for o in self.obstacles.iter() {
            out.extend([o.position.x, o.position.y]);
        }
        out
    }
}

/// Step length, terminal reward and episode cap shared by the environment
/// and every planner.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldParams {
    pub t_s: f64,
    pub reward_high: f64,
    pub step_cap: usize,
}

impl Default for WorldParams {
    fn default() -> Self {
        Self {
            t_s: 1.0,
            reward_high: 100.0,
            step_cap: 100,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cause {
    GoalReached,
    OutOfBounds,
    Collision,
    StepLimit,
    None,
}

impl Cause {
    pub fn is_terminal(self) -> bool {
        self != Cause::None
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome {
    pub next_state: WorldState,
    pub reward: f64,
    pub terminal: bool,
    pub cause: Cause,
}

/// How obstacles advance during a transition.
pub enum ObstacleModel<'a> {
    /// Obstacles hold position.
    Frozen,
    /// Obstacles drift toward their waypoints with noise drawn from the stream.
    Stochastic(&'a mut dyn RngCore),
    /// Obstacles jump to recorded positions.
    Replay(&'a [Vec2]),
}

/// Discretized commands: `n_speeds` speeds spanning `[0, v_max]` crossed
/// with `n_angles` headings spanning the kinematic window. Speed-major
/// order, so the first `n_angles` entries are the in-place rotations.
pub fn action_space(robot: &RobotState, t_s: f64, n_speeds: usize, n_angles: usize) -> Vec<VelocityAction> {
    assert!(n_speeds >= 2 && n_angles >= 1, "need at least 2 speeds and 1 heading");
    let window = kinematic_arc(robot.heading, robot.omega_max, t_s);
    let headings: Vec<f64> = if n_angles == 1 {
        vec![robot.heading]
    } else if window.width >= std::f64::consts::TAU {
        (0..n_angles)
            .map(|j| normalize_angle(robot.heading + j as f64 * window.width / n_angles as f64))
            .collect()
    } else {
        let step = window.width / (n_angles - 1) as f64;
        (0..n_angles)
            .map(|j| normalize_angle(robot.heading - window.half_width() + j as f64 * step))
            .collect()
    };
    let mut out = Vec::with_capacity(n_speeds * n_angles);
    for i in 0..n_speeds {
        let speed = robot.v_max * i as f64 / (n_speeds - 1) as f64;
        out.extend(headings.iter().map(|&h| VelocityAction::new(speed, h)));
    }
    out
}

/// Keeps the actions that lie in the safe set. When nothing survives and
/// the safe set pins the speed (escaping an obstacle, or turning in place
/// toward an escape), the centre of each safe arc is offered instead;
/// otherwise the zero-speed actions are returned so the robot can always
/// stop or turn in place.
pub fn restrict_actions(actions: &[VelocityAction], safe: &SafeVelocitySet) -> Vec<VelocityAction> {
    let stationary = || -> Vec<VelocityAction> {
        actions.iter().copied().filter(|a| a.speed == 0.0).collect()
    };
    if safe.is_stationary() {
        return stationary();
    }
    let kept: Vec<VelocityAction> = actions
        .iter()
        .copied()
        .filter(|a| safe.admits_speed(a.speed) && safe.headings.contains(a.heading, KINEMATIC_TOL))
        .collect();
    if !kept.is_empty() {
        kept
    } else if safe.speed_range.0 > 0.0 || safe.speed_range.1 == 0.0 {
        let speed = safe.speed_range.1;
        safe.headings
            .arcs()
            .iter()
            .map(|arc| VelocityAction::new(speed, normalize_angle(arc.center())))
            .collect()
    } else {
        stationary()
    }
}

fn classify(s: &WorldState) -> Cause {
    let p = s.robot.position;
    let r = s.robot.radius;
    if s.goal.distance(p) < r {
        Cause::GoalReached
    } else if !s.workspace.contains_disc(p, r) {
        Cause::OutOfBounds
    } else if s.obstacles.iter().any(|o| o.position.distance(p) < r + o.radius) {
        Cause::Collision
    } else {
        Cause::None
    }
}

/// Reward for landing in `next`; the first matching case wins: goal, out of
/// bounds, collision, then the normalized goal distance penalty.
pub fn reward(
    _state: &WorldState,
    _action: &VelocityAction,
    next: &WorldState,
    reward_high: f64,
    d_max: f64,
) -> (f64, Cause) {
    match classify(next) {
        Cause::GoalReached => (reward_high, Cause::GoalReached),
        Cause::OutOfBounds => (-reward_high, Cause::OutOfBounds),
        Cause::Collision => (-reward_high, Cause::Collision),
        _ => (-next.goal_distance() / d_max, Cause::None),
    }
}

pub fn robot_step(robot: &RobotState, action: &VelocityAction, t_s: f64) -> Result<RobotState, WorldError> {
    if !robot.admits(action, t_s) {
        return Err(WorldError::KinematicViolation {
            action: *action,
            heading: robot.heading,
            max_turn: robot.omega_max * t_s,
            v_max: robot.v_max,
        });
    }
    let heading = normalize_angle(action.heading);
    Ok(RobotState {
        position: robot.position + Vec2::from_angle(heading) * (action.speed * t_s),
        heading,
        velocity: Some(VelocityAction::new(action.speed, heading)),
        ..*robot
    })
}

/// Random-drift obstacle motion: a signed speed uniform in
/// `[-v_max/2, v_max/2]` along the waypoint bearing plus a little heading
/// noise. A new waypoint is drawn once the obstacle gets within its radius.
pub fn obstacle_step<R: Rng + ?Sized>(
    obstacle: &ObstacleState,
    rng: &mut R,
    t_s: f64,
    workspace: &Rect,
) -> ObstacleState {
    let half = 0.5 * obstacle.v_max;
    let speed = rng.gen_range(-half..=half);
    let noise = rng.gen_range(-OBSTACLE_HEADING_NOISE..=OBSTACLE_HEADING_NOISE);
    let heading = (obstacle.waypoint - obstacle.position).angle() + noise;
    let position = obstacle.position + Vec2::from_angle(heading) * (speed * t_s);
    let mut waypoint = obstacle.waypoint;
    if position.distance(waypoint) <= obstacle.radius {
        waypoint = sample_point(rng, workspace, obstacle.radius);
    }
    ObstacleState {
        position,
        waypoint,
        ..*obstacle
    }
}

/// Uniform point whose disc of `margin` fits inside `rect`.
pub fn sample_point<R: Rng + ?Sized>(rng: &mut R, rect: &Rect, margin: f64) -> Vec2 {
    let (x0, x1) = (rect.min.x + margin, rect.max.x - margin);
    let (y0, y1) = (rect.min.y + margin, rect.max.y - margin);
    Vec2::new(
        if x1 > x0 { rng.gen_range(x0..x1) } else { 0.5 * (x0 + x1) },
        if y1 > y0 { rng.gen_range(y0..y1) } else { 0.5 * (y0 + y1) },
    )
}

/// One MDP transition.
pub fn world_step(
    state: &WorldState,
    action: &VelocityAction,
    model: ObstacleModel<'_>,
    params: &WorldParams,
) -> Result<StepOutcome, WorldError> {
    let robot = robot_step(&state.robot, action, params.t_s)?;
    let obstacles: Shared<[ObstacleState]> = match model {
        ObstacleModel::Frozen => state.obstacles.clone(),
        ObstacleModel::Stochastic(rng) => state
            .obstacles
            .iter()
            .map(|o| obstacle_step(o, &mut *rng, params.t_s, &state.workspace))
            .collect(),
        ObstacleModel::Replay(positions) => {
            if positions.len() != state.obstacles.len() {
                return Err(WorldError::ReplayLength {
                    expected: state.obstacles.len(),
                    got: positions.len(),
                });
            }
            state
                .obstacles
                .iter()
                .zip(positions)
                .map(|(o, &position)| ObstacleState { position, ..*o })
                .collect()
        }
    };
    let next_state = WorldState {
        robot,
        obstacles,
        goal: state.goal,
        workspace: state.workspace,
        step_index: state.step_index + 1,
    };
    let d_max = state.workspace.diagonal();
    let (reward, mut cause) = reward(state, action, &next_state, params.reward_high, d_max);
    if cause == Cause::None && next_state.step_index >= params.step_cap {
        cause = Cause::StepLimit;
    }
    Ok(StepOutcome {
        next_state,
        reward,
        terminal: cause.is_terminal(),
        cause,
    })
}
