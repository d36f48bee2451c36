//! Goal-biased, ε-greedy action sampling over a (possibly VO-pruned) safe
//! set. Drives MCTS rollouts and the reactive VO planner.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{Arc, AngularIntervalSet};
use crate::vo::{compute_safe_velocities, kinematic_arc, SafeVelocitySet, VoParams};
use crate::world::{action_space, restrict_actions, VelocityAction, WorldState};

/// Discretization of the command space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionGrid {
    pub n_speeds: usize,
    pub n_angles: usize,
}

impl Default for ActionGrid {
    fn default() -> Self {
        Self {
            n_speeds: 5,
            n_angles: 12,
        }
    }
}

/// VO settings as seen by a planner: whether pruning is on, the kernel
/// parameters, and whether the workspace boundary counts as walls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Pruning {
    pub params: VoParams,
    pub workspace_walls: bool,
}

impl Default for Pruning {
    fn default() -> Self {
        Self {
            params: VoParams::default(),
            workspace_walls: true,
        }
    }
}

/// Safe set for `state`: the VO kernel's output when `use_vo`, otherwise the
/// whole kinematic window at any speed.
pub fn safe_set(state: &WorldState, use_vo: bool, pruning: &Pruning, t_s: f64) -> SafeVelocitySet {
    let robot = &state.robot;
    if use_vo {
        let walls = if pruning.workspace_walls {
            state.workspace_walls()
        } else {
            Vec::new()
        };
        compute_safe_velocities(&robot.vo(), state.vo_obstacles(), &walls, t_s, &pruning.params)
    } else {
        SafeVelocitySet {
            headings: AngularIntervalSet::from_arc(kinematic_arc(robot.heading, robot.omega_max, t_s)),
            speed_range: (0.0, robot.v_max),
        }
    }
}

/// Discrete actions admitted by `safe`.
pub fn admissible_actions(state: &WorldState, safe: &SafeVelocitySet, grid: ActionGrid, t_s: f64) -> Vec<VelocityAction> {
    let actions = action_space(&state.robot, t_s, grid.n_speeds, grid.n_angles);
    restrict_actions(&actions, safe)
}

/// With probability `epsilon0` pick a uniform admissible discrete action;
/// otherwise draw a heading uniformly from the goal cone `α_G ± delta`
/// intersected with the safe headings and a speed uniformly from the safe
/// range. An empty goal cone falls back to the uniform branch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GoalBiasedPolicy {
    pub epsilon0: f64,
    pub delta: f64,
    pub use_vo: bool,
    pub grid: ActionGrid,
    pub pruning: Pruning,
}

impl GoalBiasedPolicy {
    pub fn sample<R: Rng + ?Sized>(&self, state: &WorldState, t_s: f64, rng: &mut R) -> VelocityAction {
        let safe = safe_set(state, self.use_vo, &self.pruning, t_s);
        self.sample_from(state, &safe, t_s, rng)
    }

    pub fn sample_from<R: Rng + ?Sized>(
        &self,
        state: &WorldState,
        safe: &SafeVelocitySet,
        t_s: f64,
        rng: &mut R,
    ) -> VelocityAction {
        if rng.gen::<f64>() < self.epsilon0 {
            return self.uniform(state, safe, t_s, rng);
        }
        let cone = AngularIntervalSet::from_arc(Arc::centered(state.goal_bearing(), self.delta));
        match cone.intersection(&safe.headings).sample(rng) {
            Some(heading) => {
                let (lo, hi) = safe.speed_range;
                let speed = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
                VelocityAction::new(speed, heading)
            }
            None => self.uniform(state, safe, t_s, rng),
        }
    }

    fn uniform<R: Rng + ?Sized>(&self, state: &WorldState, safe: &SafeVelocitySet, t_s: f64, rng: &mut R) -> VelocityAction {
        let actions = admissible_actions(state, safe, self.grid, t_s);
        actions[rng.gen_range(0..actions.len())]
    }
}
