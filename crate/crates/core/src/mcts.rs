//! UCT planner with optional velocity-obstacle pruning inside the tree,
//! inside rollouts, or both.
//!
//! One call to [`plan`] builds a fresh tree rooted at the current state,
//! runs exactly `simulations` simulations and returns the root action with
//! the highest mean discounted return. Tree depth and rollout steps share a
//! single depth budget.

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::policy::{admissible_actions, safe_set, ActionGrid, GoalBiasedPolicy, Pruning};
use crate::world::{
    sample_point, world_step, ObstacleModel, ObstacleState, StepOutcome, VelocityAction, WorldParams,
    WorldState,
};

/// Where VO pruning is applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Plain,
    VoTree,
    VoRollout,
    VoBoth,
}

impl Variant {
    pub fn vo_in_tree(self) -> bool {
        matches!(self, Variant::VoTree | Variant::VoBoth)
    }

    pub fn vo_in_rollout(self) -> bool {
        matches!(self, Variant::VoRollout | Variant::VoBoth)
    }
}

/// How the planner imagines obstacles moving during lookahead.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanningModel {
    /// Obstacles hold their observed positions.
    #[default]
    Frozen,
    /// Obstacles drift toward waypoints the planner draws itself.
    Stochastic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlannerConfig {
    pub simulations: usize,
    pub gamma: f64,
    pub c_p: f64,
    pub epsilon0: f64,
    pub delta: f64,
    pub depth_cap: usize,
    pub variant: Variant,
    pub grid: ActionGrid,
    pub planning_model: PlanningModel,
    pub pruning: Pruning,
    pub world: WorldParams,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        let world = WorldParams::default();
        Self {
            simulations: 100,
            gamma: 0.7,
            c_p: 0.5 * world.reward_high,
            epsilon0: 0.2,
            delta: 1.0,
            depth_cap: 100,
            variant: Variant::VoTree,
            grid: ActionGrid::default(),
            planning_model: PlanningModel::Frozen,
            pruning: Pruning::default(),
            world,
        }
    }
}

impl PlannerConfig {
    pub fn rollout_policy(&self) -> GoalBiasedPolicy {
        GoalBiasedPolicy {
            epsilon0: self.epsilon0,
            delta: self.delta,
            use_vo: self.variant.vo_in_rollout(),
            grid: self.grid,
            pruning: self.pruning,
        }
    }

    /// Actions the tree may branch on at `state`.
    pub fn tree_actions(&self, state: &WorldState) -> Vec<VelocityAction> {
        let safe = safe_set(state, self.variant.vo_in_tree(), &self.pruning, self.world.t_s);
        admissible_actions(state, &safe, self.grid, self.world.t_s)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ActionStats {
    pub visits: u32,
    pub mean_return: f64,
}

#[derive(Clone, Debug)]
pub struct SearchNode {
    pub state: WorldState,
    pub terminal: bool,
    pub visit_count: u32,
    /// Admissible actions, fixed when the node is created.
    pub actions: Vec<VelocityAction>,
    pub stats: Vec<ActionStats>,
    /// Reward observed on the transition into each child.
    pub rewards: Vec<f64>,
    pub children: Vec<Option<usize>>,
}

impl SearchNode {
    pub fn new(state: WorldState, terminal: bool, actions: Vec<VelocityAction>) -> Self {
        let n = actions.len();
        Self {
            state,
            terminal,
            visit_count: 0,
            actions,
            stats: vec![ActionStats::default(); n],
            rewards: vec![0.0; n],
            children: vec![None; n],
        }
    }
}

/// Arena-backed search tree; node 0 is the root.
#[derive(Clone, Debug, Default)]
pub struct SearchTree {
    pub nodes: Vec<SearchNode>,
}

/// UCB1 over the node's admissible actions. Unvisited actions come first,
/// picked uniformly among themselves; otherwise the highest bound wins with
/// ties going to the lower index.
pub fn uct_select<R: Rng + ?Sized>(node: &SearchNode, c_p: f64, rng: &mut R) -> usize {
    let unvisited: Vec<usize> = (0..node.stats.len()).filter(|&i| node.stats[i].visits == 0).collect();
    if !unvisited.is_empty() {
        return unvisited[rng.gen_range(0..unvisited.len())];
    }
    let log_n = f64::from(node.visit_count.max(1)).ln();
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (i, s) in node.stats.iter().enumerate() {
        let score = s.mean_return + 2.0 * c_p * (log_n / f64::from(s.visits)).sqrt();
        if score > best_score {
            best = i;
            best_score = score;
        }
    }
    best
}

/// Propagates a simulation's rewards from the leaf back to the root.
/// `path` holds `(node, action index, reward)` in root-to-leaf order and
/// `tail` is the rollout return from below the leaf.
pub fn backup(tree: &mut SearchTree, path: &[(usize, usize, f64)], tail: f64, gamma: f64) {
    let mut ret = tail;
    for &(node, action, reward) in path.iter().rev() {
        ret = reward + gamma * ret;
        let n = &mut tree.nodes[node];
        let s = &mut n.stats[action];
        s.visits += 1;
        s.mean_return += (ret - s.mean_return) / f64::from(s.visits);
        n.visit_count += 1;
    }
}

fn simulate_step<R: Rng + ?Sized>(
    state: &WorldState,
    action: &VelocityAction,
    cfg: &PlannerConfig,
    rng: &mut R,
) -> StepOutcome {
    let mut rng = rng;
    let model = match cfg.planning_model {
        PlanningModel::Frozen => ObstacleModel::Frozen,
        PlanningModel::Stochastic => ObstacleModel::Stochastic(&mut rng),
    };
    world_step(state, action, model, &cfg.world).expect("planner actions stay inside the kinematic window")
}

/// Discounted return of the rollout policy from `state`, for at most
/// `budget` steps.
pub fn rollout_with_budget<R: Rng + ?Sized>(
    state: &WorldState,
    cfg: &PlannerConfig,
    budget: usize,
    rng: &mut R,
) -> f64 {
    if state.terminal_cause(&cfg.world).is_terminal() {
        return 0.0;
    }
    let policy = cfg.rollout_policy();
    let mut current = state.clone();
    let mut ret = 0.0;
    let mut discount = 1.0;
    for _ in 0..budget {
        let action = policy.sample(&current, cfg.world.t_s, rng);
        let out = simulate_step(&current, &action, cfg, rng);
        ret += discount * out.reward;
        if out.terminal {
            break;
        }
        discount *= cfg.gamma;
        current = out.next_state;
    }
    ret
}

pub fn rollout<R: Rng + ?Sized>(state: &WorldState, cfg: &PlannerConfig, rng: &mut R) -> f64 {
    rollout_with_budget(state, cfg, cfg.depth_cap, rng)
}

fn new_node(state: WorldState, terminal: bool, cfg: &PlannerConfig) -> SearchNode {
    let actions = if terminal { Vec::new() } else { cfg.tree_actions(&state) };
    SearchNode::new(state, terminal, actions)
}

/// One selection-expansion-rollout-backup pass.
fn simulate<R: Rng + ?Sized>(tree: &mut SearchTree, cfg: &PlannerConfig, rng: &mut R) {
    let mut path = Vec::new();
    let mut node = 0;
    let mut tail = 0.0;
    loop {
        if tree.nodes[node].terminal || path.len() >= cfg.depth_cap || tree.nodes[node].actions.is_empty() {
            break;
        }
        let a = uct_select(&tree.nodes[node], cfg.c_p, rng);
        if let Some(child) = tree.nodes[node].children[a] {
            path.push((node, a, tree.nodes[node].rewards[a]));
            node = child;
            continue;
        }
        let action = tree.nodes[node].actions[a];
        let out = simulate_step(&tree.nodes[node].state, &action, cfg, rng);
        path.push((node, a, out.reward));
        let depth = path.len();
        if !out.terminal && depth < cfg.depth_cap {
            tail = rollout_with_budget(&out.next_state, cfg, cfg.depth_cap - depth, rng);
        }
        let child = tree.nodes.len();
        tree.nodes.push(new_node(out.next_state, out.terminal, cfg));
        tree.nodes[node].children[a] = Some(child);
        tree.nodes[node].rewards[a] = out.reward;
        break;
    }
    backup(tree, &path, tail, cfg.gamma);
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootActionStat {
    pub action: VelocityAction,
    pub visits: u32,
    pub q: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PlanDiagnostics {
    /// Wall-clock seconds spent planning.
    pub planning_time: f64,
    pub simulations: usize,
    pub c_p: f64,
    pub admissible: usize,
    pub root: Vec<RootActionStat>,
}

/// Runs `cfg.simulations` simulations from `root` and returns the root
/// action with the best mean return, ties broken by action index.
pub fn plan<R: Rng + ?Sized>(root: &WorldState, cfg: &PlannerConfig, rng: &mut R) -> (VelocityAction, PlanDiagnostics) {
    let started = Instant::now();
    let (tree, action) = search(root, cfg, rng);
    let root_node = &tree.nodes[0];
    let diagnostics = PlanDiagnostics {
        planning_time: started.elapsed().as_secs_f64(),
        simulations: cfg.simulations,
        c_p: cfg.c_p,
        admissible: root_node.actions.len(),
        root: root_node
            .actions
            .iter()
            .zip(&root_node.stats)
            .map(|(&action, s)| RootActionStat {
                action,
                visits: s.visits,
                q: s.mean_return,
            })
            .collect(),
    };
    (action, diagnostics)
}

/// Builds the tree and picks the root action; exposed for inspection.
pub fn search<R: Rng + ?Sized>(root: &WorldState, cfg: &PlannerConfig, rng: &mut R) -> (SearchTree, VelocityAction) {
    let mut start = root.clone();
    if cfg.planning_model == PlanningModel::Stochastic {
        // The planner does not know where obstacles are headed.
        let waypoints: Vec<ObstacleState> = start
            .obstacles
            .iter()
            .map(|o| ObstacleState {
                waypoint: sample_point(rng, &start.workspace, o.radius),
                ..*o
            })
            .collect();
        start.obstacles = waypoints.into();
    }
    let terminal = start.terminal_cause(&cfg.world).is_terminal();
    let mut tree = SearchTree {
        nodes: vec![new_node(start, terminal, cfg)],
    };
    for _ in 0..cfg.simulations {
        simulate(&mut tree, cfg, rng);
    }
    let root_node = &tree.nodes[0];
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in root_node.stats.iter().enumerate() {
        if s.visits > 0 && best.map_or(true, |(_, q)| s.mean_return > q) {
            best = Some((i, s.mean_return));
        }
    }
    let action = match best {
        Some((i, _)) => root_node.actions[i],
        None => root_node
            .actions
            .iter()
            .copied()
            .find(|a| a.speed == 0.0)
            .unwrap_or(VelocityAction::stop(root.robot.heading)),
    };
    (tree, action)
}
