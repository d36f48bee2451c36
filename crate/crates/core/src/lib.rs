//! Online motion planning for a disc robot among randomly moving disc
//! obstacles: Monte Carlo tree search whose action set is pruned by
//! velocity obstacles, plus reactive baselines and an experiment harness.
//!
//! * [`geometry`]: vectors, angles and sets of angular intervals.
//! * [`vo`]: safe heading sets from velocity obstacles, and a sampling oracle.
//! * [`world`]: the navigation MDP.
//! * [`policy`]: action grids and the goal-biased rollout policy.
//! * [`mcts`]: UCT search.
//! * [`baselines`]: one-step VO and dynamic-window planners.
//! * [`planner`]: a common interface over every planner.
//! * [`harness`]: scenarios, episodes, metrics and sweeps.
//! * [`oracle`]: randomized kernel/oracle cross-check.
//! * [`cli`]: the `mcts-vo` command line.

pub mod baselines;
pub mod cli;
pub mod geometry;
pub mod harness;
pub mod mcts;
pub mod oracle;
pub mod planner;
pub mod policy;
pub mod vo;
pub mod world;

pub use geometry::{AngularIntervalSet, Arc, Rect, Vec2};
pub use harness::{EpisodeRecord, MetricsSummary, ScenarioConfig, SweepConfig};
pub use mcts::{plan, PlannerConfig, Variant};
pub use planner::{build_planner, Planner, PlannerId};
pub use vo::{compute_safe_velocities, SafeVelocitySet, VoParams};
pub use world::{world_step, Cause, VelocityAction, WorldState};
