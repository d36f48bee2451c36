//! Scenario generation, episode execution, metrics and parameter sweeps.
//!
//! # Random streams
//!
//! Every random draw in a sweep derives from one master seed:
//!
//! * scenario `i` uses seed `split(master, i)`;
//! * a scenario seed `s` feeds obstacle placement through
//!   `split(s, STREAM_LAYOUT)`;
//! * environment noise for step `k` uses `split(split(s, STREAM_NOISE), k)`,
//!   so obstacle motion never depends on which planner is driving;
//! * the planner's own stream is `split(split(s, STREAM_PLANNER), planner)`,
//!   where `planner` is the planner's position in [`PlannerId::ALL`].
//!
//! Each derived seed initializes a `ChaCha8Rng`.

mod episode;
mod metrics;
mod scenario;
mod sweep;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use episode::{discounted, replay_record, run_episode, run_episode_with, write_trajectory_csv, EpisodeOptions, EpisodeRecord, ReplayCheck, StepLog};
pub use metrics::{aggregate, bootstrap_mean_ci, write_plot_csvs, write_summary_csv, MetricsSummary, SUMMARY_HEADER};
pub use scenario::{generate_scenario, ScenarioConfig, ScenarioError};
pub use sweep::{sweep, SweepConfig, SweepResult};

use crate::baselines::DwaConfig;
use crate::mcts::PlannerConfig;
use crate::planner::PlannerId;
use crate::world::WorldError;

pub const STREAM_LAYOUT: u64 = 1;
pub const STREAM_NOISE: u64 = 2;
pub const STREAM_PLANNER: u64 = 3;

/// SplitMix64 finalizer over `seed` offset by `stream`.
pub fn split(seed: u64, stream: u64) -> u64 {
    let mut z = seed.wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(split(seed, stream))
}

pub fn planner_stream(scenario_seed: u64, planner: PlannerId) -> ChaCha8Rng {
    let index = PlannerId::ALL.iter().position(|&p| p == planner).unwrap_or(0) as u64;
    stream_rng(split(scenario_seed, STREAM_PLANNER), index)
}

/// Whether decision steps are timed with the wall clock. With `Off` every
/// recorded planning time is zero, which makes outputs byte-reproducible.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Timing {
    #[default]
    Wall,
    Off,
}

/// Planner parameters shared by every planner in a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlannerSettings {
    pub mcts: PlannerConfig,
    pub dwa: DwaConfig,
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed json in {context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("no records to aggregate")]
    EmptyGroup,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("replay mismatch: {0}")]
    ReplayMismatch(String),
}

impl HarnessError {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
