//! Common interface over the MCTS variants and the reactive baselines.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::baselines::{dwa_decide, vo_planner_decide, DwaConfig};
use crate::mcts::{plan, PlanDiagnostics, PlannerConfig, Variant};
use crate::world::{VelocityAction, WorldState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlannerId {
    Mcts,
    MctsVoTree,
    MctsVoRollout,
    MctsVo2,
    VoPlanner,
    Dwa,
}

impl PlannerId {
    pub const ALL: [PlannerId; 6] = [
        PlannerId::Mcts,
        PlannerId::MctsVoTree,
        PlannerId::MctsVoRollout,
        PlannerId::MctsVo2,
        PlannerId::VoPlanner,
        PlannerId::Dwa,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PlannerId::Mcts => "mcts",
            PlannerId::MctsVoTree => "mcts_vo_tree",
            PlannerId::MctsVoRollout => "mcts_vo_rollout",
            PlannerId::MctsVo2 => "mcts_vo2",
            PlannerId::VoPlanner => "vo_planner",
            PlannerId::Dwa => "dwa",
        }
    }

    pub fn variant(self) -> Option<Variant> {
        match self {
            PlannerId::Mcts => Some(Variant::Plain),
            PlannerId::MctsVoTree => Some(Variant::VoTree),
            PlannerId::MctsVoRollout => Some(Variant::VoRollout),
            PlannerId::MctsVo2 => Some(Variant::VoBoth),
            PlannerId::VoPlanner | PlannerId::Dwa => None,
        }
    }

    /// Whether the simulation budget affects this planner.
    pub fn uses_simulations(self) -> bool {
        self.variant().is_some()
    }
}

impl fmt::Display for PlannerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, thiserror::Error)]
#[error("unknown planner `{0}` (expected one of mcts, mcts_vo_tree, mcts_vo_rollout, mcts_vo2, vo_planner, dwa)")]
pub struct UnknownPlanner(pub String);

impl FromStr for PlannerId {
    type Err = UnknownPlanner;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PlannerId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| UnknownPlanner(s.to_owned()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decision {
    pub action: VelocityAction,
    pub diagnostics: Option<PlanDiagnostics>,
}

pub trait Planner: Send + Sync {
    fn id(&self) -> PlannerId;
    fn decide(&self, state: &WorldState, rng: &mut dyn RngCore) -> Decision;
}

pub struct MctsPlanner {
    pub id: PlannerId,
    pub config: PlannerConfig,
}

impl Planner for MctsPlanner {
    fn id(&self) -> PlannerId {
        self.id
    }

    fn decide(&self, state: &WorldState, rng: &mut dyn RngCore) -> Decision {
        let (action, diagnostics) = plan(state, &self.config, rng);
        Decision {
            action,
            diagnostics: Some(diagnostics),
        }
    }
}

/// Reactive VO baseline; reuses the MCTS rollout parameters.
pub struct VoPlanner {
    pub config: PlannerConfig,
}

impl Planner for VoPlanner {
    fn id(&self) -> PlannerId {
        PlannerId::VoPlanner
    }

    fn decide(&self, state: &WorldState, rng: &mut dyn RngCore) -> Decision {
        let c = &self.config;
        let action = vo_planner_decide(state, rng, c.epsilon0, c.delta, c.grid, c.pruning, c.world.t_s);
        Decision {
            action,
            diagnostics: None,
        }
    }
}

pub struct DwaPlanner {
    pub config: DwaConfig,
    pub t_s: f64,
}

impl Planner for DwaPlanner {
    fn id(&self) -> PlannerId {
        PlannerId::Dwa
    }

    fn decide(&self, state: &WorldState, _rng: &mut dyn RngCore) -> Decision {
        Decision {
            action: dwa_decide(state, &self.config, self.t_s),
            diagnostics: None,
        }
    }
}

/// Builds planner `id` with `simulations` per step from shared settings.
pub fn build_planner(id: PlannerId, simulations: usize, mcts: &PlannerConfig, dwa: &DwaConfig) -> Box<dyn Planner> {
    match id.variant() {
        Some(variant) => Box::new(MctsPlanner {
            id,
            config: PlannerConfig {
                simulations,
                variant,
                ..*mcts
            },
        }),
        None if id == PlannerId::VoPlanner => Box::new(VoPlanner { config: *mcts }),
        None => Box::new(DwaPlanner {
            config: *dwa,
            t_s: mcts.world.t_s,
        }),
    }
}
