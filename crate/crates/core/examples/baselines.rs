//! Reactive baselines against the pruned tree search on the same scenarios.

use mcts_vo::harness::{run_episode, EpisodeOptions, ScenarioConfig};
use mcts_vo::planner::PlannerId;
use mcts_vo::world::Cause;

fn main() {
    let scenario = ScenarioConfig::default();
    let opts = EpisodeOptions::default();
    for planner in [PlannerId::VoPlanner, PlannerId::Dwa, PlannerId::MctsVoTree] {
        let (mut goals, mut hits, mut total) = (0, 0, 0.0);
        for seed in 0..10 {
            let r = run_episode(planner, 50, &scenario, seed, &opts).expect("episode");
            goals += usize::from(r.outcome == Cause::GoalReached);
            hits += usize::from(r.outcome == Cause::Collision);
            total += r.rho;
        }
        println!("{planner:>13}: {goals}/10 reached, {hits}/10 collided, mean return {:.3}", total / 10.0);
    }
}
