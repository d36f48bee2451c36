//! Runs one episode and prints its trajectory.
//!
//! Usage: single_episode [planner] [m] [seed]

use mcts_vo::harness::{run_episode, write_trajectory_csv, EpisodeOptions, ScenarioConfig};
use mcts_vo::planner::PlannerId;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let planner: PlannerId = args.first().map_or("mcts_vo_tree", String::as_str).parse().expect("planner");
    let m = args.get(1).map_or(50, |s| s.parse().expect("m"));
    let seed = args.get(2).map_or(0, |s| s.parse().expect("seed"));

    let record = run_episode(planner, m, &ScenarioConfig::default(), seed, &EpisodeOptions::default()).expect("episode");
    eprintln!("{planner} m={m}: {:?} after {} steps, return {:.4}", record.outcome, record.length(), record.rho);
    write_trajectory_csv(&record, std::io::stdout().lock()).expect("write csv");
}
