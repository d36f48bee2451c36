//! Logs an episode as JSON, re-simulates it from the log and writes the
//! trajectory CSV.

use mcts_vo::harness::{replay_record, run_episode, write_trajectory_csv, EpisodeOptions, EpisodeRecord, ScenarioConfig, Timing};
use mcts_vo::planner::PlannerId;

fn main() {
    let opts = EpisodeOptions { timing: Timing::Off, ..EpisodeOptions::default() };
    let record = run_episode(PlannerId::MctsVo2, 20, &ScenarioConfig::default(), 4, &opts).expect("episode");
    let line = record.to_json_line();
    let parsed = EpisodeRecord::from_json_line(&line).expect("parse");
    let check = replay_record(&parsed).expect("replay");
    assert_eq!(check.rho, record.rho);
    eprintln!("replayed {} steps, outcome {:?}, return {:.6}", check.rewards.len(), check.outcome, check.rho);
    write_trajectory_csv(&parsed, std::io::stdout().lock()).expect("write csv");
}
