//! Where pruning helps: the four search variants on shared scenarios.
//!
//! Usage: ablation_sweep [out_dir] [n_scenarios]

use std::path::PathBuf;

use mcts_vo::harness::{sweep, SweepConfig, SUMMARY_HEADER};
use mcts_vo::planner::PlannerId;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let out = args.first().map(PathBuf::from);
    let cfg = SweepConfig {
        planners: vec![PlannerId::Mcts, PlannerId::MctsVoTree, PlannerId::MctsVoRollout, PlannerId::MctsVo2],
        m_values: vec![10, 50],
        n_scenarios: args.get(1).map_or(10, |s| s.parse().expect("n_scenarios")),
        ..SweepConfig::default()
    };
    let result = sweep(&cfg, out.as_deref()).expect("sweep");
    println!("{SUMMARY_HEADER}");
    for s in &result.summary {
        println!(
            "{},{},{:.4},{:.4},{:.3},{:.3},{:.6},{:.6},{}",
            s.planner, s.m, s.mean_rho, s.std_rho, s.eta, s.success_rate, s.mean_tplan, s.std_tplan, s.n
        );
    }
}
