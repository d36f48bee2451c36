//! One planning step with each search variant from the same state.

use mcts_vo::harness::{generate_scenario, ScenarioConfig};
use mcts_vo::mcts::{plan, PlannerConfig, Variant};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let state = generate_scenario(&ScenarioConfig::default(), 7).expect("scenario");
    for variant in [Variant::Plain, Variant::VoTree, Variant::VoRollout, Variant::VoBoth] {
        let cfg = PlannerConfig { variant, simulations: 200, ..PlannerConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (action, diag) = plan(&state, &cfg, &mut rng);
        let mut root = diag.root.clone();
        root.sort_by(|a, b| b.q.total_cmp(&a.q));
        println!(
            "{variant:?}: {} admissible, chose speed {:.3} heading {:+.3} in {:.2} ms",
            diag.admissible,
            action.speed,
            action.heading,
            diag.planning_time * 1e3
        );
        for s in root.iter().filter(|s| s.visits > 0).take(3) {
            println!("    q {:+.3} n {:3} speed {:.3} heading {:+.3}", s.q, s.visits, s.action.speed, s.action.heading);
        }
    }
}
