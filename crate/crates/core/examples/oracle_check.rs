//! Cross-checks the analytic kernel against the sampling oracle.

use mcts_vo::oracle::oracle_check;
use mcts_vo::vo::{ConeMode, InsideMode, VoParams};

fn main() {
    let variants = [
        ("default", VoParams::default()),
        ("tangent cones", VoParams { cone: ConeMode::Tangent, ..VoParams::default() }),
        ("stop when inside", VoParams { inside: InsideMode::Stop, ..VoParams::default() }),
        ("margin 0.1", VoParams { safety_margin: 0.1, ..VoParams::default() }),
    ];
    for (name, params) in variants {
        let report = oracle_check(500, 3, 0.01, &params);
        println!(
            "{name:>17}: {} scenes, {} headings, {} unsound, {} mismatched",
            report.scenes, report.headings_checked, report.soundness_violations, report.completeness_mismatches
        );
    }
}
