//! End-to-end acceptance criteria. Each test prints one PASS/FAIL line to
//! stderr (uncaptured) and then asserts.
//!
//! The experiment criteria share one sweep over the pruned and plain
//! planners (run twice for the reproducibility check) plus one plain-search
//! group at the largest budget, computed lazily by the first test needing
//! them.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::OnceLock;
use std::time::Instant;

use mcts_vo::geometry::{Rect, Vec2};
use mcts_vo::harness::{
    discounted, run_episode_with, sweep, EpisodeOptions, EpisodeRecord, MetricsSummary, ScenarioConfig,
    SweepConfig, Timing,
};
use mcts_vo::oracle::oracle_check;
use mcts_vo::planner::{Decision, Planner, PlannerId};
use mcts_vo::vo::VoParams;
use mcts_vo::world::{reward, Cause, ObstacleState, RobotState, VelocityAction, WorldState};
use rand::RngCore;

fn report(criterion: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let line = format!("criterion {criterion}: {verdict} | {detail}\n");
    let _ = std::io::stderr().write_all(line.as_bytes());
}

struct Experiments {
    summary: Vec<MetricsSummary>,
    summary_csv: Vec<u8>,
    rerun_csv: Vec<u8>,
    raw: Vec<u8>,
    rerun_raw: Vec<u8>,
}

fn experiments() -> &'static Experiments {
    static CELL: OnceLock<Experiments> = OnceLock::new();
    CELL.get_or_init(|| {
        let started = Instant::now();
        let main = SweepConfig {
            planners: vec![PlannerId::Mcts, PlannerId::MctsVoTree, PlannerId::MctsVo2],
            m_values: vec![10, 50, 100],
            timing: Timing::Off,
            ..SweepConfig::default()
        };
        let first = tempfile::tempdir().unwrap();
        let second = tempfile::tempdir().unwrap();
        let result = sweep(&main, Some(first.path())).unwrap();
        sweep(&main, Some(second.path())).unwrap();
        let large = SweepConfig { planners: vec![PlannerId::Mcts], m_values: vec![400], ..main.clone() };
        let mut summary = result.summary;
        summary.extend(sweep(&large, None).unwrap().summary);

        let read = |dir: &tempfile::TempDir, name: &str| std::fs::read(dir.path().join(name)).unwrap();
        let mut table = String::from("planner,m,mean_rho,rho_ci95,eta,success_rate,n\n");
        for s in &summary {
            table += &format!(
                "{},{},{:.4},[{:.4} {:.4}],{:.2},{:.2},{}\n",
                s.planner, s.m, s.mean_rho, s.rho_ci95.0, s.rho_ci95.1, s.eta, s.success_rate, s.n
            );
        }
        table += &format!("experiments: {:.0} s\n", started.elapsed().as_secs_f64());
        let _ = std::io::stderr().write_all(table.as_bytes());
        Experiments {
            summary,
            summary_csv: read(&first, "summary.csv"),
            rerun_csv: read(&second, "summary.csv"),
            raw: read(&first, "raw.jsonl"),
            rerun_raw: read(&second, "raw.jsonl"),
        }
    })
}

fn row(planner: PlannerId, m: usize) -> &'static MetricsSummary {
    experiments()
        .summary
        .iter()
        .find(|s| s.planner == planner && s.m == m)
        .unwrap_or_else(|| panic!("no summary row for {planner} m={m}"))
}

#[test]
fn criterion_1_kernel_matches_oracle() {
    let started = Instant::now();
    let report_ = oracle_check(1000, 0, 0.01, &VoParams::default());
    let secs = started.elapsed().as_secs_f64();
    let pass = report_.scenes >= 1000 && report_.passed() && secs < 60.0;
    report(
        1,
        pass,
        &format!(
            "{} scenes, {} headings, {} soundness violations, {} completeness mismatches, {secs:.1} s",
            report_.scenes, report_.headings_checked, report_.soundness_violations, report_.completeness_mismatches
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_2_pruned_planners_never_collide() {
    let mut pass = true;
    let mut parts = Vec::new();
    for planner in [PlannerId::MctsVoTree, PlannerId::MctsVo2] {
        for m in [10, 50] {
            let s = row(planner, m);
            pass &= s.eta == 0.0 && s.n == 50;
            parts.push(format!("{planner} m={m} eta={:.2}", s.eta));
        }
    }
    report(2, pass, &parts.join(", "));
    assert!(pass);
}

#[test]
fn criterion_3_ablation_ordering() {
    let tree = row(PlannerId::MctsVoTree, 10);
    let plain = row(PlannerId::Mcts, 10);
    let plain_400 = row(PlannerId::Mcts, 400);
    let returns_ordered = tree.mean_rho > plain.mean_rho && tree.rho_ci95.0 > plain.rho_ci95.1;
    let collisions_ordered = plain.eta > plain_400.eta;
    let pass = returns_ordered && collisions_ordered;
    report(
        3,
        pass,
        &format!(
            "m=10 rho mcts_vo_tree {:.3} [{:.3}, {:.3}] vs mcts {:.3} [{:.3}, {:.3}]; eta mcts m=10 {:.2} vs m=400 {:.2}",
            tree.mean_rho,
            tree.rho_ci95.0,
            tree.rho_ci95.1,
            plain.mean_rho,
            plain.rho_ci95.0,
            plain.rho_ci95.1,
            plain.eta,
            plain_400.eta
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_4_success_rate() {
    let mut pass = true;
    let mut parts = Vec::new();
    for m in [10, 50, 100] {
        let s = row(PlannerId::MctsVoTree, m);
        pass &= s.success_rate >= 0.6;
        parts.push(format!("mcts_vo_tree m={m} {:.2}", s.success_rate));
    }
    let plain = row(PlannerId::Mcts, 10);
    let tree = row(PlannerId::MctsVoTree, 10);
    pass &= plain.success_rate < tree.success_rate;
    parts.push(format!("mcts m=10 {:.2}", plain.success_rate));
    report(4, pass, &parts.join(", "));
    assert!(pass);
}

#[test]
fn criterion_5_planning_time() {
    let ms = [10, 50, 100, 200, 400];
    let cfg = SweepConfig {
        planners: vec![PlannerId::MctsVoTree],
        m_values: ms.to_vec(),
        n_scenarios: 10,
        timing: Timing::Wall,
        ..SweepConfig::default()
    };
    let result = sweep(&cfg, None).unwrap();
    let mut per_m: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for r in &result.records {
        per_m.entry(r.m).or_default().extend(r.planning_times());
    }
    let stats: Vec<(usize, f64, f64)> = per_m
        .iter()
        .map(|(&m, xs)| {
            let n = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / n;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
            (m, mean, (var / n).sqrt())
        })
        .collect();
    let t10 = stats[0].1;
    // Within noise: a later mean may not fall below an earlier one by more
    // than three combined standard errors.
    let monotone = stats.windows(2).all(|w| w[1].1 + 3.0 * (w[0].2 + w[1].2) >= w[0].1);
    let pass = t10 < 1.0 && t10 < 0.2 && monotone;
    let detail: Vec<String> = stats.iter().map(|(m, mean, _)| format!("m={m} {:.2} ms", mean * 1e3)).collect();
    report(5, pass, &format!("mean t_plan mcts_vo_tree {}", detail.join(", ")));
    assert!(pass);
}

/// Drives the robot at full speed along a fixed heading.
struct Straight(f64);

impl Planner for Straight {
    fn id(&self) -> PlannerId {
        PlannerId::Dwa
    }

    fn decide(&self, state: &WorldState, _rng: &mut dyn RngCore) -> Decision {
        Decision { action: VelocityAction::new(state.robot.v_max, self.0), diagnostics: None }
    }
}

fn three_step_episode(heading: f64, goal: Vec2) -> EpisodeRecord {
    let scenario = ScenarioConfig {
        n_obstacles: 0,
        robot_start: Vec2::new(1.0, 1.0),
        robot_heading: Some(heading),
        goal,
        ..ScenarioConfig::default()
    };
    let opts = EpisodeOptions { timing: Timing::Off, ..EpisodeOptions::default() };
    run_episode_with(&Straight(heading), 1, &scenario, 0, &opts).unwrap()
}

fn reward_branches_exact() -> bool {
    let workspace = Rect::new(Vec2::new(0.0, 0.0), Vec2::new(10.0, 10.0));
    let d_max = workspace.diagonal();
    let world = |p: Vec2, obstacles: Vec<ObstacleState>| {
        WorldState::new(RobotState::new(p, 0.0, 0.3, 0.3, 1.9), obstacles, Vec2::new(9.0, 9.0), workspace)
    };
    let obstacle = |p: Vec2| ObstacleState { position: p, radius: 0.2, v_max: 0.2, waypoint: p };
    let start = world(Vec2::new(5.0, 5.0), vec![]);
    let a = VelocityAction::new(0.3, 0.0);
    let goal = reward(&start, &a, &world(Vec2::new(8.9, 9.0), vec![]), 100.0, d_max);
    let out = reward(&start, &a, &world(Vec2::new(0.2, 5.0), vec![]), 100.0, d_max);
    let hit = reward(&start, &a, &world(Vec2::new(5.0, 5.0), vec![obstacle(Vec2::new(5.4, 5.0))]), 100.0, d_max);
    let near = reward(&start, &a, &world(Vec2::new(6.0, 9.0), vec![]), 100.0, d_max);
    // Goal beats a simultaneous collision.
    let both = reward(&start, &a, &world(Vec2::new(9.0, 9.0), vec![obstacle(Vec2::new(9.3, 9.0))]), 100.0, d_max);
    goal == (100.0, Cause::GoalReached)
        && out == (-100.0, Cause::OutOfBounds)
        && hit == (-100.0, Cause::Collision)
        && near == (-3.0 / 200f64.sqrt(), Cause::None)
        && both == (100.0, Cause::GoalReached)
}

#[test]
fn criterion_6_return_arithmetic() {
    let gamma = 0.7;
    let d_max = 200f64.sqrt();

    let to_goal = three_step_episode(0.0, Vec2::new(1.95, 1.0));
    let goal_rho = -0.65 / d_max + gamma * (-0.35 / d_max) + gamma * gamma * 100.0;
    let goal_ok = to_goal.outcome == Cause::GoalReached
        && to_goal.length() == 3
        && (to_goal.rho - goal_rho).abs() < 1e-9;

    let goal = Vec2::new(9.0, 9.0);
    let off_map = three_step_episode(std::f64::consts::PI, goal);
    let d1 = Vec2::new(0.7, 1.0).distance(goal);
    let d2 = Vec2::new(0.4, 1.0).distance(goal);
    let off_rho = -d1 / d_max + gamma * (-d2 / d_max) - gamma * gamma * 100.0;
    let off_ok = off_map.outcome == Cause::OutOfBounds
        && off_map.length() == 3
        && (off_map.rho - off_rho).abs() < 1e-9;

    let sum_ok = (discounted([-0.5, 2.0, 100.0], gamma) - (-0.5 + 1.4 + 49.0)).abs() < 1e-9;
    let branches_ok = reward_branches_exact();

    let pass = goal_ok && off_ok && sum_ok && branches_ok;
    report(
        6,
        pass,
        &format!(
            "goal episode rho {:.9} (expected {goal_rho:.9}), off-map episode rho {:.9} (expected {off_rho:.9}), reward branches {}",
            to_goal.rho,
            off_map.rho,
            if branches_ok { "exact" } else { "wrong" }
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_7_sweep_is_byte_reproducible() {
    let run = experiments();
    let pass = !run.summary_csv.is_empty() && run.summary_csv == run.rerun_csv && run.raw == run.rerun_raw;
    report(
        7,
        pass,
        &format!(
            "summary.csv {} bytes, raw.jsonl {} bytes, identical: {}",
            run.summary_csv.len(),
            run.raw.len(),
            pass
        ),
    );
    assert!(pass);
}
