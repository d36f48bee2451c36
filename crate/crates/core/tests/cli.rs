use std::path::Path;

use mcts_vo::cli::run_cli;
use mcts_vo::harness::{EpisodeRecord, SweepConfig};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("mcts-vo").chain(args.iter().copied());
    let code = run_cli(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn help_and_unknown_subcommand() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    for sub in ["run", "sweep", "replay", "oracle-check"] {
        assert!(out.contains(sub), "{out}");
    }
    let (code, _, err) = run(&["fly"]);
    assert_eq!(code, 1);
    assert!(!err.is_empty());
}

#[test]
fn bad_arguments_name_the_flag() {
    let (code, _, err) = run(&["run", "--planner", "astar"]);
    assert_eq!(code, 1);
    assert!(err.contains("--planner"), "{err}");

    let (code, _, err) = run(&["run", "--planner", "mcts", "--m", "0"]);
    assert_eq!(code, 1);
    assert!(err.contains("--m"), "{err}");

    let (code, _, err) = run(&["run", "--planner", "dwa", "--timing", "cpu"]);
    assert_eq!(code, 1);
    assert!(err.contains("--timing"), "{err}");

    let (code, _, err) = run(&["sweep", "--config", "/nonexistent/sweep.json", "--out", "x"]);
    assert_eq!(code, 1);
    assert!(err.contains("--config"), "{err}");

    let (code, _, err) = run(&["oracle-check", "--resolution=-1"]);
    assert_eq!(code, 1);
    assert!(err.contains("--resolution"), "{err}");
}

#[test]
fn malformed_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.json");
    write(&path, r#"{"n_scenarios": 2, "colour": "red"}"#);
    let (code, _, err) = run(&["sweep", "--config", path.to_str().unwrap(), "--print-config"]);
    assert_eq!(code, 1);
    assert!(err.contains("colour"), "{err}");

    write(&path, r#"{"m_values": []}"#);
    let (code, _, _) = run(&["sweep", "--config", path.to_str().unwrap(), "--print-config"]);
    assert_eq!(code, 1);
}

#[test]
fn printed_config_round_trips_with_overrides() {
    let (code, out, _) = run(&["sweep", "--print-config", "--seed", "42", "--jobs", "3"]);
    assert_eq!(code, 0);
    for key in ["c_p", "epsilon0", "delta", "gamma", "m_values", "n_scenarios", "w_goal"] {
        assert!(out.contains(key), "missing {key}: {out}");
    }
    let cfg: SweepConfig = serde_json::from_str(&out).unwrap();
    assert_eq!(cfg.seed, 42);
    assert_eq!(cfg.jobs, 3);
    let again = serde_json::to_string_pretty(&cfg).unwrap();
    assert_eq!(again.trim(), out.trim());
}

#[test]
fn run_prints_a_record() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("scenario.json");
    write(&scenario, r#"{"n_obstacles": 5, "step_cap": 10}"#);
    let (code, out, err) =
        run(&["run", "--planner", "mcts_vo_tree", "--m", "5", "--seed", "3", "--scenario", scenario.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let record = EpisodeRecord::from_json_line(out.trim()).unwrap();
    assert_eq!(record.m, 5);
    assert_eq!(record.scenario_seed, 3);
    assert!(record.length() <= 10);
}

#[test]
fn sweep_then_replay() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.json");
    write(
        &cfg,
        r#"{
            "scenario": {"n_obstacles": 6, "step_cap": 12},
            "planners": ["mcts", "vo_planner"],
            "m_values": [3, 6],
            "n_scenarios": 2,
            "timing": "off"
        }"#,
    );
    let out_dir = dir.path().join("out");
    let (code, _, err) = run(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let summary = std::fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 2 * 2);
    let raw = out_dir.join("raw.jsonl");
    assert_eq!(std::fs::read_to_string(&raw).unwrap().lines().count(), 2 * 2 * 2);

    let csv = dir.path().join("traj.csv");
    let (code, _, err) =
        run(&["replay", "--record", raw.to_str().unwrap(), "--index", "5", "--out", csv.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("t,x,y,heading,reward,o0_x,o0_y"));

    let (code, _, err) = run(&["replay", "--record", raw.to_str().unwrap(), "--index", "99"]);
    assert_eq!(code, 1);
    assert!(err.contains("--index"), "{err}");
}

#[test]
fn oracle_check_passes() {
    let (code, out, err) = run(&["oracle-check", "--samples", "40", "--seed", "2"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("soundness violations: 0"));
    assert!(out.trim_end().ends_with("PASS"));
}
