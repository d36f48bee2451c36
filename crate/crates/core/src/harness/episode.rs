use std::io::Write;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::Vec2;
use crate::planner::{build_planner, Planner, PlannerId};
use crate::world::{world_step, Cause, ObstacleModel, VelocityAction};

use super::{generate_scenario, planner_stream, split, HarnessError, PlannerSettings, ScenarioConfig, Timing, STREAM_NOISE};

/// Tolerance when checking a replayed pose against the logged one.
const REPLAY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EpisodeOptions {
    pub settings: PlannerSettings,
    pub timing: Timing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepLog {
    pub t: usize,
    /// Snapshot before the action: `[x, y, heading, o0.x, o0.y, ...]`.
    pub state: Vec<f64>,
    pub action: VelocityAction,
    pub reward: f64,
    /// Seconds spent deciding; zero when timing is off.
    pub planning_time: f64,
}

/// One episode with everything needed to reproduce it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub planner: PlannerId,
    pub m: usize,
    pub scenario_seed: u64,
    pub scenario: ScenarioConfig,
    pub settings: PlannerSettings,
    pub timing: Timing,
    pub outcome: Cause,
    /// Discounted return.
    pub rho: f64,
    pub steps: Vec<StepLog>,
    pub final_state: Vec<f64>,
}

impl EpisodeRecord {
    pub fn length(&self) -> usize {
        self.steps.len()
    }

    pub fn planning_times(&self) -> impl Iterator<Item = f64> + '_ {
        self.steps.iter().map(|s| s.planning_time)
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("episode records always serialize")
    }

    pub fn from_json_line(line: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(line).map_err(|source| HarnessError::Json {
            context: "episode record".to_owned(),
            source,
        })
    }
}

/// Discounted sum with the first reward undiscounted.
pub fn discounted(rewards: impl IntoIterator<Item = f64>, gamma: f64) -> f64 {
    let mut weight = 1.0;
    let mut total = 0.0;
    for r in rewards {
        total += weight * r;
        weight *= gamma;
    }
    total
}

/// Plays one episode of `planner` with budget `m` on scenario `scenario_seed`
/// until a terminal state or the step cap.
pub fn run_episode(
    planner: PlannerId,
    m: usize,
    scenario: &ScenarioConfig,
    scenario_seed: u64,
    opts: &EpisodeOptions,
) -> Result<EpisodeRecord, HarnessError> {
    let settings = effective_settings(opts, scenario, m);
    let agent = build_planner(planner, m, &settings.mcts, &settings.dwa);
    run_episode_with(agent.as_ref(), m, scenario, scenario_seed, opts)
}

fn effective_settings(opts: &EpisodeOptions, scenario: &ScenarioConfig, m: usize) -> PlannerSettings {
    let mut settings = opts.settings;
    settings.mcts.world = scenario.world_params();
    settings.mcts.simulations = m;
    settings
}

/// Same as [`run_episode`] for an arbitrary planner; the record is labelled
/// with `agent.id()`.
pub fn run_episode_with(
    agent: &dyn Planner,
    m: usize,
    scenario: &ScenarioConfig,
    scenario_seed: u64,
    opts: &EpisodeOptions,
) -> Result<EpisodeRecord, HarnessError> {
    let planner = agent.id();
    let settings = effective_settings(opts, scenario, m);
    let params = settings.mcts.world;
    let mut state = generate_scenario(scenario, scenario_seed)?;
    let mut planner_rng = planner_stream(scenario_seed, planner);
    let noise_seed = split(scenario_seed, STREAM_NOISE);
    let mut steps = Vec::new();
    let mut outcome = state.terminal_cause(&params);
    while !outcome.is_terminal() {
        let started = Instant::now();
        let decision = agent.decide(&state, &mut planner_rng);
        let planning_time = match opts.timing {
            Timing::Wall => started.elapsed().as_secs_f64(),
            Timing::Off => 0.0,
        };
        let mut noise = ChaCha8Rng::seed_from_u64(split(noise_seed, state.step_index as u64));
        let step = world_step(&state, &decision.action, ObstacleModel::Stochastic(&mut noise), &params)?;
        steps.push(StepLog {
            t: state.step_index,
            state: state.snapshot(),
            action: decision.action,
            reward: step.reward,
            planning_time,
        });
        outcome = step.cause;
        state = step.next_state;
    }
    let rho = discounted(steps.iter().map(|s| s.reward), settings.mcts.gamma);
    Ok(EpisodeRecord {
        planner,
        m,
        scenario_seed,
        scenario: scenario.clone(),
        settings,
        timing: opts.timing,
        outcome,
        rho,
        steps,
        final_state: state.snapshot(),
    })
}

/// Result of re-simulating a record from its logged actions and obstacle
/// positions.
#[derive(Clone, Debug, PartialEq)]
pub struct ReplayCheck {
    pub rewards: Vec<f64>,
    pub rho: f64,
    pub outcome: Cause,
}

fn obstacle_positions(snapshot: &[f64]) -> Vec<Vec2> {
    snapshot[3..].chunks_exact(2).map(|c| Vec2::new(c[0], c[1])).collect()
}

fn poses_match(a: &[f64], b: &[f64]) -> bool {
    a.len() >= 3 && b.len() >= 3 && a[..3].iter().zip(&b[..3]).all(|(x, y)| (x - y).abs() <= REPLAY_TOL)
}

/// Rebuilds the episode deterministically and checks it against the log.
pub fn replay_record(record: &EpisodeRecord) -> Result<ReplayCheck, HarnessError> {
    let params = record.scenario.world_params();
    let mut state = generate_scenario(&record.scenario, record.scenario_seed)?;
    let mismatch = |msg: String| Err(HarnessError::ReplayMismatch(msg));
    let mut rewards = Vec::with_capacity(record.steps.len());
    let mut outcome = state.terminal_cause(&params);
    for (k, step) in record.steps.iter().enumerate() {
        if outcome.is_terminal() {
            return mismatch(format!("episode ended ({outcome:?}) before logged step {k}"));
        }
        if state.snapshot() != step.state {
            return mismatch(format!("state before step {k} differs from the log"));
        }
        let next = record.steps.get(k + 1).map_or(&record.final_state, |s| &s.state);
        let positions = obstacle_positions(next);
        let out = world_step(&state, &step.action, ObstacleModel::Replay(&positions), &params)?;
        if !poses_match(&out.next_state.snapshot(), next) {
            return mismatch(format!("robot pose after step {k} differs from the log"));
        }
        if out.reward != step.reward {
            return mismatch(format!("reward at step {k}: replayed {} logged {}", out.reward, step.reward));
        }
        rewards.push(out.reward);
        outcome = out.cause;
        state = out.next_state;
    }
    if outcome != record.outcome {
        return mismatch(format!("outcome: replayed {outcome:?} logged {:?}", record.outcome));
    }
    let rho = discounted(rewards.iter().copied(), record.settings.mcts.gamma);
    Ok(ReplayCheck { rewards, rho, outcome })
}

/// Trajectory table: one row per logged step holding the state before the
/// action and the reward it earned, then a final row with an empty reward.
pub fn write_trajectory_csv<W: Write>(record: &EpisodeRecord, mut out: W) -> std::io::Result<()> {
    let n_obstacles = record.final_state.len().saturating_sub(3) / 2;
    let mut header = String::from("t,x,y,heading,reward");
    for i in 0..n_obstacles {
        header.push_str(&format!(",o{i}_x,o{i}_y"));
    }
    writeln!(out, "{header}")?;
    let row = |t: usize, state: &[f64], reward: Option<f64>| {
        let mut line = format!("{t},{},{},{},", state[0], state[1], state[2]);
        if let Some(r) = reward {
            line.push_str(&r.to_string());
        }
        for v in &state[3..] {
            line.push(',');
            line.push_str(&v.to_string());
        }
        line
    };
    for step in &record.steps {
        writeln!(out, "{}", row(step.t, &step.state, Some(step.reward)))?;
    }
    writeln!(out, "{}", row(record.steps.len(), &record.final_state, None))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ScenarioConfig {
        ScenarioConfig { n_obstacles: 10, step_cap: 30, ..ScenarioConfig::default() }
    }

    fn opts() -> EpisodeOptions {
        EpisodeOptions { timing: Timing::Off, ..EpisodeOptions::default() }
    }

    #[test]
    fn discounted_return() {
        assert_eq!(discounted([1.0, 1.0, 1.0], 0.5), 1.75);
        assert_eq!(discounted([], 0.5), 0.0);
    }

    #[test]
    fn episode_is_deterministic() {
        let a = run_episode(PlannerId::MctsVoTree, 10, &small(), 3, &opts()).unwrap();
        let b = run_episode(PlannerId::MctsVoTree, 10, &small(), 3, &opts()).unwrap();
        assert_eq!(a, b);
        assert!(a.length() <= 30);
        assert!(a.outcome.is_terminal());
    }

    #[test]
    fn empty_world_dwa_reaches_goal() {
        let scenario = ScenarioConfig { n_obstacles: 0, ..ScenarioConfig::default() };
        let rec = run_episode(PlannerId::Dwa, 1, &scenario, 0, &opts()).unwrap();
        assert_eq!(rec.outcome, Cause::GoalReached);
        assert_eq!(rec.steps.last().unwrap().reward, 100.0);
    }

    #[test]
    fn record_round_trips_and_replays() {
        let rec = run_episode(PlannerId::VoPlanner, 1, &small(), 11, &opts()).unwrap();
        let back = EpisodeRecord::from_json_line(&rec.to_json_line()).unwrap();
        assert_eq!(back, rec);
        let check = replay_record(&back).unwrap();
        assert_eq!(check.rho, rec.rho);
        assert_eq!(check.outcome, rec.outcome);
    }

    #[test]
    fn tampered_record_fails_replay() {
        let mut rec = run_episode(PlannerId::VoPlanner, 1, &small(), 11, &opts()).unwrap();
        rec.steps[0].reward += 1.0;
        assert!(matches!(replay_record(&rec), Err(HarnessError::ReplayMismatch(_))));
    }

    #[test]
    fn trajectory_csv_shape() {
        let rec = run_episode(PlannerId::Dwa, 1, &small(), 5, &opts()).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&rec, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), rec.length() + 2);
        assert!(lines[0].starts_with("t,x,y,heading,reward,o0_x,o0_y"));
        assert_eq!(lines[0].split(',').count(), 5 + 20);
        assert!(lines.iter().all(|l| l.split(',').count() == 25));
    }
}
