use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::planner::PlannerId;

use super::{
    aggregate, run_episode, split, write_plot_csvs, write_summary_csv, EpisodeOptions, EpisodeRecord, HarnessError,
    MetricsSummary, PlannerSettings, ScenarioConfig, Timing,
};

/// A full experiment grid: every planner at every budget on the same
/// `n_scenarios` scenario seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub scenario: ScenarioConfig,
    pub planners: Vec<PlannerId>,
    pub m_values: Vec<usize>,
    pub n_scenarios: usize,
    /// Master seed; scenario `i` uses `split(seed, i)`.
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
    pub timing: Timing,
    pub settings: PlannerSettings,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioConfig::default(),
            planners: PlannerId::ALL.to_vec(),
            m_values: vec![10, 25, 50, 100, 200, 400],
            n_scenarios: 50,
            seed: 0,
            jobs: 0,
            timing: Timing::Wall,
            settings: PlannerSettings::default(),
        }
    }
}

impl SweepConfig {
    pub fn scenario_seeds(&self) -> Vec<u64> {
        (0..self.n_scenarios as u64).map(|i| split(self.seed, i)).collect()
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let invalid = |msg: &str| Err(HarnessError::InvalidConfig(msg.to_owned()));
        if self.planners.is_empty() {
            return invalid("planners must not be empty");
        }
        if self.m_values.is_empty() || self.m_values.contains(&0) {
            return invalid("m_values must be non-empty and positive");
        }
        if self.n_scenarios == 0 {
            return invalid("n_scenarios must be at least 1");
        }
        self.scenario.validate()?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub records: Vec<EpisodeRecord>,
    pub summary: Vec<MetricsSummary>,
}

fn write_summaries(summary: &[MetricsSummary], dir: &Path) -> Result<(), HarnessError> {
    let path = dir.join("summary.csv");
    let file = File::create(&path).map_err(|e| HarnessError::io(&path, e))?;
    let mut out = BufWriter::new(file);
    write_summary_csv(summary, &mut out)
        .and_then(|_| out.flush())
        .map_err(|e| HarnessError::io(&path, e))?;
    write_plot_csvs(summary, dir)
}

/// Runs the grid group by group. With `out_dir`, each finished group is
/// appended to `raw.jsonl` and the summary files are rewritten, so an
/// interrupted sweep leaves consistent partial results.
pub fn sweep(cfg: &SweepConfig, out_dir: Option<&Path>) -> Result<SweepResult, HarnessError> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| HarnessError::InvalidConfig(format!("thread pool: {e}")))?;
    let seeds = cfg.scenario_seeds();
    let opts = EpisodeOptions {
        settings: cfg.settings,
        timing: cfg.timing,
    };

    let raw_path = out_dir.map(|d| d.join("raw.jsonl"));
    if let (Some(dir), Some(path)) = (out_dir, &raw_path) {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        File::create(path).map_err(|e| HarnessError::io(path, e))?;
    }

    let mut records = Vec::new();
    for &planner in &cfg.planners {
        for &m in &cfg.m_values {
            let group: Vec<EpisodeRecord> = pool.install(|| {
                seeds
                    .par_iter()
                    .map(|&seed| run_episode(planner, m, &cfg.scenario, seed, &opts))
                    .collect::<Result<_, _>>()
            })?;
            if let (Some(dir), Some(path)) = (out_dir, &raw_path) {
                let file = OpenOptions::new()
                    .append(true)
                    .open(path)
                    .map_err(|e| HarnessError::io(path, e))?;
                let mut out = BufWriter::new(file);
                for r in &group {
                    writeln!(out, "{}", r.to_json_line()).map_err(|e| HarnessError::io(path, e))?;
                }
                out.flush().map_err(|e| HarnessError::io(path, e))?;
                records.extend(group);
                write_summaries(&aggregate(&records)?, dir)?;
            } else {
                records.extend(group);
            }
        }
    }
    let summary = aggregate(&records)?;
    Ok(SweepResult { records, summary })
}
