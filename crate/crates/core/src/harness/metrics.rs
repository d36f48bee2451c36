use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::planner::PlannerId;
use crate::world::Cause;

use super::{split, EpisodeRecord, HarnessError};

pub const SUMMARY_HEADER: &str = "planner,m,mean_rho,std_rho,eta,success_rate,mean_tplan,std_tplan,n";
pub const BOOTSTRAP_RESAMPLES: usize = 10_000;

/// Aggregate metrics for one (planner, m) group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub planner: PlannerId,
    pub m: usize,
    pub n: usize,
    pub mean_rho: f64,
    pub std_rho: f64,
    pub rho_ci95: (f64, f64),
    /// Fraction of episodes ending in collision.
    pub eta: f64,
    pub success_rate: f64,
    pub timeout_rate: f64,
    pub out_of_bounds_rate: f64,
    /// Mean and std of per-step planning time, pooled over all steps.
    pub mean_tplan: f64,
    pub std_tplan: f64,
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Sample standard deviation; zero for fewer than two values.
fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let mu = mean(xs);
    (xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Percentile bootstrap 95% interval of the mean.
pub fn bootstrap_mean_ci(xs: &[f64], resamples: usize, seed: u64) -> (f64, f64) {
    if xs.len() < 2 || resamples == 0 {
        let mu = mean(xs);
        return (mu, mu);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut means: Vec<f64> = (0..resamples)
        .map(|_| (0..xs.len()).map(|_| xs[rng.gen_range(0..xs.len())]).sum::<f64>() / xs.len() as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let at = |q: f64| means[((q * (resamples - 1) as f64).round() as usize).min(resamples - 1)];
    (at(0.025), at(0.975))
}

fn rate(records: &[&EpisodeRecord], cause: Cause) -> f64 {
    records.iter().filter(|r| r.outcome == cause).count() as f64 / records.len() as f64
}

fn summarize(planner: PlannerId, m: usize, records: &[&EpisodeRecord]) -> MetricsSummary {
    let rhos: Vec<f64> = records.iter().map(|r| r.rho).collect();
    let times: Vec<f64> = records.iter().flat_map(|r| r.planning_times()).collect();
    let planner_index = PlannerId::ALL.iter().position(|&p| p == planner).unwrap_or(0) as u64;
    MetricsSummary {
        planner,
        m,
        n: records.len(),
        mean_rho: mean(&rhos),
        std_rho: std_dev(&rhos),
        rho_ci95: bootstrap_mean_ci(&rhos, BOOTSTRAP_RESAMPLES, split(planner_index, m as u64)),
        eta: rate(records, Cause::Collision),
        success_rate: rate(records, Cause::GoalReached),
        timeout_rate: rate(records, Cause::StepLimit),
        out_of_bounds_rate: rate(records, Cause::OutOfBounds),
        mean_tplan: mean(&times),
        std_tplan: std_dev(&times),
    }
}

/// One summary per (planner, m), ordered by planner then m.
pub fn aggregate(records: &[EpisodeRecord]) -> Result<Vec<MetricsSummary>, HarnessError> {
    if records.is_empty() {
        return Err(HarnessError::EmptyGroup);
    }
    let mut groups: BTreeMap<(PlannerId, usize), Vec<&EpisodeRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.planner, r.m)).or_default().push(r);
    }
    Ok(groups
        .into_iter()
        .map(|((planner, m), group)| summarize(planner, m, &group))
        .collect())
}

pub fn write_summary_csv<W: Write>(summaries: &[MetricsSummary], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{SUMMARY_HEADER}")?;
    for s in summaries {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            s.planner, s.m, s.mean_rho, s.std_rho, s.eta, s.success_rate, s.mean_tplan, s.std_tplan, s.n
        )?;
    }
    Ok(())
}

/// Writes `plot_rho.csv`, `plot_eta.csv`, `plot_success.csv` and
/// `plot_tplan.csv` into `dir`, one row per (planner, m).
pub fn write_plot_csvs(summaries: &[MetricsSummary], dir: &Path) -> Result<(), HarnessError> {
    type Row = fn(&MetricsSummary) -> String;
    let tables: [(&str, &str, Row); 4] = [
        ("plot_rho.csv", "mean_rho,std_rho,ci_low,ci_high", |s| {
            format!("{},{},{},{}", s.mean_rho, s.std_rho, s.rho_ci95.0, s.rho_ci95.1)
        }),
        ("plot_eta.csv", "eta,n", |s| format!("{},{}", s.eta, s.n)),
        ("plot_success.csv", "success_rate,timeout_rate,out_of_bounds_rate", |s| {
            format!("{},{},{}", s.success_rate, s.timeout_rate, s.out_of_bounds_rate)
        }),
        ("plot_tplan.csv", "mean_tplan,std_tplan", |s| format!("{},{}", s.mean_tplan, s.std_tplan)),
    ];
    for (name, columns, row) in tables {
        let path = dir.join(name);
        let mut text = format!("planner,m,{columns}\n");
        for s in summaries {
            text.push_str(&format!("{},{},{}\n", s.planner, s.m, row(s)));
        }
        std::fs::write(&path, text).map_err(|e| HarnessError::io(&path, e))?;
    }
    Ok(())
}
