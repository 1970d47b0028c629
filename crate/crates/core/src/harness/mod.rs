//! Monte Carlo simulation harness: scenario config, episodes, sweeps and
//! result files.

mod config;
mod episode;
mod output;
mod sweep;

pub use config::{
    apply_override, ChannelConfig, ConstellationConfig, RoutingConfig, ScenarioConfig,
    SimulationConfig, SweepConfig, DEFAULT_CONFIG_TOML,
};
pub use episode::{
    episode_seed, run_episode, stream_rng, EpisodeRecord, LinkSnapshot, RouteRecord, StepRecord,
    Stream,
};
pub use output::{
    output_file_name, run_id, write_json, write_links_csv, write_routes_csv, write_sweep_csv,
    SweepCsvRow,
};
pub use sweep::{sweep_density, sweep_fading, sweep_nodes, SweepKind, SweepRow};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{aggregate, AggregateStats};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloResult {
    /// Pooled over every request of every run.
    pub stats: AggregateStats,
    /// One entry per run; `None` when a run routed nothing.
    pub per_run: Vec<Option<AggregateStats>>,
    pub mean_density_per_km3: f64,
    pub episodes: Vec<EpisodeRecord>,
}

impl MonteCarloResult {
    /// Standard error of the mean effective fidelity across runs.
    pub fn standard_error_f_eff(&self) -> f64 {
        let means: Vec<f64> = self.per_run.iter().flatten().map(|s| s.mean_f_eff).collect();
        let n = means.len() as f64;
        if means.len() < 2 {
            return 0.0;
        }
        let m = means.iter().sum::<f64>() / n;
        let var = means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    }
}

/// Run `n_mc` episodes on up to `threads` worker threads. Results are merged
/// in run order, so the outcome does not depend on `threads`.
pub fn monte_carlo(config: &ScenarioConfig, threads: usize) -> Result<MonteCarloResult> {
    config.validate()?;
    let runs = config.simulation.n_mc;
    let episodes: Vec<EpisodeRecord> = if threads <= 1 {
        (0..runs).map(|r| run_episode(config, r)).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        pool.install(|| {
            (0..runs)
                .into_par_iter()
                .map(|r| run_episode(config, r))
                .collect::<Result<_>>()
        })?
    };

    let mut stats = aggregate(episodes.iter().flat_map(EpisodeRecord::metrics))?;
    stats.run_count = runs;
    let per_run = episodes.iter().map(|e| aggregate(e.metrics()).ok()).collect();
    let mean_density_per_km3 =
        episodes.iter().map(|e| e.density_per_km3).sum::<f64>() / episodes.len() as f64;
    Ok(MonteCarloResult {
        stats,
        per_run,
        mean_density_per_km3,
        episodes,
    })
}
