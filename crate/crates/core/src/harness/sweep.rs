//! Parameter sweeps over network size, fading strength and node density.

use serde::{Deserialize, Serialize};

use super::config::ScenarioConfig;
use super::monte_carlo;
use crate::channel::Regime;
use crate::error::{Error, Result};
use crate::metrics::AggregateStats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Run,
    Nodes,
    Fading,
    Density,
}

impl SweepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepKind::Run => "run",
            SweepKind::Nodes => "sweep_nodes",
            SweepKind::Fading => "sweep_fading",
            SweepKind::Density => "sweep_density",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub kind: SweepKind,
    pub n_nodes: usize,
    pub regime: Regime,
    pub sigma_fade: f64,
    pub rho_per_km3: f64,
    pub stats: AggregateStats,
    /// Key rate relative to the smallest σ in the same (N, regime) series.
    pub normalized_key_rate: Option<f64>,
}

fn row(kind: SweepKind, cfg: &ScenarioConfig, threads: usize) -> Result<SweepRow> {
    let mc = monte_carlo(cfg, threads)?;
    Ok(SweepRow {
        kind,
        n_nodes: cfg.constellation.n_nodes,
        regime: cfg.channel.regime,
        sigma_fade: cfg.sigma_fade(),
        rho_per_km3: mc.mean_density_per_km3,
        stats: mc.stats,
        normalized_key_rate: None,
    })
}

fn checked_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() {
        return Err(Error::Config("sweep needs at least one network size".into()));
    }
    if let Some(n) = sizes.iter().find(|n| !(2..=1000).contains(*n)) {
        return Err(Error::Config(format!("network size {n} outside 2..=1000")));
    }
    Ok(())
}

/// One row per (size, regime); regimes vary fastest.
pub fn sweep_nodes(
    base: &ScenarioConfig,
    sizes: &[usize],
    regimes: &[Regime],
    threads: usize,
) -> Result<Vec<SweepRow>> {
    checked_sizes(sizes)?;
    let mut rows = Vec::with_capacity(sizes.len() * regimes.len());
    for &n in sizes {
        for &regime in regimes {
            rows.push(row(SweepKind::Nodes, &base.with_nodes(n).with_regime(regime), threads)?);
        }
    }
    Ok(rows)
}

/// One row per (regime, size, σ). Regime losses stay fixed while σ varies,
/// and key rates are normalised to the smallest σ of each series.
pub fn sweep_fading(
    base: &ScenarioConfig,
    sizes: &[usize],
    sigmas: &[f64],
    regimes: &[Regime],
    threads: usize,
) -> Result<Vec<SweepRow>> {
    checked_sizes(sizes)?;
    if sigmas.is_empty() {
        return Err(Error::Config("fading sweep needs at least one σ".into()));
    }
    let mut sorted = sigmas.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut rows = Vec::new();
    for &regime in regimes {
        for &n in sizes {
            let mut series = Vec::with_capacity(sorted.len());
            for &sigma in &sorted {
                let mut cfg = base.with_nodes(n).with_regime(regime);
                cfg.channel.sigma_fade = Some(sigma);
                cfg.validate()?;
                series.push(row(SweepKind::Fading, &cfg, threads)?);
            }
            let reference = series[0].stats.mean_key_rate_bps;
            for r in &mut series {
                r.normalized_key_rate = Some(if reference > 0.0 {
                    r.stats.mean_key_rate_bps / reference
                } else {
                    0.0
                });
            }
            rows.extend(series);
        }
    }
    Ok(rows)
}

/// One row per (regime, size) with the resulting volumetric density.
pub fn sweep_density(
    base: &ScenarioConfig,
    sizes: &[usize],
    regimes: &[Regime],
    threads: usize,
) -> Result<Vec<SweepRow>> {
    checked_sizes(sizes)?;
    let mut rows = Vec::new();
    for &regime in regimes {
        for &n in sizes {
            rows.push(row(SweepKind::Density, &base.with_nodes(n).with_regime(regime), threads)?);
        }
    }
    Ok(rows)
}
