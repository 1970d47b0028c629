//! CSV and JSON result files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};

use super::episode::{EpisodeRecord, LinkSnapshot};
use super::sweep::{SweepKind, SweepRow};
use crate::channel::Regime;
use crate::error::Result;

/// Flat CSV form of a [`SweepRow`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCsvRow {
    #[serde(rename = "N")]
    pub n_nodes: usize,
    pub regime: Regime,
    pub sigma_fade: f64,
    pub rho: f64,
    pub mean_f_eff: f64,
    pub mean_r_eff: f64,
    pub mean_path_len: f64,
    pub mean_key_rate: f64,
    pub perf_index: f64,
    pub n_runs: usize,
    pub std_f_eff: f64,
    pub std_r_eff: f64,
    pub std_path_len: f64,
    pub std_key_rate: f64,
    pub availability: f64,
    pub qber_compliant_fraction: f64,
    pub n_routes: usize,
    pub n_requests: usize,
    pub normalized_key_rate: Option<f64>,
}

impl From<&SweepRow> for SweepCsvRow {
    fn from(r: &SweepRow) -> Self {
        let s = &r.stats;
        Self {
            n_nodes: r.n_nodes,
            regime: r.regime,
            sigma_fade: r.sigma_fade,
            rho: r.rho_per_km3,
            mean_f_eff: s.mean_f_eff,
            mean_r_eff: s.mean_r_eff_bps,
            mean_path_len: s.mean_path_len,
            mean_key_rate: s.mean_key_rate_bps,
            perf_index: s.perf_index,
            n_runs: s.run_count,
            std_f_eff: s.std_f_eff,
            std_r_eff: s.std_r_eff_bps,
            std_path_len: s.std_path_len,
            std_key_rate: s.std_key_rate_bps,
            availability: s.availability,
            qber_compliant_fraction: s.qber_compliant_fraction,
            n_routes: s.n_routes,
            n_requests: s.n_requests,
            normalized_key_rate: r.normalized_key_rate,
        }
    }
}

pub fn run_id(seed: u64) -> String {
    format!("seed{seed}")
}

/// `<sweep>_<regime>_<run id>.csv`
pub fn output_file_name(kind: SweepKind, regime: Regime, run_id: &str) -> String {
    format!("{}_{}_{}.csv", kind.as_str(), regime.as_str(), run_id)
}

pub fn write_sweep_csv<'a, I>(rows: I, path: &FsPath) -> Result<()>
where
    I: IntoIterator<Item = &'a SweepRow>,
{
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(SweepCsvRow::from(r))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct RouteCsvRow<'a> {
    run: usize,
    step: usize,
    t_s: f64,
    source: usize,
    destination: usize,
    path: &'a str,
    hops: Option<usize>,
    cost: Option<f64>,
    f_eff: Option<f64>,
    r_eff: Option<f64>,
    key_rate: Option<f64>,
    qber: Option<f64>,
    failover_used: bool,
}

/// Every route request of every episode; unrouted requests have empty
/// metric columns.
pub fn write_routes_csv(episodes: &[EpisodeRecord], path: &FsPath) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for ep in episodes {
        for r in &ep.routes {
            let nodes = r
                .path
                .as_ref()
                .map(|p| p.iter().map(usize::to_string).collect::<Vec<_>>().join("-"))
                .unwrap_or_default();
            let m = r.metrics.as_ref();
            w.serialize(RouteCsvRow {
                run: r.run,
                step: r.step,
                t_s: r.t_s,
                source: r.source,
                destination: r.destination,
                path: &nodes,
                hops: m.map(|m| m.hops),
                cost: r.cost,
                f_eff: m.map(|m| m.f_eff),
                r_eff: m.map(|m| m.r_eff_bps),
                key_rate: m.map(|m| m.key_rate_bps),
                qber: m.map(|m| m.qber_path),
                failover_used: r.failover_used,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_links_csv(episodes: &[EpisodeRecord], path: &FsPath) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "run", "step", "i", "j", "distance_km", "fidelity", "rate_bps", "trust",
        "transmittance", "flagged", "excluded",
    ])?;
    for ep in episodes {
        for l in &ep.links {
            let LinkSnapshot {
                step,
                i,
                j,
                distance_km,
                fidelity,
                rate_bps,
                trust,
                transmittance,
                flagged,
                excluded,
            } = l;
            w.serialize((
                ep.run, step, i, j, distance_km, fidelity, rate_bps, trust, transmittance,
                flagged, excluded,
            ))?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(value: &T, path: &FsPath) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value)
        .map_err(|e| crate::error::Error::Io(e.to_string()))?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}
