//! End-to-end path metrics and Monte Carlo aggregates.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::channel::qber;
use crate::error::{Error, Result};
use crate::link_state::LinkRegistry;

/// QBER reporting threshold.
pub const DEFAULT_Q_MAX: f64 = 0.05;

/// Product of edge fidelities along `nodes`; 1 for a zero-hop path.
pub fn path_fidelity(nodes: &[usize], links: &LinkRegistry) -> Result<f64> {
    nodes.windows(2).try_fold(1.0, |acc, w| {
        links
            .get(w[0], w[1])
            .map(|l| acc * l.fidelity)
            .ok_or(Error::MissingLink(w[0], w[1]))
    })
}

/// Bottleneck (minimum) edge rate along `nodes`.
pub fn path_rate(nodes: &[usize], links: &LinkRegistry) -> Result<f64> {
    if nodes.len() < 2 {
        return Err(Error::EmptyPath);
    }
    nodes.windows(2).try_fold(f64::INFINITY, |acc, w| {
        links
            .get(w[0], w[1])
            .map(|l| acc.min(l.rate_bps))
            .ok_or(Error::MissingLink(w[0], w[1]))
    })
}

/// `R_eff·(1 − 2Q(F_eff))`, which reduces to `R_eff·F_eff`.
pub fn secure_key_rate(f_eff: f64, r_eff_bps: f64) -> f64 {
    (r_eff_bps * f_eff).max(0.0)
}

/// Key rate from an explicit QBER value, `R·(1 − 2Q)`.
pub fn key_rate_from_qber(r_eff_bps: f64, q: f64) -> f64 {
    (r_eff_bps * (1.0 - 2.0 * q)).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathMetrics {
    pub f_eff: f64,
    pub r_eff_bps: f64,
    pub key_rate_bps: f64,
    pub hops: usize,
    pub qber_path: f64,
    pub qber_exceeded: bool,
}

impl PathMetrics {
    pub fn evaluate(nodes: &[usize], links: &LinkRegistry, q_max: f64) -> Result<Self> {
        let f_eff = path_fidelity(nodes, links)?;
        let r_eff_bps = path_rate(nodes, links)?;
        let q = qber(f_eff);
        Ok(Self {
            f_eff,
            r_eff_bps,
            key_rate_bps: secure_key_rate(f_eff, r_eff_bps),
            hops: nodes.len() - 1,
            qber_path: q,
            qber_exceeded: q > q_max,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AggregateStats {
    pub mean_f_eff: f64,
    pub mean_r_eff_bps: f64,
    pub mean_path_len: f64,
    pub mean_key_rate_bps: f64,
    pub perf_index: f64,
    pub std_f_eff: f64,
    pub std_r_eff_bps: f64,
    pub std_path_len: f64,
    pub std_key_rate_bps: f64,
    /// Routed requests over all requests (routed plus no-path).
    pub availability: f64,
    /// Routed requests whose path QBER stays within the threshold.
    pub qber_compliant_fraction: f64,
    pub n_routes: usize,
    pub n_requests: usize,
    pub run_count: usize,
}

/// `F̄_eff · R̄_eff / L̄_path`.
pub fn performance_index(mean_f_eff: f64, mean_r_eff_bps: f64, mean_path_len: f64) -> Result<f64> {
    if mean_path_len <= 0.0 {
        return Err(Error::ZeroPathLength);
    }
    Ok(mean_f_eff * mean_r_eff_bps / mean_path_len)
}

/// Mean and sample standard deviation. Values are summed in sorted order so
/// the result does not depend on input order.
fn mean_std(mut values: Vec<f64>) -> (f64, f64) {
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let mut sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    sq.sort_by(f64::total_cmp);
    (mean, (sq.iter().sum::<f64>() / (n - 1.0)).sqrt())
}

/// Aggregate one group of requests; `None` entries are no-path requests and
/// only count toward availability.
pub fn aggregate<'a, I>(records: I) -> Result<AggregateStats>
where
    I: IntoIterator<Item = Option<&'a PathMetrics>>,
{
    let mut n_requests = 0;
    let routed: Vec<&PathMetrics> = records
        .into_iter()
        .inspect(|_| n_requests += 1)
        .flatten()
        .collect();
    if routed.is_empty() {
        return Err(Error::EmptyGroup(format!("{n_requests} requests, none routed")));
    }
    let (mean_f_eff, std_f_eff) = mean_std(routed.iter().map(|m| m.f_eff).collect());
    let (mean_r_eff_bps, std_r_eff_bps) = mean_std(routed.iter().map(|m| m.r_eff_bps).collect());
    let (mean_path_len, std_path_len) = mean_std(routed.iter().map(|m| m.hops as f64).collect());
    let (mean_key_rate_bps, std_key_rate_bps) =
        mean_std(routed.iter().map(|m| m.key_rate_bps).collect());
    let compliant = routed.iter().filter(|m| !m.qber_exceeded).count();
    Ok(AggregateStats {
        mean_f_eff,
        mean_r_eff_bps,
        mean_path_len,
        mean_key_rate_bps,
        perf_index: performance_index(mean_f_eff, mean_r_eff_bps, mean_path_len).unwrap_or(0.0),
        std_f_eff,
        std_r_eff_bps,
        std_path_len,
        std_key_rate_bps,
        availability: routed.len() as f64 / n_requests as f64,
        qber_compliant_fraction: compliant as f64 / routed.len() as f64,
        n_routes: routed.len(),
        n_requests,
        run_count: 1,
    })
}

/// Aggregate records per group key.
pub fn aggregate_by<'a, K, I>(records: I) -> Result<BTreeMap<K, AggregateStats>>
where
    K: Ord + Clone + std::fmt::Debug,
    I: IntoIterator<Item = (K, Option<&'a PathMetrics>)>,
{
    let mut groups: BTreeMap<K, Vec<Option<&PathMetrics>>> = BTreeMap::new();
    for (k, m) in records {
        groups.entry(k).or_default().push(m);
    }
    groups
        .into_iter()
        .map(|(k, rs)| {
            aggregate(rs)
                .map_err(|_| Error::EmptyGroup(format!("{k:?}")))
                .map(|s| (k, s))
        })
        .collect()
}
