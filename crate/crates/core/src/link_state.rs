//! Per-edge dynamic state: current quality, bounded histories, deviation
//! flags, trust evolution and network-wide dispersion.

use std::collections::{BTreeMap, VecDeque};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::channel::LinkSample;
use crate::error::{Error, Result};

pub const DEFAULT_WINDOW: usize = 10;
pub const DEFAULT_EPS_F: f64 = 0.05;
pub const DEFAULT_EPS_R: f64 = 0.10;
pub const DEFAULT_TRUST_SIGMA: f64 = 0.01;
/// Lower bound on the rate normaliser in the relative rate deviation.
pub const RATE_FLOOR_BPS: f64 = f64::MIN_POSITIVE;

/// Canonical undirected edge key, smaller endpoint first.
pub type EdgeKey = (usize, usize);

pub fn edge_key(i: usize, j: usize) -> EdgeKey {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkState {
    pub i: usize,
    pub j: usize,
    pub fidelity: f64,
    pub rate_bps: f64,
    pub trust: f64,
    pub transmittance: f64,
    pub distance_km: f64,
    window: usize,
    fidelity_history: VecDeque<f64>,
    rate_history: VecDeque<f64>,
    /// Moving averages as they stood before the latest sample was pushed.
    fidelity_baseline: f64,
    rate_baseline: f64,
    pub excluded_until: Option<f64>,
    /// Deviation flag from the most recent sensing pass.
    pub flagged: bool,
    /// Within range at the current step.
    pub active: bool,
}

impl LinkState {
    pub fn new(i: usize, j: usize, trust: f64, window: usize) -> Self {
        let (i, j) = edge_key(i, j);
        Self {
            i,
            j,
            fidelity: 0.0,
            rate_bps: 0.0,
            trust: trust.clamp(0.0, 1.0),
            transmittance: 1.0,
            distance_km: 0.0,
            window: window.max(1),
            fidelity_history: VecDeque::with_capacity(window.max(1)),
            rate_history: VecDeque::with_capacity(window.max(1)),
            fidelity_baseline: 0.0,
            rate_baseline: 0.0,
            excluded_until: None,
            flagged: false,
            active: true,
        }
    }

    pub fn key(&self) -> EdgeKey {
        (self.i, self.j)
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn fidelity_history(&self) -> &VecDeque<f64> {
        &self.fidelity_history
    }

    pub fn rate_history(&self) -> &VecDeque<f64> {
        &self.rate_history
    }

    pub fn fidelity_moving_average(&self) -> Option<f64> {
        mean(&self.fidelity_history)
    }

    pub fn rate_moving_average(&self) -> Option<f64> {
        mean(&self.rate_history)
    }

    /// Excluded from routing at time `t`.
    pub fn is_excluded(&self, t: f64) -> bool {
        self.excluded_until.is_some_and(|until| t <= until)
    }

    /// Replace the current quality with `sample` and push it onto the
    /// histories. The deviation baseline is the average before the push.
    pub fn update(&mut self, sample: &LinkSample, distance_km: f64) {
        self.fidelity_baseline = self.fidelity_moving_average().unwrap_or(sample.fidelity);
        self.rate_baseline = self.rate_moving_average().unwrap_or(sample.rate_bps);
        self.fidelity = sample.fidelity;
        self.rate_bps = sample.rate_bps;
        self.transmittance = sample.transmittance;
        self.distance_km = distance_km;
        push_bounded(&mut self.fidelity_history, sample.fidelity, self.window);
        push_bounded(&mut self.rate_history, sample.rate_bps, self.window);
    }

    pub fn deviation(&self, eps_f: f64, eps_r: f64) -> Result<Deviation> {
        if self.fidelity_history.is_empty() {
            return Err(Error::EmptyHistory(self.i, self.j));
        }
        let delta_f = (self.fidelity - self.fidelity_baseline).abs();
        let delta_r = (self.rate_bps - self.rate_baseline).abs() / self.rate_baseline.max(RATE_FLOOR_BPS);
        Ok(Deviation {
            delta_f,
            delta_r,
            flagged: delta_f > eps_f || delta_r > eps_r,
        })
    }

    /// Clamped Gaussian random walk on the trust coefficient.
    pub fn evolve_trust<R: Rng + ?Sized>(&mut self, sigma: f64, rng: &mut R) {
        let nu: f64 = rng.sample(StandardNormal);
        self.trust = (self.trust + sigma * nu).clamp(0.0, 1.0);
    }
}

fn push_bounded(buf: &mut VecDeque<f64>, v: f64, window: usize) {
    while buf.len() >= window {
        buf.pop_front();
    }
    buf.push_back(v);
}

fn mean(buf: &VecDeque<f64>) -> Option<f64> {
    if buf.is_empty() {
        None
    } else {
        Some(buf.iter().sum::<f64>() / buf.len() as f64)
    }
}

/// Free-function form of [`LinkState::update`].
pub fn update_link(mut link: LinkState, sample: &LinkSample, distance_km: f64) -> LinkState {
    link.update(sample, distance_km);
    link
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub delta_f: f64,
    /// Rate deviation relative to the rate moving average.
    pub delta_r: f64,
    pub flagged: bool,
}

pub fn deviation_flags(link: &LinkState, eps_f: f64, eps_r: f64) -> Result<Deviation> {
    link.deviation(eps_f, eps_r)
}

pub fn evolve_trust<R: Rng + ?Sized>(mut link: LinkState, sigma: f64, rng: &mut R) -> LinkState {
    link.evolve_trust(sigma, rng);
    link
}

/// Spread of link quality across the network at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DispersionStats {
    /// Population standard deviation of fidelities.
    pub sigma_f: f64,
    /// Coefficient of variation of rates.
    pub sigma_r: f64,
}

pub fn network_dispersion<'a, I>(links: I) -> Result<DispersionStats>
where
    I: IntoIterator<Item = &'a LinkState>,
{
    let (mut n, mut sum_f, mut sum_r) = (0usize, 0.0, 0.0);
    let mut fids = Vec::new();
    let mut rates = Vec::new();
    for l in links {
        n += 1;
        sum_f += l.fidelity;
        sum_r += l.rate_bps;
        fids.push(l.fidelity);
        rates.push(l.rate_bps);
    }
    if n == 0 {
        return Err(Error::NoActiveLinks);
    }
    let nf = n as f64;
    let (mean_f, mean_r) = (sum_f / nf, sum_r / nf);
    let var_f = fids.iter().map(|f| (f - mean_f).powi(2)).sum::<f64>() / nf;
    let var_r = rates.iter().map(|r| (r - mean_r).powi(2)).sum::<f64>() / nf;
    let sigma_r = if mean_r > 0.0 {
        var_r.sqrt() / mean_r
    } else {
        0.0
    };
    Ok(DispersionStats {
        sigma_f: var_f.sqrt(),
        sigma_r,
    })
}

/// All links seen during an episode, keyed by canonical edge.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LinkRegistry {
    links: BTreeMap<EdgeKey, LinkState>,
}

impl LinkRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, link: LinkState) {
        self.links.insert(link.key(), link);
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&LinkState> {
        self.links.get(&edge_key(i, j))
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> Option<&mut LinkState> {
        self.links.get_mut(&edge_key(i, j))
    }

    pub fn entry_or_insert_with(
        &mut self,
        i: usize,
        j: usize,
        make: impl FnOnce() -> LinkState,
    ) -> &mut LinkState {
        self.links.entry(edge_key(i, j)).or_insert_with(make)
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &LinkState> {
        self.links.values()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut LinkState> {
        self.links.values_mut()
    }

    pub fn active(&self) -> impl Iterator<Item = &LinkState> {
        self.links.values().filter(|l| l.active)
    }
}

impl FromIterator<LinkState> for LinkRegistry {
    fn from_iter<T: IntoIterator<Item = LinkState>>(iter: T) -> Self {
        let mut reg = LinkRegistry::new();
        for l in iter {
            reg.insert(l);
        }
        reg
    }
}
