use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::link_state::{DispersionStats, LinkState};

pub const BETA_FLOOR: f64 = 0.25;
/// Cap on the normalised inverse-rate term.
pub const RATE_COST_CAP: f64 = 10.0;
pub const ZETA_CLAMP: f64 = 2.0;

/// Coefficients of the composite link cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl Default for WeightVector {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            gamma: 0.2,
            delta: 0.6,
        }
    }
}

impl WeightVector {
    /// Weights for step `t` given the current dispersion and a perturbation
    /// `zeta` (clamped to ±2).
    pub fn adapted(stats: &DispersionStats, t: f64, zeta: f64) -> Self {
        let zeta = zeta.clamp(-ZETA_CLAMP, ZETA_CLAMP);
        Self {
            alpha: 1.0 + 3.0 * stats.sigma_f,
            beta: BETA_FLOOR.max(1.0 - 1.5 * stats.sigma_r),
            gamma: 0.2 + 0.08 * zeta,
            delta: 0.6 + 0.15 * (t / 40.0).sin(),
        }
    }
}

/// Replace the weights for step `t`; the previous vector is not carried over.
pub fn update_weights<R: Rng + ?Sized>(
    _prev: &WeightVector,
    stats: &DispersionStats,
    t: f64,
    rng: &mut R,
) -> WeightVector {
    let zeta: f64 = rng.sample(StandardNormal);
    WeightVector::adapted(stats, t, zeta)
}

/// `α(1−F) + β·min(rate_ref/R, cap) + γ(1−T) + δ·d/d_max`.
pub fn link_cost(
    link: &LinkState,
    weights: &WeightVector,
    distance_km: f64,
    d_max_km: f64,
    rate_ref_bps: f64,
) -> f64 {
    let rate_term = if link.rate_bps > 0.0 {
        (rate_ref_bps / link.rate_bps).min(RATE_COST_CAP)
    } else {
        RATE_COST_CAP
    };
    let cost = weights.alpha * (1.0 - link.fidelity)
        + weights.beta * rate_term
        + weights.gamma * (1.0 - link.trust)
        + weights.delta * (distance_km / d_max_km);
    cost.max(0.0)
}

/// Median of the given rates; zero for an empty set.
pub fn median_rate(rates: &mut [f64]) -> f64 {
    if rates.is_empty() {
        return 0.0;
    }
    rates.sort_by(f64::total_cmp);
    let n = rates.len();
    if n % 2 == 1 {
        rates[n / 2]
    } else {
        0.5 * (rates[n / 2 - 1] + rates[n / 2])
    }
}
