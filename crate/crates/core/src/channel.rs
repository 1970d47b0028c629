//! Free-space optical link budget and the loss-to-quality mapping.
//!
//! Losses are in dB. Transmittance follows the amplitude convention
//! `η = 10^(-(L + σ·ξ)/20)` unless `power_convention` is set, in which case
//! the divisor is 10.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

/// Scattering floor added by the composite loss model, dB.
pub const COMPOSITE_SCATTERING_DB: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossModel {
    /// Atmospheric absorption used as given.
    BeerLambert,
    /// Absorption scaled by `1 + 2σ_fade`.
    TurbulenceWeighted,
    /// Absorption scaled by `1 + σ_fade` plus a fixed scattering floor.
    Composite,
}

impl LossModel {
    pub const ALL: [LossModel; 3] = [
        LossModel::BeerLambert,
        LossModel::TurbulenceWeighted,
        LossModel::Composite,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LossModel::BeerLambert => "beer_lambert",
            LossModel::TurbulenceWeighted => "turbulence_weighted",
            LossModel::Composite => "composite",
        }
    }

    /// Effective atmospheric term for absorption `atm_loss_db`.
    pub fn atmospheric_loss_db(self, atm_loss_db: f64, sigma_fade: f64) -> f64 {
        match self {
            LossModel::BeerLambert => atm_loss_db,
            LossModel::TurbulenceWeighted => atm_loss_db * (1.0 + 2.0 * sigma_fade),
            LossModel::Composite => atm_loss_db * (1.0 + sigma_fade) + COMPOSITE_SCATTERING_DB,
        }
    }
}

impl fmt::Display for LossModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LossModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LossModel::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown loss model `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    ClearSky,
    Standard,
    StrongTurbulence,
}

impl Regime {
    pub const ALL: [Regime; 3] = [Regime::ClearSky, Regime::Standard, Regime::StrongTurbulence];

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::ClearSky => "clear_sky",
            Regime::Standard => "standard",
            Regime::StrongTurbulence => "strong_turbulence",
        }
    }

    pub fn default_atm_loss_db(self) -> f64 {
        match self {
            Regime::ClearSky => 38.0,
            Regime::Standard => 45.0,
            Regime::StrongTurbulence => 52.0,
        }
    }

    pub fn default_sigma_fade(self) -> f64 {
        match self {
            Regime::ClearSky => 0.02,
            Regime::Standard => 0.05,
            Regime::StrongTurbulence => 0.12,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Regime::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown regime `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub wavelength_m: f64,
    /// Atmospheric absorption before the loss-model transform, dB.
    pub atm_loss_db: f64,
    pub sigma_fade: f64,
    pub pointing_error_rad: f64,
    pub divergence_rad: f64,
    pub system_loss_db: f64,
    pub fidelity_base: f64,
    pub rate_base_bps: f64,
    pub fidelity_decay_per_db: f64,
    pub loss_model: LossModel,
    /// Use `10^(-L/10)` instead of `10^(-L/20)` for transmittance.
    pub power_convention: bool,
}

impl Default for ChannelParams {
    fn default() -> Self {
        let wavelength_m = 810e-9;
        Self {
            wavelength_m,
            atm_loss_db: Regime::Standard.default_atm_loss_db(),
            sigma_fade: Regime::Standard.default_sigma_fade(),
            pointing_error_rad: 1.2e-6,
            divergence_rad: wavelength_m / 0.10,
            system_loss_db: system_loss_db(3.0, 0.85),
            fidelity_base: 0.98,
            rate_base_bps: 1e6,
            fidelity_decay_per_db: 1e-3,
            loss_model: LossModel::BeerLambert,
            power_convention: false,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        ensure(self.wavelength_m > 0.0, "wavelength_m", "must be positive")?;
        ensure(self.sigma_fade >= 0.0, "sigma_fade", "must be non-negative")?;
        ensure(
            self.fidelity_base > 0.0 && self.fidelity_base <= 1.0,
            "fidelity_base",
            format!("must lie in (0, 1], got {}", self.fidelity_base),
        )?;
        ensure(self.rate_base_bps > 0.0, "rate_base_bps", "must be positive")?;
        ensure(
            self.fidelity_decay_per_db >= 0.0,
            "fidelity_decay_per_db",
            "must be non-negative",
        )?;
        ensure(self.atm_loss_db >= 0.0, "atm_loss_db", "must be non-negative")?;
        ensure(self.system_loss_db >= 0.0, "system_loss_db", "must be non-negative")?;
        ensure(
            self.pointing_error_rad >= 0.0,
            "pointing_error_rad",
            "must be non-negative",
        )?;
        ensure(self.divergence_rad > 0.0, "divergence_rad", "must be positive")?;
        Ok(())
    }

    fn db_divisor(&self) -> f64 {
        if self.power_convention {
            10.0
        } else {
            20.0
        }
    }
}

/// Optics coupling loss plus the dB penalty of a detector efficiency.
pub fn system_loss_db(coupling_db: f64, detector_efficiency: f64) -> f64 {
    coupling_db - 10.0 * detector_efficiency.log10()
}

/// Free-space spreading loss `20·log10(4πd/λ)`.
pub fn geometric_loss_db(d_km: f64, wavelength_m: f64) -> Result<f64> {
    ensure(d_km > 0.0, "d_km", format!("must be positive, got {d_km}"))?;
    ensure(
        wavelength_m > 0.0,
        "wavelength_m",
        format!("must be positive, got {wavelength_m}"),
    )?;
    let d_m = d_km * 1e3;
    Ok(20.0 * (4.0 * std::f64::consts::PI * d_m / wavelength_m).log10())
}

pub fn pointing_loss_db(theta_p_rad: f64, theta_div_rad: f64) -> Result<f64> {
    ensure(
        theta_div_rad > 0.0,
        "theta_div_rad",
        "beam divergence must be positive",
    )?;
    ensure(theta_p_rad >= 0.0, "theta_p_rad", "must be non-negative")?;
    let ratio = theta_p_rad / theta_div_rad;
    Ok(12.0 * ratio * ratio)
}

pub fn total_loss_db(d_km: f64, params: &ChannelParams) -> Result<f64> {
    let geo = geometric_loss_db(d_km, params.wavelength_m)?;
    let point = pointing_loss_db(params.pointing_error_rad, params.divergence_rad)?;
    let atm = params
        .loss_model
        .atmospheric_loss_db(params.atm_loss_db, params.sigma_fade);
    Ok(geo + atm + point + params.system_loss_db)
}

/// One fading draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadeDraw {
    pub transmittance: f64,
    /// The raw value fell outside (0, 1] and was clamped.
    pub clamped: bool,
}

/// Transmittance for a given fading realisation `xi`.
pub fn transmittance_for(loss_total_db: f64, sigma_fade: f64, xi: f64, divisor: f64) -> FadeDraw {
    let raw = 10f64.powf(-(loss_total_db + sigma_fade * xi) / divisor);
    if raw > 1.0 {
        FadeDraw {
            transmittance: 1.0,
            clamped: true,
        }
    } else if raw < f64::MIN_POSITIVE {
        FadeDraw {
            transmittance: f64::MIN_POSITIVE,
            clamped: true,
        }
    } else {
        FadeDraw {
            transmittance: raw,
            clamped: false,
        }
    }
}

/// Draw `η = 10^(-(L + σ·ξ)/20)` with `ξ ~ N(0, 1)`, clamped to (0, 1].
pub fn sample_transmittance<R: Rng + ?Sized>(
    loss_total_db: f64,
    sigma_fade: f64,
    rng: &mut R,
) -> f64 {
    let xi: f64 = rng.sample(StandardNormal);
    transmittance_for(loss_total_db, sigma_fade, xi, 20.0).transmittance
}

/// `F_0·exp(-κ·L)`.
pub fn link_fidelity(loss_total_db: f64, params: &ChannelParams) -> f64 {
    params.fidelity_base * (-params.fidelity_decay_per_db * loss_total_db).exp()
}

pub fn qber(fidelity: f64) -> f64 {
    0.5 * (1.0 - fidelity)
}

/// `R_0·η²·(1 − 2Q(F))`, never negative.
///
/// With `Q = (1 − F)/2` the error factor is exactly `F`; it is applied in that
/// form so tiny fidelities keep full relative precision.
pub fn link_rate(eta: f64, fidelity: f64, params: &ChannelParams) -> f64 {
    (params.rate_base_bps * eta * eta * fidelity).max(0.0)
}

/// Instantaneous link quality derived from one channel draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkSample {
    pub loss_total_db: f64,
    pub transmittance: f64,
    pub fidelity: f64,
    pub rate_bps: f64,
    pub qber: f64,
    #[serde(skip)]
    pub clamped: bool,
}

/// Full channel evaluation at distance `d_km` for a given fading draw.
pub fn link_sample_with(d_km: f64, params: &ChannelParams, xi: f64) -> Result<LinkSample> {
    let loss = total_loss_db(d_km, params)?;
    let draw = transmittance_for(loss, params.sigma_fade, xi, params.db_divisor());
    let fidelity = link_fidelity(loss, params);
    Ok(LinkSample {
        loss_total_db: loss,
        transmittance: draw.transmittance,
        fidelity,
        rate_bps: link_rate(draw.transmittance, fidelity, params),
        qber: qber(fidelity),
        clamped: draw.clamped,
    })
}

pub fn sample_link<R: Rng + ?Sized>(
    d_km: f64,
    params: &ChannelParams,
    rng: &mut R,
) -> Result<LinkSample> {
    let xi: f64 = rng.sample(StandardNormal);
    link_sample_with(d_km, params, xi)
}
