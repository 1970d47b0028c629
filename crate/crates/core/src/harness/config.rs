//! Scenario configuration: TOML schema, dotted-key overrides and validation.

use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};

use crate::channel::{system_loss_db, ChannelParams, LossModel, Regime};
use crate::error::{Error, Result};
use crate::orbital::{ConstellationParams, ShellLayout};
use crate::routing::AlternateMode;

/// Default configuration shipped with the crate.
pub const DEFAULT_CONFIG_TOML: &str = include_str!("../../../../configs/default.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub constellation: ConstellationConfig,
    pub channel: ChannelConfig,
    pub routing: RoutingConfig,
    pub simulation: SimulationConfig,
    pub sweep: SweepConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstellationConfig {
    pub n_nodes: usize,
    pub altitude_km: f64,
    pub inclination_deg: f64,
    /// Orbital planes; 0 selects `round(sqrt(n_nodes))`.
    pub planes: usize,
    pub min_spacing_km: f64,
    pub d_max_km: f64,
    pub phase_span_deg: f64,
    pub raan_span_deg: f64,
    pub jitter_fraction: f64,
    pub shell_thickness_km: f64,
    /// Lower density bound the layout is expected to reach; reported only.
    pub min_density_per_km3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub regime: Regime,
    pub loss_model: LossModel,
    pub atm_loss_clear_sky_db: f64,
    pub atm_loss_standard_db: f64,
    pub atm_loss_strong_turbulence_db: f64,
    pub sigma_fade_clear_sky: f64,
    pub sigma_fade_standard: f64,
    pub sigma_fade_strong_turbulence: f64,
    /// Overrides the regime's fading deviation when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_fade: Option<f64>,
    pub wavelength_nm: f64,
    pub tx_aperture_m: f64,
    pub rx_aperture_m: f64,
    pub detector_efficiency: f64,
    pub coupling_loss_db: f64,
    pub pointing_error_urad: f64,
    /// Beam divergence; defaults to the transmitter diffraction limit λ/D_t.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divergence_urad: Option<f64>,
    pub fidelity_base: f64,
    pub rate_base_bps: f64,
    pub fidelity_decay_per_db: f64,
    pub power_convention: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoutingConfig {
    pub f_min: f64,
    pub t_min: f64,
    pub q_max: f64,
    pub eps_f: f64,
    pub eps_r: f64,
    pub window: usize,
    pub trust_sigma: f64,
    pub trust_init_min: f64,
    pub trust_init_max: f64,
    pub exclusion_s: f64,
    pub alternate: AlternateMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub t_sim_s: f64,
    pub step_s: f64,
    pub n_mc: usize,
    pub pairs_per_step: usize,
    /// Keep per-edge snapshots in episode records.
    pub record_links: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub sizes: Vec<usize>,
    pub sigmas: Vec<f64>,
    pub density_sizes: Vec<usize>,
    pub regimes: Vec<Regime>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        toml::from_str(DEFAULT_CONFIG_TOML).expect("shipped default config parses")
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::from_toml_with_overrides(text, &[])
    }

    /// Parse `text`, apply `key=value` overrides on dotted paths, then
    /// deserialize and validate.
    pub fn from_toml_with_overrides(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table =
            toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        for ov in overrides {
            apply_override(&mut table, ov)?;
        }
        let cfg: ScenarioConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &FsPath, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_with_overrides(&text, overrides)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn steps(&self) -> usize {
        (self.simulation.t_sim_s / self.simulation.step_s).round() as usize
    }

    pub fn planes(&self) -> usize {
        if self.constellation.planes == 0 {
            ConstellationParams::default_planes(self.constellation.n_nodes)
        } else {
            self.constellation.planes
        }
    }

    pub fn constellation_params(&self) -> ConstellationParams {
        let c = &self.constellation;
        ConstellationParams {
            n_nodes: c.n_nodes,
            altitude_km: c.altitude_km,
            inclination_rad: c.inclination_deg.to_radians(),
            planes: self.planes(),
            min_spacing_km: c.min_spacing_km,
            layout: ShellLayout {
                phase_span_rad: c.phase_span_deg.to_radians(),
                raan_span_rad: c.raan_span_deg.to_radians(),
                jitter_fraction: c.jitter_fraction,
            },
            shell_thickness_km: c.shell_thickness_km,
        }
    }

    pub fn atm_loss_db(&self) -> f64 {
        let c = &self.channel;
        match c.regime {
            Regime::ClearSky => c.atm_loss_clear_sky_db,
            Regime::Standard => c.atm_loss_standard_db,
            Regime::StrongTurbulence => c.atm_loss_strong_turbulence_db,
        }
    }

    /// Fading deviation in effect: the explicit override or the regime value.
    pub fn sigma_fade(&self) -> f64 {
        let c = &self.channel;
        c.sigma_fade.unwrap_or(match c.regime {
            Regime::ClearSky => c.sigma_fade_clear_sky,
            Regime::Standard => c.sigma_fade_standard,
            Regime::StrongTurbulence => c.sigma_fade_strong_turbulence,
        })
    }

    pub fn channel_params(&self) -> ChannelParams {
        let c = &self.channel;
        let wavelength_m = c.wavelength_nm * 1e-9;
        ChannelParams {
            wavelength_m,
            atm_loss_db: self.atm_loss_db(),
            sigma_fade: self.sigma_fade(),
            pointing_error_rad: c.pointing_error_urad * 1e-6,
            divergence_rad: c
                .divergence_urad
                .map_or(wavelength_m / c.tx_aperture_m, |d| d * 1e-6),
            system_loss_db: system_loss_db(c.coupling_loss_db, c.detector_efficiency),
            fidelity_base: c.fidelity_base,
            rate_base_bps: c.rate_base_bps,
            fidelity_decay_per_db: c.fidelity_decay_per_db,
            loss_model: c.loss_model,
            power_convention: c.power_convention,
        }
    }

    pub fn with_regime(&self, regime: Regime) -> Self {
        let mut c = self.clone();
        c.channel.regime = regime;
        c
    }

    pub fn with_nodes(&self, n_nodes: usize) -> Self {
        let mut c = self.clone();
        c.constellation.n_nodes = n_nodes;
        c
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, why: String| Err(Error::Config(format!("`{key}` {why}")));
        let c = &self.constellation;
        if !(2..=1000).contains(&c.n_nodes) {
            return bad("constellation.n_nodes", format!("must be in 2..=1000, got {}", c.n_nodes));
        }
        if c.planes > c.n_nodes {
            return bad("constellation.planes", "must not exceed n_nodes".into());
        }
        for (key, v) in [
            ("constellation.altitude_km", c.altitude_km),
            ("constellation.d_max_km", c.d_max_km),
            ("constellation.phase_span_deg", c.phase_span_deg),
            ("constellation.shell_thickness_km", c.shell_thickness_km),
            ("simulation.t_sim_s", self.simulation.t_sim_s),
            ("simulation.step_s", self.simulation.step_s),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(key, format!("must be positive, got {v}"));
            }
        }
        if !(0.0..=360.0).contains(&c.phase_span_deg) || !(0.0..=360.0).contains(&c.raan_span_deg) {
            return bad("constellation.*_span_deg", "must lie in [0, 360]".into());
        }
        if !(0.0..1.0).contains(&c.jitter_fraction) {
            return bad("constellation.jitter_fraction", "must lie in [0, 1)".into());
        }
        if c.min_spacing_km < 0.0 {
            return bad("constellation.min_spacing_km", "must be non-negative".into());
        }

        let ch = &self.channel;
        for (key, s) in [
            ("channel.sigma_fade", self.sigma_fade()),
            ("channel.sigma_fade_clear_sky", ch.sigma_fade_clear_sky),
            ("channel.sigma_fade_standard", ch.sigma_fade_standard),
            ("channel.sigma_fade_strong_turbulence", ch.sigma_fade_strong_turbulence),
        ] {
            if !(0.0..=10.0).contains(&s) {
                return bad(key, format!("must lie in [0, 10], got {s}"));
            }
        }
        if !(ch.detector_efficiency > 0.0 && ch.detector_efficiency <= 1.0) {
            return bad("channel.detector_efficiency", "must lie in (0, 1]".into());
        }
        if ch.tx_aperture_m <= 0.0 || ch.rx_aperture_m <= 0.0 {
            return bad("channel.*_aperture_m", "must be positive".into());
        }
        self.channel_params()
            .validate()
            .map_err(|e| Error::Config(format!("channel: {e}")))?;

        let r = &self.routing;
        for (key, v) in [
            ("routing.f_min", r.f_min),
            ("routing.t_min", r.t_min),
            ("routing.trust_init_min", r.trust_init_min),
            ("routing.trust_init_max", r.trust_init_max),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(key, format!("must lie in [0, 1], got {v}"));
            }
        }
        if r.trust_init_min > r.trust_init_max {
            return bad("routing.trust_init_min", "must not exceed trust_init_max".into());
        }
        if !(0.0..=0.5).contains(&r.q_max) {
            return bad("routing.q_max", format!("must lie in [0, 0.5], got {}", r.q_max));
        }
        if r.eps_f < 0.0 || r.eps_r < 0.0 || r.trust_sigma < 0.0 || r.exclusion_s < 0.0 {
            return bad("routing", "thresholds, trust_sigma and exclusion_s must be non-negative".into());
        }
        if r.window == 0 {
            return bad("routing.window", "must be at least 1".into());
        }

        let s = &self.simulation;
        let ratio = s.t_sim_s / s.step_s;
        if (ratio - ratio.round()).abs() > 1e-9 || ratio.round() < 1.0 {
            return bad("simulation.t_sim_s", "must be a positive integer multiple of step_s".into());
        }
        if s.n_mc == 0 {
            return bad("simulation.n_mc", "must be at least 1".into());
        }
        if s.pairs_per_step == 0 {
            return bad("simulation.pairs_per_step", "must be at least 1".into());
        }

        let sw = &self.sweep;
        if sw.sizes.iter().chain(&sw.density_sizes).any(|&n| !(2..=1000).contains(&n)) {
            return bad("sweep.sizes", "node counts must be in 2..=1000".into());
        }
        if sw.sigmas.iter().any(|&s| !(0.0..=10.0).contains(&s)) {
            return bad("sweep.sigmas", "must lie in [0, 10]".into());
        }
        Ok(())
    }
}

/// Set `a.b.c = value` in `table`. The value is parsed as a TOML literal and
/// falls back to a bare string.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{assignment}` is not key=value")))?;
    let key = key.trim();
    let raw = raw.trim();
    if key.is_empty() {
        return Err(Error::Config(format!("override `{assignment}` has an empty key")));
    }
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));

    let parts: Vec<&str> = key.split('.').collect();
    let (last, parents) = parts.split_last().expect("non-empty key");
    let mut cur = table;
    for p in parents {
        let next = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = next
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("`{key}`: `{p}` is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_reflects_reference_setup() {
        let c = ScenarioConfig::default();
        c.validate().unwrap();
        assert_eq!(c.constellation.altitude_km, 500.0);
        assert_eq!(c.constellation.inclination_deg, 53.0);
        assert_eq!(c.channel.wavelength_nm, 810.0);
        assert_eq!(c.routing.f_min, 0.6);
        assert_eq!(c.routing.t_min, 0.5);
        assert_eq!(c.routing.q_max, 0.05);
        assert_eq!(c.simulation.n_mc, 5);
        assert_eq!(c.steps(), 400);
        assert_eq!(c.sweep.sizes, vec![25, 50, 100]);
        let p = c.channel_params();
        assert!((p.divergence_rad - 8.1e-6).abs() < 1e-15);
        assert!((p.system_loss_db - 3.7058).abs() < 1e-4);
    }

    #[test]
    fn regime_selects_loss_and_fading() {
        let c = ScenarioConfig::default();
        let t = c.with_regime(Regime::StrongTurbulence);
        assert_eq!(t.atm_loss_db(), 52.0);
        assert_eq!(t.sigma_fade(), 0.12);
        let mut o = t.clone();
        o.channel.sigma_fade = Some(0.07);
        assert_eq!(o.channel_params().sigma_fade, 0.07);
    }

    #[test]
    fn overrides_apply_and_unknown_keys_fail() {
        let c = ScenarioConfig::from_toml_with_overrides(
            DEFAULT_CONFIG_TOML,
            &[
                "constellation.n_nodes=25".into(),
                "channel.regime=clear_sky".into(),
                "channel.sigma_fade = 0.08".into(),
            ],
        )
        .unwrap();
        assert_eq!(c.constellation.n_nodes, 25);
        assert_eq!(c.channel.regime, Regime::ClearSky);
        assert_eq!(c.sigma_fade(), 0.08);

        let err = ScenarioConfig::from_toml_with_overrides(
            DEFAULT_CONFIG_TOML,
            &["routing.f_minimum=0.5".into()],
        )
        .unwrap_err();
        assert!(err.to_string().contains("f_minimum"), "{err}");
    }

    #[test]
    fn invalid_values_are_rejected() {
        for ov in [
            "routing.f_min=1.5",
            "channel.sigma_fade=-0.1",
            "simulation.step_s=0.3",
            "simulation.n_mc=0",
            "constellation.n_nodes=1",
            "channel.fidelity_base=1.2",
        ] {
            let r = ScenarioConfig::from_toml_with_overrides(DEFAULT_CONFIG_TOML, &[ov.into()]);
            assert!(r.is_err(), "{ov} accepted");
        }
    }

    #[test]
    fn toml_round_trip() {
        let c = ScenarioConfig::default();
        let again = ScenarioConfig::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(c, again);
    }
}
