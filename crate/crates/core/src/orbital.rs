//! Circular-orbit constellation geometry.
//!
//! Each node moves on a circular orbit parameterised in its own orbital plane
//! as `(r cos(ωt + φ), r sin(ωt + φ), 0)`, which is then rotated by the plane
//! inclination (about x) and right ascension of the ascending node (about z).
//! With zero inclination and RAAN the in-plane formula is used unchanged.
//!
//! Constellations are laid out on a sector of a spherical shell: `planes`
//! equally spaced planes across a RAAN span and evenly spaced phases across a
//! phase span. Spans of 2π give a global Walker-style shell; smaller spans give
//! a regional cluster.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

/// Earth gravitational parameter, km³/s².
pub const MU_EARTH_KM3_S2: f64 = 398_600.441_8;
/// Equatorial Earth radius, km.
pub const EARTH_RADIUS_KM: f64 = 6_378.137;
/// Rejitter attempts per node before construction gives up.
pub const MAX_PLACEMENT_ATTEMPTS: usize = 1000;

pub type Vec3 = [f64; 3];

fn norm(v: Vec3) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn distance(a: Vec3, b: Vec3) -> f64 {
    norm([a[0] - b[0], a[1] - b[1], a[2] - b[2]])
}

/// Circular-orbit angular rate at the given altitude, rad/s.
pub fn angular_velocity(altitude_km: f64) -> f64 {
    let r = EARTH_RADIUS_KM + altitude_km;
    (MU_EARTH_KM3_S2 / (r * r * r)).sqrt()
}

/// Orbital period at the given altitude, s.
pub fn orbital_period_s(altitude_km: f64) -> f64 {
    TAU / angular_velocity(altitude_km)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitElements {
    pub altitude_km: f64,
    /// Phase offset at t = 0, in [0, 2π).
    pub phase_rad: f64,
    pub plane_raan_rad: f64,
    pub inclination_rad: f64,
    pub angular_velocity_rad_s: f64,
}

impl OrbitElements {
    /// Circular orbit with the Kepler rate for its altitude.
    pub fn circular(
        altitude_km: f64,
        phase_rad: f64,
        plane_raan_rad: f64,
        inclination_rad: f64,
    ) -> Result<Self> {
        ensure(
            altitude_km > 0.0 && altitude_km.is_finite(),
            "altitude_km",
            format!("must be positive, got {altitude_km}"),
        )?;
        Ok(Self {
            altitude_km,
            phase_rad: phase_rad.rem_euclid(TAU),
            plane_raan_rad,
            inclination_rad,
            angular_velocity_rad_s: angular_velocity(altitude_km),
        })
    }

    pub fn radius_km(&self, earth_radius_km: f64) -> f64 {
        earth_radius_km + self.altitude_km
    }

    /// Inertial position at time `t` seconds.
    pub fn position_at(&self, t: f64, earth_radius_km: f64) -> Vec3 {
        let r = self.radius_km(earth_radius_km);
        let u = self.angular_velocity_rad_s * t + self.phase_rad;
        let (x, y) = (r * u.cos(), r * u.sin());
        if self.inclination_rad == 0.0 && self.plane_raan_rad == 0.0 {
            return [x, y, 0.0];
        }
        let (si, ci) = self.inclination_rad.sin_cos();
        let (so, co) = self.plane_raan_rad.sin_cos();
        // Rx(i) then Rz(Ω)
        let (yi, zi) = (y * ci, y * si);
        [x * co - yi * so, x * so + yi * co, zi]
    }
}

/// Portion of the orbital shell a constellation is laid out on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellLayout {
    /// Along-track extent of each plane's phase slots, rad.
    pub phase_span_rad: f64,
    /// Extent of the plane RAANs, rad.
    pub raan_span_rad: f64,
    /// Phase jitter as a fraction of the slot spacing (full width).
    pub jitter_fraction: f64,
}

impl ShellLayout {
    pub const GLOBAL: ShellLayout = ShellLayout {
        phase_span_rad: TAU,
        raan_span_rad: TAU,
        jitter_fraction: 0.1,
    };

    pub fn is_global(&self) -> bool {
        self.phase_span_rad >= TAU && self.raan_span_rad >= TAU
    }

    /// Fraction of the full shell's area covered by the layout, in (0, 1].
    ///
    /// A sector spans `r·phase_span` along track and `r·raan_span·sin i`
    /// across track. Degenerate equatorial layouts count as a band one shell
    /// thickness wide.
    pub fn shell_fraction(&self, inclination_rad: f64, radius_km: f64, thickness_km: f64) -> f64 {
        if self.is_global() {
            return 1.0;
        }
        let cross = (self.raan_span_rad * inclination_rad.sin().abs()).max(thickness_km / radius_km);
        (self.phase_span_rad.min(TAU) * cross / (4.0 * PI)).min(1.0)
    }
}

/// Inputs to [`build_constellation`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstellationParams {
    pub n_nodes: usize,
    pub altitude_km: f64,
    pub inclination_rad: f64,
    pub planes: usize,
    pub min_spacing_km: f64,
    pub layout: ShellLayout,
    /// Shell thickness the layout's volume is measured over, km.
    pub shell_thickness_km: f64,
}

impl ConstellationParams {
    /// `round(sqrt(n))` planes, at least one.
    pub fn default_planes(n_nodes: usize) -> usize {
        ((n_nodes as f64).sqrt().round() as usize).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstellationState {
    pub nodes: Vec<OrbitElements>,
    pub positions_km: Vec<Vec3>,
    pub epoch_s: f64,
    pub earth_radius_km: f64,
    /// Fraction of the shell occupied by the layout (1 for hand-built states).
    pub shell_fraction: f64,
}

impl ConstellationState {
    /// Snapshot of `nodes` at t = 0.
    pub fn from_elements(nodes: Vec<OrbitElements>) -> Self {
        let positions_km = nodes
            .iter()
            .map(|n| n.position_at(0.0, EARTH_RADIUS_KM))
            .collect();
        Self {
            nodes,
            positions_km,
            epoch_s: 0.0,
            earth_radius_km: EARTH_RADIUS_KM,
            shell_fraction: 1.0,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Positions at absolute time `t` (seconds since construction).
    pub fn propagate(&self, t: f64) -> Result<ConstellationState> {
        ensure(t >= 0.0, "t", format!("must be non-negative, got {t}"))?;
        let positions_km = self
            .nodes
            .iter()
            .map(|n| n.position_at(t, self.earth_radius_km))
            .collect();
        Ok(ConstellationState {
            nodes: self.nodes.clone(),
            positions_km,
            epoch_s: t,
            earth_radius_km: self.earth_radius_km,
            shell_fraction: self.shell_fraction,
        })
    }

    pub fn pair_distance(&self, i: usize, j: usize) -> Result<f64> {
        let n = self.len();
        if i >= n {
            return Err(Error::UnknownNode(i));
        }
        if j >= n {
            return Err(Error::UnknownNode(j));
        }
        ensure(i != j, "j", "node pair must be distinct")?;
        // Order the operands so d(i, j) and d(j, i) round identically.
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        Ok(distance(self.positions_km[a], self.positions_km[b]))
    }

    pub fn mean_radius_km(&self) -> f64 {
        if self.is_empty() {
            return self.earth_radius_km;
        }
        self.nodes
            .iter()
            .map(|n| n.radius_km(self.earth_radius_km))
            .sum::<f64>()
            / self.len() as f64
    }

    pub fn visibility_graph(&self, d_max_km: f64) -> Result<VisibilityGraph> {
        ensure(
            d_max_km > 0.0,
            "d_max_km",
            format!("must be positive, got {d_max_km}"),
        )?;
        let n = self.len();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let d = distance(self.positions_km[i], self.positions_km[j]);
                if d <= d_max_km {
                    edges.push(VisibleEdge {
                        i,
                        j,
                        distance_km: d,
                    });
                }
            }
        }
        Ok(VisibilityGraph {
            n_nodes: n,
            edges,
            d_max_km,
        })
    }

    /// Nodes per km³ of the occupied shell region of the given thickness.
    pub fn volumetric_density(&self, shell_thickness_km: f64) -> Result<f64> {
        ensure(
            shell_thickness_km > 0.0,
            "shell_thickness_km",
            format!("must be positive, got {shell_thickness_km}"),
        )?;
        if self.is_empty() {
            return Ok(0.0);
        }
        let volume = shell_volume_km3(self.mean_radius_km(), shell_thickness_km) * self.shell_fraction;
        Ok(self.len() as f64 / volume)
    }
}

/// Volume of a spherical shell of the given thickness centred at `radius_km`.
pub fn shell_volume_km3(radius_km: f64, thickness_km: f64) -> f64 {
    let half = 0.5 * thickness_km;
    let outer = radius_km + half;
    let inner = radius_km - half;
    4.0 * PI / 3.0 * (outer.powi(3) - inner.powi(3))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VisibleEdge {
    /// Smaller endpoint.
    pub i: usize,
    pub j: usize,
    pub distance_km: f64,
}

/// Pairs within range at one instant; edges are stored with `i < j` in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisibilityGraph {
    pub n_nodes: usize,
    pub edges: Vec<VisibleEdge>,
    pub d_max_km: f64,
}

impl VisibilityGraph {
    pub fn contains(&self, i: usize, j: usize) -> bool {
        let key = if i < j { (i, j) } else { (j, i) };
        self.edges
            .binary_search_by(|e| (e.i, e.j).cmp(&key))
            .is_ok()
    }

    pub fn distance(&self, i: usize, j: usize) -> Option<f64> {
        let key = if i < j { (i, j) } else { (j, i) };
        self.edges
            .binary_search_by(|e| (e.i, e.j).cmp(&key))
            .ok()
            .map(|k| self.edges[k].distance_km)
    }
}

/// Lay out a constellation and verify its minimum spacing at t = 0.
pub fn build_constellation<R: Rng + ?Sized>(
    params: &ConstellationParams,
    rng: &mut R,
) -> Result<ConstellationState> {
    let ConstellationParams {
        n_nodes,
        altitude_km,
        inclination_rad,
        planes,
        min_spacing_km,
        layout,
        shell_thickness_km,
    } = *params;
    ensure(
        (1..=1000).contains(&n_nodes),
        "n_nodes",
        format!("must be in 1..=1000, got {n_nodes}"),
    )?;
    ensure(planes >= 1, "planes", "must be at least 1")?;
    ensure(
        altitude_km > 0.0,
        "altitude_km",
        format!("must be positive, got {altitude_km}"),
    )?;
    ensure(min_spacing_km >= 0.0, "min_spacing_km", "must be non-negative")?;
    ensure(
        layout.phase_span_rad > 0.0 && layout.raan_span_rad >= 0.0,
        "layout",
        "spans must be positive",
    )?;
    ensure(
        (0.0..1.0).contains(&layout.jitter_fraction),
        "jitter_fraction",
        "must be in [0, 1)",
    )?;
    ensure(
        shell_thickness_km > 0.0,
        "shell_thickness_km",
        "must be positive",
    )?;

    let planes = planes.min(n_nodes);
    let phase_span = layout.phase_span_rad.min(TAU);
    let raan_span = layout.raan_span_rad.min(TAU);
    let global_raan = raan_span >= TAU;
    let cos_i = inclination_rad.cos();
    let radius = EARTH_RADIUS_KM + altitude_km;

    let mut nodes: Vec<OrbitElements> = Vec::with_capacity(n_nodes);
    let mut positions: Vec<Vec3> = Vec::with_capacity(n_nodes);
    for k in 0..n_nodes {
        let plane = k % planes;
        let slot = k / planes;
        let in_plane = n_nodes / planes + usize::from(plane < n_nodes % planes);
        let raan = if global_raan {
            TAU * plane as f64 / planes as f64
        } else {
            -0.5 * raan_span + (plane as f64 + 0.5) * raan_span / planes as f64
        };
        let spacing = phase_span / in_plane as f64;
        let stagger = (plane as f64 + 0.5) / planes as f64;
        // Regional sectors shift each plane along track so neighbouring planes
        // line up across track at the ascending node.
        let shear = if global_raan { 0.0 } else { -raan * cos_i };
        let nominal = -0.5 * phase_span + (slot as f64 + stagger) * spacing + shear;
        let half_jitter = 0.5 * layout.jitter_fraction * spacing;

        let mut placed = false;
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let jitter = if half_jitter > 0.0 {
                rng.gen_range(-half_jitter..=half_jitter)
            } else {
                0.0
            };
            let elem = OrbitElements::circular(altitude_km, nominal + jitter, raan, inclination_rad)?;
            let pos = elem.position_at(0.0, EARTH_RADIUS_KM);
            if positions.iter().all(|&p| distance(p, pos) >= min_spacing_km) {
                nodes.push(elem);
                positions.push(pos);
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::SpacingInfeasible {
                node: k,
                min_spacing_km,
                attempts: MAX_PLACEMENT_ATTEMPTS,
            });
        }
    }

    Ok(ConstellationState {
        nodes,
        positions_km: positions,
        epoch_s: 0.0,
        earth_radius_km: EARTH_RADIUS_KM,
        shell_fraction: layout.shell_fraction(inclination_rad, radius, shell_thickness_km),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn equatorial(phase: f64) -> OrbitElements {
        OrbitElements::circular(500.0, phase, 0.0, 0.0).unwrap()
    }

    fn params(n: usize) -> ConstellationParams {
        ConstellationParams {
            n_nodes: n,
            altitude_km: 500.0,
            inclination_rad: 53f64.to_radians(),
            planes: ConstellationParams::default_planes(n),
            min_spacing_km: 100.0,
            layout: ShellLayout::GLOBAL,
            shell_thickness_km: 50.0,
        }
    }

    #[test]
    fn single_node_sits_at_orbit_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = build_constellation(&params(1), &mut rng).unwrap();
        assert_eq!(s.len(), 1);
        assert!((norm(s.positions_km[0]) - 6878.137).abs() < 1e-6);
    }

    #[test]
    fn kepler_rate_at_500_km() {
        let w = angular_velocity(500.0);
        // sqrt(398600.4418 / 6878.137^3)
        assert!((w - 1.106_783_4e-3).abs() < 1e-9, "{w}");
        assert!((orbital_period_s(500.0) - 5677.0).abs() < 1.0);
    }

    #[test]
    fn planar_orbit_at_epoch_and_half_period() {
        let e = equatorial(0.0);
        let r = 6878.137;
        assert_eq!(e.position_at(0.0, EARTH_RADIUS_KM), [r, 0.0, 0.0]);
        let half = PI / e.angular_velocity_rad_s;
        let p = e.position_at(half, EARTH_RADIUS_KM);
        assert!((p[0] + r).abs() < 1e-6 && p[1].abs() < 1e-6 && p[2] == 0.0);
    }

    #[test]
    fn chord_distance_matches_phase_gap() {
        let s = ConstellationState::from_elements(vec![equatorial(0.0), equatorial(PI / 2.0)]);
        let d = s.pair_distance(0, 1).unwrap();
        assert!((d - 6878.137 * 2f64.sqrt()).abs() < 1e-6, "{d}");
        let s = ConstellationState::from_elements(vec![equatorial(0.0), equatorial(PI)]);
        assert!((s.pair_distance(1, 0).unwrap() - 13756.274).abs() < 1e-6);
        let s = ConstellationState::from_elements(vec![equatorial(0.3), equatorial(0.3)]);
        assert_eq!(s.pair_distance(0, 1).unwrap(), 0.0);
    }

    #[test]
    fn pair_distance_rejects_bad_ids() {
        let s = ConstellationState::from_elements(vec![equatorial(0.0), equatorial(1.0)]);
        assert_eq!(s.pair_distance(0, 5), Err(Error::UnknownNode(5)));
        assert!(s.pair_distance(1, 1).is_err());
    }

    #[test]
    fn visibility_threshold_is_inclusive() {
        let s = ConstellationState::from_elements(vec![equatorial(0.0), equatorial(0.2)]);
        let d = s.pair_distance(0, 1).unwrap();
        assert_eq!(s.visibility_graph(d).unwrap().edges.len(), 1);
        assert!(s.visibility_graph(d * (1.0 - 1e-12)).unwrap().edges.is_empty());
        assert!(s.visibility_graph(0.0).is_err());
    }

    #[test]
    fn global_density_is_count_over_shell_volume() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = build_constellation(&params(100), &mut rng).unwrap();
        let r = 6878.137f64;
        let v = 4.0 * PI / 3.0 * ((r + 25.0).powi(3) - (r - 25.0).powi(3));
        let rho = s.volumetric_density(50.0).unwrap();
        assert!((rho - 100.0 / v).abs() / rho < 1e-12);
        let empty = ConstellationState::from_elements(vec![]);
        assert_eq!(empty.volumetric_density(50.0).unwrap(), 0.0);
    }

    #[test]
    fn crowded_sector_fails_loudly() {
        let mut p = params(400);
        p.layout = ShellLayout {
            phase_span_rad: 0.1,
            raan_span_rad: 0.1,
            jitter_fraction: 0.1,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = build_constellation(&p, &mut rng).unwrap_err();
        assert!(matches!(err, Error::SpacingInfeasible { .. }), "{err}");
    }

    #[test]
    fn rejects_out_of_range_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(build_constellation(&params(0), &mut rng).is_err());
        assert!(build_constellation(&params(1001), &mut rng).is_err());
        let mut p = params(4);
        p.altitude_km = 0.0;
        assert!(build_constellation(&p, &mut rng).is_err());
        assert!(ConstellationState::from_elements(vec![]).propagate(-1.0).is_err());
    }
}
