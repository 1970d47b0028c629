//! One closed-loop episode: sense, adapt, route, recover at every step.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::ScenarioConfig;
use crate::channel::sample_link;
use crate::error::{Error, Result};
use crate::link_state::{network_dispersion, DispersionStats, EdgeKey, LinkRegistry, LinkState};
use crate::metrics::PathMetrics;
use crate::orbital::build_constellation;
use crate::routing::{
    feasible_subgraph, link_cost, median_rate, recover, update_weights, OpCounter, Path,
    RoutePair, WeightVector, WeightedGraph, BETA_FLOOR, ZETA_CLAMP,
};

/// Independent random streams drawn from one episode seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Layout = 1,
    Fading = 2,
    Trust = 3,
    Perturbation = 4,
    Pairs = 5,
}

/// SplitMix64 finaliser over the base seed and run index.
pub fn episode_seed(base_seed: u64, run_index: u64) -> u64 {
    let mut z = base_seed ^ run_index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteRecord {
    pub run: usize,
    pub step: usize,
    pub t_s: f64,
    pub source: usize,
    pub destination: usize,
    /// `None` when no feasible path existed.
    pub path: Option<Vec<usize>>,
    pub cost: Option<f64>,
    pub metrics: Option<PathMetrics>,
    pub failover_used: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub t_s: f64,
    pub weights: WeightVector,
    pub dispersion: DispersionStats,
    pub active_links: usize,
    pub feasible_links: usize,
    pub flagged_links: usize,
    pub clamped_draws: usize,
    pub purified: usize,
    pub excluded: usize,
    pub ops: OpCounter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkSnapshot {
    pub step: usize,
    pub i: usize,
    pub j: usize,
    pub distance_km: f64,
    pub fidelity: f64,
    pub rate_bps: f64,
    pub trust: f64,
    pub transmittance: f64,
    pub flagged: bool,
    pub excluded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub run: usize,
    pub seed: u64,
    pub density_per_km3: f64,
    pub routes: Vec<RouteRecord>,
    pub steps: Vec<StepRecord>,
    /// Per-step edge snapshots; empty unless `record_links` is set.
    pub links: Vec<LinkSnapshot>,
}

impl EpisodeRecord {
    pub fn metrics(&self) -> impl Iterator<Item = Option<&PathMetrics>> {
        self.routes.iter().map(|r| r.metrics.as_ref())
    }
}

fn check_weights(w: &WeightVector, step: usize) -> Result<()> {
    let ok = w.alpha >= 1.0
        && (BETA_FLOOR..=1.0).contains(&w.beta)
        && (0.2 - 0.08 * ZETA_CLAMP..=0.2 + 0.08 * ZETA_CLAMP).contains(&w.gamma)
        && (0.45..=0.75).contains(&w.delta);
    if ok {
        Ok(())
    } else {
        Err(Error::Invariant(format!("weights out of bounds at step {step}: {w:?}")))
    }
}

fn draw_pair(rng: &mut ChaCha8Rng, n: usize) -> (usize, usize) {
    let s = rng.gen_range(0..n);
    let mut d = rng.gen_range(0..n - 1);
    if d >= s {
        d += 1;
    }
    (s, d)
}

/// Run episode `run` of `config`.
pub fn run_episode(config: &ScenarioConfig, run: usize) -> Result<EpisodeRecord> {
    config.validate()?;
    let seed = episode_seed(config.seed, run as u64);
    let mut layout_rng = stream_rng(seed, Stream::Layout);
    let mut fading_rng = stream_rng(seed, Stream::Fading);
    let mut trust_rng = stream_rng(seed, Stream::Trust);
    let mut zeta_rng = stream_rng(seed, Stream::Perturbation);
    let mut pair_rng = stream_rng(seed, Stream::Pairs);

    let channel = config.channel_params();
    let routing = &config.routing;
    let d_max = config.constellation.d_max_km;
    let n = config.constellation.n_nodes;

    let constellation = build_constellation(&config.constellation_params(), &mut layout_rng)?;
    let density_per_km3 = constellation.volumetric_density(config.constellation.shell_thickness_km)?;

    let mut registry = LinkRegistry::new();
    let mut weights = WeightVector::default();
    let mut cache: BTreeMap<(usize, usize), RoutePair> = BTreeMap::new();
    let mut routes = Vec::with_capacity(config.steps() * config.simulation.pairs_per_step);
    let mut steps = Vec::with_capacity(config.steps());
    let mut links = Vec::new();

    for step in 0..config.steps() {
        let t = step as f64 * config.simulation.step_s;
        let state = constellation.propagate(t)?;
        let visible = state.visibility_graph(d_max)?;

        // Sense.
        for link in registry.iter_mut() {
            link.active = false;
        }
        let mut clamped_draws = 0;
        let mut flagged_links = 0;
        for e in &visible.edges {
            let link = registry.entry_or_insert_with(e.i, e.j, || {
                let trust = trust_rng.gen_range(routing.trust_init_min..=routing.trust_init_max);
                LinkState::new(e.i, e.j, trust, routing.window)
            });
            link.active = true;
            let sample = sample_link(e.distance_km, &channel, &mut fading_rng)?;
            clamped_draws += usize::from(sample.clamped);
            link.update(&sample, e.distance_km);
            link.flagged = link.deviation(routing.eps_f, routing.eps_r)?.flagged;
            flagged_links += usize::from(link.flagged);
            link.evolve_trust(routing.trust_sigma, &mut trust_rng);
        }

        // Adapt.
        let dispersion = network_dispersion(registry.active()).unwrap_or_default();
        weights = update_weights(&weights, &dispersion, step as f64, &mut zeta_rng);
        check_weights(&weights, step)?;

        // Route.
        let feasible = feasible_subgraph(registry.active(), routing.f_min, routing.t_min, t);
        let mut rates: Vec<f64> = registry.active().map(|l| l.rate_bps).collect();
        let rate_ref = median_rate(&mut rates);
        let mut graph = WeightedGraph::new(n);
        for &(i, j) in &feasible {
            let link = registry.get(i, j).expect("feasible edge is registered");
            graph.add_edge(i, j, link_cost(link, &weights, link.distance_km, d_max, rate_ref))?;
        }
        let flagged: BTreeSet<EdgeKey> = registry
            .active()
            .filter(|l| l.flagged)
            .map(LinkState::key)
            .collect();

        let mut ops = OpCounter::default();
        for _ in 0..config.simulation.pairs_per_step {
            let (s, d) = draw_pair(&mut pair_rng, n);
            let (chosen, failover_used) = select_route(
                &mut cache,
                &graph,
                &feasible,
                &flagged,
                (s, d),
                routing.alternate,
                &mut ops,
            )?;
            let record = match chosen {
                Some(path) => {
                    if let Some(e) = path.edges().find(|e| !feasible.contains(e)) {
                        return Err(Error::Invariant(format!(
                            "route {:?} at step {step} uses infeasible edge {e:?}",
                            path.nodes
                        )));
                    }
                    let metrics = PathMetrics::evaluate(&path.nodes, &registry, routing.q_max)?;
                    RouteRecord {
                        run,
                        step,
                        t_s: t,
                        source: s,
                        destination: d,
                        cost: Some(path.cost),
                        path: Some(path.nodes),
                        metrics: Some(metrics),
                        failover_used,
                    }
                }
                None => RouteRecord {
                    run,
                    step,
                    t_s: t,
                    source: s,
                    destination: d,
                    path: None,
                    cost: None,
                    metrics: None,
                    failover_used: false,
                },
            };
            routes.push(record);
        }

        // Recover.
        let report = recover(&mut registry, routing.f_min, t, routing.exclusion_s);

        if config.simulation.record_links {
            links.extend(registry.active().map(|l| LinkSnapshot {
                step,
                i: l.i,
                j: l.j,
                distance_km: l.distance_km,
                fidelity: l.fidelity,
                rate_bps: l.rate_bps,
                trust: l.trust,
                transmittance: l.transmittance,
                flagged: l.flagged,
                excluded: l.is_excluded(t),
            }));
        }
        steps.push(StepRecord {
            step,
            t_s: t,
            weights,
            dispersion,
            active_links: visible.edges.len(),
            feasible_links: feasible.len(),
            flagged_links,
            clamped_draws,
            purified: report.purified.len(),
            excluded: report.excluded.len(),
            ops,
        });
    }

    Ok(EpisodeRecord {
        run,
        seed,
        density_per_km3,
        routes,
        steps,
        links,
    })
}

/// Pick the route for one request. A cached primary that lost an edge falls
/// over to its cached alternate when that is intact and unflagged; otherwise
/// the pair is routed afresh on the current graph.
fn select_route(
    cache: &mut BTreeMap<(usize, usize), RoutePair>,
    graph: &WeightedGraph,
    feasible: &BTreeSet<EdgeKey>,
    flagged: &BTreeSet<EdgeKey>,
    pair: (usize, usize),
    mode: crate::routing::AlternateMode,
    ops: &mut OpCounter,
) -> Result<(Option<Path>, bool)> {
    if let Some(cached) = cache.get(&pair) {
        let broken = cached.primary.edges().any(|e| !feasible.contains(&e));
        if broken {
            if let Some(alt) = &cached.alternate {
                if alt.edges().all(|e| feasible.contains(&e) && !flagged.contains(&e)) {
                    let cost = graph
                        .path_cost(&alt.nodes)
                        .ok_or(Error::Invariant("alternate lost an edge".into()))?;
                    return Ok((
                        Some(Path {
                            nodes: alt.nodes.clone(),
                            cost,
                        }),
                        true,
                    ));
                }
            }
        }
    }
    match RoutePair::compute(graph, pair.0, pair.1, mode, ops)? {
        Some(route) => {
            let primary = route.primary.clone();
            cache.insert(pair, route);
            Ok((Some(primary), false))
        }
        None => {
            cache.remove(&pair);
            Ok((None, false))
        }
    }
}
