//! Adaptive weighting, constrained path search and recovery.

mod path;
mod recovery;
mod weights;

use std::collections::BTreeSet;

pub use path::{
    failover, second_path, second_path_counted, shortest_path, shortest_path_counted,
    single_source, AlternateMode, Labels, OpCounter, Path, RoutePair, WeightedGraph,
};
pub use recovery::{purify_link, recover, RecoveryReport};
pub use weights::{
    link_cost, median_rate, update_weights, WeightVector, BETA_FLOOR, RATE_COST_CAP, ZETA_CLAMP,
};

use crate::link_state::{EdgeKey, LinkState};

/// Edges usable for routing at time `t`: active, not excluded, and meeting
/// both the fidelity and trust floors (inclusive).
pub fn feasible_subgraph<'a, I>(links: I, f_min: f64, t_min: f64, t: f64) -> BTreeSet<EdgeKey>
where
    I: IntoIterator<Item = &'a LinkState>,
{
    links
        .into_iter()
        .filter(|l| l.active && !l.is_excluded(t) && l.fidelity >= f_min && l.trust >= t_min)
        .map(LinkState::key)
        .collect()
}
