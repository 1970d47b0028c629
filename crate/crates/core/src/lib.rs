//! Simulation and routing library for entanglement distribution over
//! low-Earth-orbit satellite constellations.
//!
//! Modules follow the processing chain: [`orbital`] geometry feeds the
//! [`channel`] link budget, [`link_state`] tracks per-edge dynamics,
//! [`routing`] selects paths, [`metrics`] scores them and [`harness`] runs
//! Monte Carlo experiments. [`cli`] backs the `satq` binary.

pub mod channel;
pub mod cli;
pub mod error;
pub mod harness;
pub mod link_state;
pub mod metrics;
pub mod orbital;
pub mod routing;

pub use channel::{ChannelParams, LinkSample, LossModel, Regime};
pub use error::{Error, Result};
pub use harness::{monte_carlo, run_episode, MonteCarloResult, ScenarioConfig};
pub use link_state::{LinkRegistry, LinkState};
pub use metrics::{AggregateStats, PathMetrics};
pub use orbital::{ConstellationParams, ConstellationState, ShellLayout};
pub use routing::{Path, RoutePair, WeightVector, WeightedGraph};
