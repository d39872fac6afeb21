//! Learning agents and baselines.
//!
//! * [`train_qlearning`]: tabular Q-learning over discretized observations.
//! * [`train_dqn`]: deep Q-learning with experience replay and a
//!   periodically synchronized target network.
//! * [`baselines`]: buy-and-hold and SMA crossover, the non-learning
//!   comparison strategies.
//!
//! All randomness in a training run comes from one `ChaCha8Rng` seeded with
//! [`TrainConfig::seed`], so a seed and a config pin down every decision.

pub mod baselines;
mod config;
mod discretize;
mod dqn;
mod explore;
mod qlearning;
mod replay;
mod tabular;

pub use config::{EpisodeStats, TrainConfig};
pub use discretize::{Discretizer, StateKey};
pub use dqn::{bellman_targets, fit_batch, train_dqn, DqnPolicy};
pub use explore::{argmax, select_action, EpsilonSchedule};
pub use qlearning::{train_qlearning, TabularPolicy};
pub use replay::{ReplayBuffer, Transition};
pub use tabular::QTable;

use crate::market_data::Observation;
use crate::trading_env::Action;

/// A deterministic decision rule over observations.
pub trait Policy {
    fn act(&self, observation: &[f64]) -> Action;

    /// Adapts the policy for [`crate::trading_env::TradingEnv::run`].
    fn as_fn(&self) -> impl FnMut(&Observation) -> Action + '_
    where
        Self: Sized,
    {
        move |obs| self.act(&obs.values)
    }
}
