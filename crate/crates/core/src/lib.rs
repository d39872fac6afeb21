//! Core of a deterministic reinforcement-learning trading research engine.
//!
//! Everything in this crate is pure computation over in-memory data and only
//! needs `alloc`: feature engineering on daily bars, a single-symbol trading
//! simulator, a small dense network trained with backpropagation, tabular
//! Q-learning and DQN agents, baseline strategies, and the performance
//! metrics used to compare them. File formats, configuration and the
//! command-line surface live in the `dqtrade` crate.

#![cfg_attr(not(test), no_std)]
#![warn(missing_debug_implementations)]
// `!(x > 0.0)` is used on purpose so that NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
mod math;

pub mod market_data;
pub mod metrics;
pub mod neural_net;
pub mod rl_agents;
pub mod trading_env;

pub use error::{Error, Result};
