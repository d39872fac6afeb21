//! File formats, experiment orchestration and the command-line front end
//! for [`dqtrade_core`].

// `!(x > 0.0)` is used on purpose so that NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compare;
pub mod config;
pub mod data;
pub mod error;
pub mod experiment;
pub mod model_io;
pub mod report;

pub use config::{parse_config, parse_config_with, AgentKind, DataSource, ExperimentConfig};
pub use error::{Error, Result, Stage};
pub use experiment::{run_experiment, split_train_test, Report};
pub use report::emit_report;
