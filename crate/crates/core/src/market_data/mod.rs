//! Daily bar ingestion types and the transforms that turn prices into
//! agent observations: simple returns, min-max scaling, SMA/RSI indicators
//! and sliding windows. Synthetic fixtures live in [`synthetic`].

mod bar;
mod indicators;
mod observation;
mod returns;
pub mod synthetic;

pub use bar::{Bar, BarSeries, PriceField};
pub use indicators::{rsi, sma};
pub use observation::{build_observations, build_window, FeatureConfig, FeatureSeries, MarketWindow, Observation};
pub use returns::{daily_returns, Normalizer, ReturnSeries, ScaleMode};
