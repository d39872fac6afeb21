//! Experiment configuration: one JSON document plus dotted-path overrides.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use dqtrade_core::market_data::synthetic::{SyntheticKind, SyntheticSpec};
use dqtrade_core::market_data::{FeatureConfig, PriceField, ScaleMode};
use dqtrade_core::metrics::{sqrt_252, HoldingBasis, MetricsConfig};
use dqtrade_core::rl_agents::TrainConfig;
use dqtrade_core::trading_env::{CostModel, EnvConfig, RewardMode};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Environment variable naming the default root for run outputs.
pub const OUT_ENV: &str = "DQTRADE_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    Qtable,
    Dqn,
    BuyAndHold,
    SmaCrossover,
}

impl AgentKind {
    pub fn name(self) -> &'static str {
        match self {
            AgentKind::Qtable => "qtable",
            AgentKind::Dqn => "dqn",
            AgentKind::BuyAndHold => "buy_and_hold",
            AgentKind::SmaCrossover => "sma_crossover",
        }
    }

    pub fn learns(self) -> bool {
        matches!(self, AgentKind::Qtable | AgentKind::Dqn)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSource {
    /// Path to a price CSV, relative to the config file.
    Csv(PathBuf),
    Synthetic(SyntheticSettings),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyntheticModel {
    Sinusoid,
    Trend,
    Gbm,
}

/// Generator parameters. Fields a model does not use are ignored; `drift`
/// is per bar for `trend` and annualized for `gbm`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSettings {
    pub symbol: String,
    pub model: SyntheticModel,
    pub length: usize,
    pub start: NaiveDate,
    pub volume: f64,
    pub seed: u64,
    pub base: f64,
    pub amplitude: f64,
    pub period: f64,
    pub noise: f64,
    pub drift: f64,
    pub volatility: f64,
    pub dt: f64,
}

impl Default for SyntheticSettings {
    fn default() -> Self {
        SyntheticSettings {
            symbol: "SYN".into(),
            model: SyntheticModel::Sinusoid,
            length: 300,
            start: NaiveDate::from_ymd_opt(2019, 1, 1).unwrap(),
            volume: 1_000_000.0,
            seed: 42,
            base: 100.0,
            amplitude: 10.0,
            period: 10.0,
            noise: 0.0,
            drift: 0.0,
            volatility: 0.2,
            dt: 1.0 / 252.0,
        }
    }
}

impl SyntheticSettings {
    pub fn spec(&self) -> SyntheticSpec {
        let kind = match self.model {
            SyntheticModel::Sinusoid => SyntheticKind::Sinusoid {
                base: self.base,
                amplitude: self.amplitude,
                period: self.period,
                noise: self.noise,
            },
            SyntheticModel::Trend => SyntheticKind::Trend {
                base: self.base,
                drift: self.drift,
                noise: self.noise,
            },
            SyntheticModel::Gbm => SyntheticKind::Gbm {
                initial: self.base,
                drift: self.drift,
                volatility: self.volatility,
                dt: self.dt,
            },
        };
        SyntheticSpec {
            symbol: self.symbol.clone(),
            kind,
            length: self.length,
            start: self.start,
            volume: self.volume,
        }
    }
}

/// Inclusive date range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DateWindow {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DateWindow {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Self {
        DateWindow { start, end }
    }
}

fn ymd(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).unwrap()
}

fn default_train() -> DateWindow {
    DateWindow::new(ymd(2010, 1, 1), ymd(2019, 12, 31))
}

fn default_test() -> DateWindow {
    DateWindow::new(ymd(2020, 1, 1), ymd(2020, 12, 31))
}

fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriceFieldSetting {
    #[default]
    Close,
    AdjClose,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleSetting {
    UnitRange,
    #[default]
    SignedRange,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureSettings {
    /// Return window n. Defaults to 10, or 3 for the tabular agent.
    pub window: Option<usize>,
    pub sma_period: Option<usize>,
    pub rsi_period: Option<usize>,
    pub price_field: PriceFieldSetting,
    pub scale: ScaleSetting,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingSettings {
    pub alpha: f64,
    pub gamma: f64,
    pub episodes: usize,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    pub target_sync_period: usize,
    pub eps_start: f64,
    pub eps_end: f64,
    pub eps_decay_fraction: f64,
}

impl Default for TrainingSettings {
    fn default() -> Self {
        let t = TrainConfig::default();
        TrainingSettings {
            alpha: t.alpha,
            gamma: t.gamma,
            episodes: t.episodes,
            batch_size: t.batch_size,
            buffer_capacity: t.buffer_capacity,
            target_sync_period: t.target_sync_period,
            eps_start: t.eps_start,
            eps_end: t.eps_end,
            eps_decay_fraction: t.eps_decay_fraction,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkSettings {
    pub hidden: Vec<usize>,
}

impl Default for NetworkSettings {
    fn default() -> Self {
        NetworkSettings { hidden: vec![32, 32] }
    }
}

/// Bin edges for the tabular agent, in raw daily-return units. They are
/// mapped through the fitted normalizer before use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TabularSettings {
    pub cuts: Vec<f64>,
}

impl Default for TabularSettings {
    fn default() -> Self {
        TabularSettings { cuts: vec![-0.001, 0.001] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmaSettings {
    pub fast: usize,
    pub slow: usize,
}

impl Default for SmaSettings {
    fn default() -> Self {
        SmaSettings { fast: 20, slow: 50 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardSetting {
    #[default]
    Percentage,
    Absolute,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvSettings {
    pub initial_cash: f64,
    pub cost_rate: f64,
    pub reward: RewardSetting,
    pub buy_fraction: f64,
    pub sell_fraction: f64,
}

impl Default for EnvSettings {
    fn default() -> Self {
        EnvSettings {
            initial_cash: 100_000.0,
            cost_rate: 0.0,
            reward: RewardSetting::Percentage,
            buy_fraction: 1.0,
            sell_fraction: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HoldingSetting {
    #[default]
    CalendarDays,
    TradingDays,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricSettings {
    pub risk_free_daily: f64,
    pub annualization: f64,
    pub holding_basis: HoldingSetting,
}

impl Default for MetricSettings {
    fn default() -> Self {
        MetricSettings {
            risk_free_daily: 0.0,
            annualization: sqrt_252(),
            holding_basis: HoldingSetting::CalendarDays,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub data: DataSource,
    /// Overrides the symbol taken from the data source.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<String>,
    #[serde(default = "default_train")]
    pub train: DateWindow,
    #[serde(default = "default_test")]
    pub test: DateWindow,
    pub agent: AgentKind,
    #[serde(default)]
    pub features: FeatureSettings,
    #[serde(default)]
    pub training: TrainingSettings,
    #[serde(default)]
    pub network: NetworkSettings,
    #[serde(default)]
    pub tabular: TabularSettings,
    #[serde(default)]
    pub sma: SmaSettings,
    #[serde(default)]
    pub environment: EnvSettings,
    #[serde(default)]
    pub metrics: MetricSettings,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Directory relative data paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl ExperimentConfig {
    /// A config with every default applied.
    pub fn new(data: DataSource, agent: AgentKind) -> Self {
        ExperimentConfig {
            data,
            symbol: None,
            train: default_train(),
            test: default_test(),
            agent,
            features: FeatureSettings::default(),
            training: TrainingSettings::default(),
            network: NetworkSettings::default(),
            tabular: TabularSettings::default(),
            sma: SmaSettings::default(),
            environment: EnvSettings::default(),
            metrics: MetricSettings::default(),
            seed: default_seed(),
            output_dir: None,
            base_dir: PathBuf::new(),
        }
    }

    pub fn window(&self) -> usize {
        self.features.window.unwrap_or(match self.agent {
            AgentKind::Qtable => 3,
            _ => 10,
        })
    }

    pub fn feature_config(&self) -> FeatureConfig {
        FeatureConfig {
            window: self.window(),
            sma_period: self.features.sma_period,
            rsi_period: self.features.rsi_period,
            price_field: match self.features.price_field {
                PriceFieldSetting::Close => PriceField::Close,
                PriceFieldSetting::AdjClose => PriceField::AdjClose,
            },
            scale: match self.features.scale {
                ScaleSetting::UnitRange => ScaleMode::UnitRange,
                ScaleSetting::SignedRange => ScaleMode::SignedRange,
            },
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        let t = &self.training;
        TrainConfig {
            alpha: t.alpha,
            gamma: t.gamma,
            episodes: t.episodes,
            batch_size: t.batch_size,
            buffer_capacity: t.buffer_capacity,
            target_sync_period: t.target_sync_period,
            eps_start: t.eps_start,
            eps_end: t.eps_end,
            eps_decay_fraction: t.eps_decay_fraction,
            seed: self.seed,
        }
    }

    pub fn costs(&self) -> Result<CostModel> {
        Ok(CostModel::new(self.environment.cost_rate)?)
    }

    pub fn env_config(&self) -> Result<EnvConfig> {
        let e = &self.environment;
        Ok(EnvConfig {
            initial_cash: e.initial_cash,
            initial_shares: 0,
            costs: self.costs()?,
            reward: match e.reward {
                RewardSetting::Percentage => RewardMode::Percentage,
                RewardSetting::Absolute => RewardMode::Absolute,
            },
            buy_fraction: e.buy_fraction,
            sell_fraction: e.sell_fraction,
        })
    }

    pub fn metrics_config(&self) -> MetricsConfig {
        MetricsConfig {
            risk_free_daily: self.metrics.risk_free_daily,
            annualization: self.metrics.annualization,
            holding_basis: match self.metrics.holding_basis {
                HoldingSetting::CalendarDays => HoldingBasis::CalendarDays,
                HoldingSetting::TradingDays => HoldingBasis::TradingDays,
            },
        }
    }

    pub fn csv_path(&self) -> Option<PathBuf> {
        match &self.data {
            DataSource::Csv(p) if p.is_relative() => Some(self.base_dir.join(p)),
            DataSource::Csv(p) => Some(p.clone()),
            DataSource::Synthetic(_) => None,
        }
    }

    /// Output directory: the config's own, else `$DQTRADE_OUT/<agent>-seed<N>`,
    /// else `runs/<agent>-seed<N>`.
    pub fn default_output_dir(&self) -> PathBuf {
        if let Some(dir) = &self.output_dir {
            return dir.clone();
        }
        let root = std::env::var_os(OUT_ENV).map_or_else(|| PathBuf::from("runs"), PathBuf::from);
        root.join(format!("{}-seed{}", self.agent.name(), self.seed))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        for (name, w) in [("train", &self.train), ("test", &self.test)] {
            if w.start > w.end {
                return bad(format!("{name} window starts after it ends ({} > {})", w.start, w.end));
            }
        }
        if self.test.start <= self.train.end {
            return bad(format!(
                "test window must start after the train window ends (test starts {}, train ends {})",
                self.test.start, self.train.end
            ));
        }
        if self.window() == 0 {
            return bad("features.window must be at least 1".into());
        }
        self.train_config().validate()?;
        self.env_config()?.validate()?;
        if self.network.hidden.contains(&0) {
            return bad("network.hidden sizes must be positive".into());
        }
        let cuts = &self.tabular.cuts;
        if cuts.iter().any(|c| !c.is_finite()) || cuts.windows(2).any(|w| w[0] >= w[1]) {
            return bad("tabular.cuts must be finite and strictly increasing".into());
        }
        if self.sma.fast == 0 || self.sma.slow <= self.sma.fast {
            return bad("sma periods need slow > fast >= 1".into());
        }
        if !(self.metrics.annualization > 0.0) || !self.metrics.risk_free_daily.is_finite() {
            return bad("metrics.annualization must be positive".into());
        }
        Ok(())
    }

    /// Copy with the return window resolved, as written to `config_echo.json`.
    pub fn resolved(&self) -> ExperimentConfig {
        let mut c = self.clone();
        c.features.window = Some(self.window());
        c
    }
}

/// Sets `path` (dot separated) in a JSON document. The value is read as JSON
/// when it parses, otherwise as a plain string.
pub fn apply_override(doc: &mut Value, path: &str, raw: &str) -> Result<()> {
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(Error::Config(format!("bad override path `{path}`")));
    }
    let mut node = doc;
    for key in &keys[..keys.len() - 1] {
        let map = node
            .as_object_mut()
            .ok_or_else(|| Error::Config(format!("cannot set `{path}`: `{key}` is inside a non-object")))?;
        node = map.entry(key.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    let map = node
        .as_object_mut()
        .ok_or_else(|| Error::Config(format!("cannot set `{path}`: parent is not an object")))?;
    map.insert(keys[keys.len() - 1].to_string(), value);
    Ok(())
}

/// Builds a validated config from a JSON document and `key=value` overrides.
pub fn config_from_value(mut doc: Value, overrides: &[(String, String)], base_dir: &Path) -> Result<ExperimentConfig> {
    for (k, v) in overrides {
        apply_override(&mut doc, k, v)?;
    }
    let mut cfg: ExperimentConfig = serde_json::from_value(doc).map_err(|e| Error::Config(e.to_string()))?;
    cfg.base_dir = base_dir.to_path_buf();
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config_str(text: &str, overrides: &[(String, String)], base_dir: &Path) -> Result<ExperimentConfig> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    config_from_value(doc, overrides, base_dir)
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    parse_config_with(path, &[])
}

pub fn parse_config_with(path: impl AsRef<Path>, overrides: &[(String, String)]) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new(""));
    parse_config_str(&text, overrides, base)
}
