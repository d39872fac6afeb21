//! Train/test splitting, training, greedy evaluation and report assembly.

use dqtrade_core::market_data::synthetic::generate_synthetic;
use dqtrade_core::market_data::{build_window, BarSeries, MarketWindow, Normalizer};
use dqtrade_core::metrics::{compute_report, MetricsReport, ReportInputs};
use dqtrade_core::neural_net::Mlp;
use dqtrade_core::rl_agents::baselines::{buy_and_hold, sma_crossover};
use dqtrade_core::rl_agents::{
    train_dqn, train_qlearning, DqnPolicy, Discretizer, EpisodeStats, Policy, QTable, TabularPolicy,
};
use dqtrade_core::trading_env::{EpisodeRecord, TradingEnv, TradingSession};

use crate::config::{AgentKind, DataSource, DateWindow, ExperimentConfig};
use crate::data::load_csv;
use crate::error::{Error, Result, Stage, StageExt};

/// Name the mandatory benchmark is reported under.
pub const BENCHMARK: &str = "buy_and_hold";

/// Bars dated inside `w`; at least two are required.
pub fn select_window(bars: &BarSeries, name: &str, w: DateWindow) -> Result<BarSeries> {
    let part = bars.between(w.start, w.end);
    if part.len() < 2 {
        return Err(Error::EmptyWindow(format!(
            "{name} window {}..={} holds {} bar(s), need at least 2",
            w.start,
            w.end,
            part.len()
        )));
    }
    Ok(part)
}

/// Splits `bars` into the train and test windows.
pub fn split_train_test(bars: &BarSeries, train: DateWindow, test: DateWindow) -> Result<(BarSeries, BarSeries)> {
    if test.start <= train.end {
        return Err(Error::Config("train window must end before the test window starts".into()));
    }
    Ok((select_window(bars, "train", train)?, select_window(bars, "test", test)?))
}

pub fn load_bars(cfg: &ExperimentConfig) -> Result<BarSeries> {
    let bars = match &cfg.data {
        DataSource::Csv(_) => load_csv(cfg.csv_path().unwrap())?,
        DataSource::Synthetic(s) => generate_synthetic(&s.spec(), s.seed)?,
    };
    Ok(match &cfg.symbol {
        Some(sym) => BarSeries::new(sym.clone(), bars.bars().to_vec())?,
        None => bars,
    })
}

/// Training-side data. Learning agents get an observation window built with
/// a normalizer fitted here, on the train window alone; `bars` is then
/// trimmed to the window's dates.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainData {
    pub bars: BarSeries,
    pub features: Option<(Normalizer, MarketWindow)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestData {
    /// Test bars every strategy is evaluated on.
    pub bars: BarSeries,
    pub window: Option<MarketWindow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub train: TrainData,
    pub test: TestData,
}

fn check_window(name: &str, w: &MarketWindow, n: usize) -> Result<()> {
    if w.len() < 2 {
        return Err(Error::EmptyWindow(format!(
            "{name} window yields {} observation(s) with a {n}-day look-back",
            w.len()
        )));
    }
    Ok(())
}

fn trim(bars: &BarSeries, w: &MarketWindow) -> BarSeries {
    bars.between(w.dates[0], *w.dates.last().unwrap())
}

pub fn prepare_train(cfg: &ExperimentConfig, train_bars: &BarSeries) -> Result<TrainData> {
    if !cfg.agent.learns() {
        return Ok(TrainData {
            bars: train_bars.clone(),
            features: None,
        });
    }
    let fc = cfg.feature_config();
    let normalizer = fc.fit_normalizer(train_bars)?;
    let window = build_window(train_bars, &normalizer, &fc, None)?;
    check_window("train", &window, fc.window)?;
    Ok(TrainData {
        bars: trim(train_bars, &window),
        features: Some((normalizer, window)),
    })
}

/// Test data over `bars` (the full series). Bars before the test window
/// only supply look-back for the first test observations.
pub fn prepare_test(cfg: &ExperimentConfig, bars: &BarSeries, train: &TrainData) -> Result<TestData> {
    let test_bars = bars.between(cfg.test.start, cfg.test.end);
    let Some((normalizer, _)) = &train.features else {
        return Ok(TestData {
            bars: test_bars,
            window: None,
        });
    };
    let fc = cfg.feature_config();
    let history = bars.between(bars.bars()[0].date, cfg.test.end);
    let window = build_window(&history, normalizer, &fc, Some(cfg.test.start))?;
    check_window("test", &window, fc.window)?;
    Ok(TestData {
        bars: trim(&test_bars, &window),
        window: Some(window),
    })
}

pub fn prepare(cfg: &ExperimentConfig, bars: &BarSeries) -> Result<Prepared> {
    let (train_bars, _) = split_train_test(bars, cfg.train, cfg.test)?;
    let train = prepare_train(cfg, &train_bars)?;
    let test = prepare_test(cfg, bars, &train)?;
    Ok(Prepared { train, test })
}

/// A trained (or rule-based) decision maker.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Dqn(Mlp),
    Tabular(QTable),
    BuyAndHold,
    SmaCrossover,
}

/// The tabular agent bins the return part of each observation.
pub fn discretizer(cfg: &ExperimentConfig, normalizer: &Normalizer) -> Result<Discretizer> {
    let cuts: Vec<f64> = cfg.tabular.cuts.iter().map(|&c| normalizer.scale_unclamped(c)).collect();
    Ok(Discretizer::range(0, cfg.window(), &cuts)?)
}

pub fn network_sizes(cfg: &ExperimentConfig) -> Vec<usize> {
    let mut sizes = vec![cfg.feature_config().observation_len()];
    sizes.extend(&cfg.network.hidden);
    sizes.push(3);
    sizes
}

fn learned(features: &Option<(Normalizer, MarketWindow)>) -> Result<&(Normalizer, MarketWindow)> {
    features
        .as_ref()
        .ok_or_else(|| Error::Config("learning agents need an observation window".into()))
}

/// Trains the configured agent on the train window.
pub fn train(cfg: &ExperimentConfig, data: &TrainData) -> Result<(Model, Vec<EpisodeStats>)> {
    if !cfg.agent.learns() {
        let model = match cfg.agent {
            AgentKind::BuyAndHold => Model::BuyAndHold,
            _ => Model::SmaCrossover,
        };
        return Ok((model, Vec::new()));
    }
    let (normalizer, window) = learned(&data.features)?;
    let tc = cfg.train_config();
    let mut session = TradingSession::new(TradingEnv::new(window.clone(), cfg.env_config()?)?);
    Ok(if cfg.agent == AgentKind::Dqn {
        let net = Mlp::new(&network_sizes(cfg), cfg.seed)?;
        let (net, history) = train_dqn(&mut session, &tc, net)?;
        (Model::Dqn(net), history)
    } else {
        let (table, history) = train_qlearning(&mut session, &tc, &discretizer(cfg, normalizer)?)?;
        (Model::Tabular(table), history)
    })
}

/// Greedy (epsilon = 0) episode of `model` over `bars`. Learning agents
/// read observations from `window`, which must cover the same dates.
pub fn evaluate_model(
    cfg: &ExperimentConfig,
    model: &Model,
    features: Option<(&Normalizer, &MarketWindow)>,
    bars: &BarSeries,
) -> Result<EpisodeRecord> {
    let cash = cfg.environment.initial_cash;
    let costs = cfg.costs()?;
    let env = || -> Result<(TradingEnv, &Normalizer)> {
        let (norm, window) = features.ok_or_else(|| Error::Config("learning agents need an observation window".into()))?;
        Ok((TradingEnv::new(window.clone(), cfg.env_config()?)?, norm))
    };
    Ok(match model {
        Model::Dqn(net) => env()?.0.run(DqnPolicy { net: net.clone() }.as_fn())?,
        Model::Tabular(table) => {
            let (env, norm) = env()?;
            let policy = TabularPolicy {
                table: table.clone(),
                discretizer: discretizer(cfg, norm)?,
            };
            env.run(policy.as_fn())?
        }
        Model::BuyAndHold => buy_and_hold(bars, cash, costs)?,
        Model::SmaCrossover => sma_crossover(bars, cfg.sma.fast, cfg.sma.slow, cash, costs)?,
    })
}

/// One strategy's result over one window.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub record: EpisodeRecord,
    pub metrics: MetricsReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyResult {
    pub name: String,
    pub train: Evaluation,
    pub test: Evaluation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub config: ExperimentConfig,
    pub symbol: String,
    pub train_window: DateWindow,
    /// First and last evaluated test dates.
    pub test_window: DateWindow,
    pub strategies: Vec<StrategyResult>,
    pub history: Vec<EpisodeStats>,
    pub model: Model,
}

impl Report {
    pub fn strategy(&self, name: &str) -> Option<&StrategyResult> {
        self.strategies.iter().find(|s| s.name == name)
    }
}

fn window_span(bars: &BarSeries) -> DateWindow {
    let dates = bars.dates();
    DateWindow::new(dates[0], dates[dates.len() - 1])
}

fn evaluation(cfg: &ExperimentConfig, record: EpisodeRecord, bars: &BarSeries) -> Result<Evaluation> {
    let closes = bars.closes();
    let volumes = bars.volumes();
    let metrics = compute_report(
        ReportInputs {
            curve: &record.curve,
            fills: &record.fills,
            closes: &closes,
            volumes: &volumes,
        },
        &cfg.metrics_config(),
    )?;
    Ok(Evaluation { record, metrics })
}

/// Evaluates `model` and the buy-and-hold benchmark on both windows.
pub fn evaluate(cfg: &ExperimentConfig, data: &Prepared, model: Model, history: Vec<EpisodeStats>) -> Result<Report> {
    let normalizer = data.train.features.as_ref().map(|(n, _)| n);
    let train_features = data.train.features.as_ref().map(|(n, w)| (n, w));
    let test_features = normalizer.zip(data.test.window.as_ref());
    let mut models = vec![(cfg.agent.name(), &model)];
    if cfg.agent != AgentKind::BuyAndHold {
        models.push((BENCHMARK, &Model::BuyAndHold));
    }
    let mut strategies = Vec::new();
    for (name, m) in models {
        let train_rec = evaluate_model(cfg, m, train_features, &data.train.bars)?;
        let test_rec = evaluate_model(cfg, m, test_features, &data.test.bars)?;
        strategies.push(StrategyResult {
            name: name.to_string(),
            train: evaluation(cfg, train_rec, &data.train.bars)?,
            test: evaluation(cfg, test_rec, &data.test.bars)?,
        });
    }
    Ok(Report {
        config: cfg.resolved(),
        symbol: data.test.bars.symbol().to_string(),
        train_window: window_span(&data.train.bars),
        test_window: window_span(&data.test.bars),
        strategies,
        history,
        model,
    })
}

/// Loads data, trains, and evaluates. Deterministic for a given config.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    let bars = load_bars(cfg).stage(Stage::Ingest)?;
    run_on_bars(cfg, &bars)
}

/// [`run_experiment`] on already loaded bars.
pub fn run_on_bars(cfg: &ExperimentConfig, bars: &BarSeries) -> Result<Report> {
    let data = prepare(cfg, bars).stage(Stage::Ingest)?;
    let (model, history) = train(cfg, &data.train).stage(Stage::Train)?;
    evaluate(cfg, &data, model, history).stage(Stage::Evaluate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;
    use dqtrade_core::market_data::Bar;

    fn day(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    fn yearly_bars() -> BarSeries {
        let mut bars = Vec::new();
        let mut d = day(2019, 12, 20);
        for i in 0..20 {
            bars.push(Bar::flat(d, 100.0 + i as f64, 10.0).unwrap());
            d = d.succ_opt().unwrap();
        }
        BarSeries::new("X", bars).unwrap()
    }

    #[test]
    fn split_partitions_by_date() {
        let bars = yearly_bars();
        let train = DateWindow::new(day(2010, 1, 1), day(2019, 12, 31));
        let test = DateWindow::new(day(2020, 1, 1), day(2020, 12, 31));
        let (a, b) = split_train_test(&bars, train, test).unwrap();
        assert_eq!(a.len() + b.len(), bars.len());
        assert!(b.dates().iter().all(|d| *d >= day(2020, 1, 1)));
        assert!(a.dates().iter().all(|d| !b.dates().contains(d)));
    }

    #[test]
    fn empty_window_is_an_error() {
        let bars = yearly_bars();
        let train = DateWindow::new(day(2010, 1, 1), day(2019, 12, 31));
        let test = DateWindow::new(day(2021, 1, 1), day(2021, 12, 31));
        assert!(matches!(split_train_test(&bars, train, test), Err(Error::EmptyWindow(_))));
    }
}
