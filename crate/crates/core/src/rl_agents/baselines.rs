//! Non-learning comparison strategies. Both trade through the same
//! simulator and cost model as the agents.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::market_data::{sma, BarSeries, MarketWindow, Observation};
use crate::trading_env::{Action, CostModel, EnvConfig, EpisodeRecord, TradingEnv};
use crate::{Error, Result};

fn replay<F>(bars: &BarSeries, initial_cash: f64, costs: CostModel, mut decide: F) -> Result<EpisodeRecord>
where
    F: FnMut(usize, bool) -> Action,
{
    if bars.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            available: bars.len(),
        });
    }
    let dates = bars.dates();
    let window = MarketWindow {
        symbol: bars.symbol().to_string(),
        observations: dates
            .iter()
            .map(|&date| Observation { date, values: vec![] })
            .collect(),
        dates,
        closes: bars.closes(),
        volumes: bars.volumes(),
    };
    let env = TradingEnv::new(
        window,
        EnvConfig {
            initial_cash,
            costs,
            ..EnvConfig::default()
        },
    )?;
    let mut state = env.reset();
    let mut values = vec![state.wealth_prev];
    let mut fills = Vec::new();
    let mut actions = Vec::new();
    let mut rewards = Vec::new();
    while !state.done {
        let action = decide(state.step_index, state.portfolio.shares > 0);
        let out = env.step(&mut state, action)?;
        values.push(out.wealth);
        rewards.push(out.reward);
        actions.push(action);
        fills.extend(out.fill);
    }
    Ok(EpisodeRecord {
        curve: crate::metrics::EquityCurve::new(env.window().dates.clone(), values)?,
        fills,
        actions,
        rewards,
        final_portfolio: state.portfolio,
    })
}

/// Buys as many whole shares as cash allows at the first close and holds to
/// the end.
pub fn buy_and_hold(bars: &BarSeries, initial_cash: f64, costs: CostModel) -> Result<EpisodeRecord> {
    replay(bars, initial_cash, costs, |t, _| if t == 0 { Action::Buy } else { Action::Hold })
}

/// All-in long while the fast SMA is above the slow SMA, flat otherwise.
/// Signals are evaluated and traded at each day's close.
pub fn sma_crossover(
    bars: &BarSeries,
    fast: usize,
    slow: usize,
    initial_cash: f64,
    costs: CostModel,
) -> Result<EpisodeRecord> {
    if fast == 0 || slow <= fast {
        return Err(Error::invalid("sma periods", "need slow > fast >= 1"));
    }
    if bars.len() <= slow {
        return Err(Error::InsufficientData {
            needed: slow + 1,
            available: bars.len(),
        });
    }
    let closes = bars.closes();
    let fast_ma = sma(&closes, fast)?;
    let slow_ma = sma(&closes, slow)?;
    replay(bars, initial_cash, costs, |t, holding| {
        if t + 1 < slow {
            return Action::Hold;
        }
        let long = fast_ma[t + 1 - fast] > slow_ma[t + 1 - slow];
        match (long, holding) {
            (true, false) => Action::Buy,
            (false, true) => Action::Sell,
            _ => Action::Hold,
        }
    })
}
