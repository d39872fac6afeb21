//! Single-symbol trading simulator.
//!
//! Orders fill at the current day's close with no slippage. Buys size
//! positions as a fraction of available cash, sells liquidate a fraction of
//! holdings, and both trade whole shares only. Actions that cannot trade
//! (a sell while flat, a buy that cannot afford one share) act as `Hold`.

mod portfolio;

use alloc::vec::Vec;

pub use portfolio::{execute_buy, execute_sell, roi, wealth, CostModel, Portfolio};

use crate::market_data::{MarketWindow, Observation};
use crate::metrics::{EquityCurve, Fill, Side};
use crate::{Error, Result};

/// The three discrete trading decisions, encoded 0 = Hold, 1 = Buy, 2 = Sell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Action {
    Hold = 0,
    Buy = 1,
    Sell = 2,
}

impl Action {
    pub const COUNT: usize = 3;
    pub const ALL: [Action; 3] = [Action::Hold, Action::Buy, Action::Sell];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Action> {
        Self::ALL.get(i).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RewardMode {
    /// `(w_t - w_{t-1}) / w_{t-1}`
    #[default]
    Percentage,
    /// `w_t - w_{t-1}`
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvConfig {
    pub initial_cash: f64,
    pub initial_shares: u64,
    pub costs: CostModel,
    pub reward: RewardMode,
    /// Fraction of cash committed by a Buy, in `(0, 1]`.
    pub buy_fraction: f64,
    /// Fraction of holdings liquidated by a Sell, in `(0, 1]`.
    pub sell_fraction: f64,
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig {
            initial_cash: 100_000.0,
            initial_shares: 0,
            costs: CostModel::default(),
            reward: RewardMode::Percentage,
            buy_fraction: 1.0,
            sell_fraction: 1.0,
        }
    }
}

impl EnvConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.initial_cash > 0.0) || !self.initial_cash.is_finite() {
            return Err(Error::invalid("initial_cash", "must be positive"));
        }
        for (name, f) in [("buy_fraction", self.buy_fraction), ("sell_fraction", self.sell_fraction)] {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::invalid(name, "must lie in (0, 1]"));
            }
        }
        Ok(())
    }
}

/// Mutable episode state. Only [`TradingEnv::step`] advances it.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvState {
    pub portfolio: Portfolio,
    pub step_index: usize,
    pub wealth_prev: f64,
    pub initial_wealth: f64,
    pub done: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub reward: f64,
    pub done: bool,
    /// Wealth marked at the new day's close.
    pub wealth: f64,
    /// The trade actually executed, if any.
    pub fill: Option<Fill>,
}

#[derive(Debug, Clone)]
pub struct TradingEnv {
    window: MarketWindow,
    config: EnvConfig,
}

impl TradingEnv {
    pub fn new(window: MarketWindow, config: EnvConfig) -> Result<Self> {
        config.validate()?;
        if window.len() < 2 {
            return Err(Error::InsufficientData {
                needed: 2,
                available: window.len(),
            });
        }
        Ok(TradingEnv { window, config })
    }

    pub fn window(&self) -> &MarketWindow {
        &self.window
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    /// Number of steps in one episode.
    pub fn episode_len(&self) -> usize {
        self.window.len() - 1
    }

    pub fn reset(&self) -> EnvState {
        let portfolio = Portfolio {
            cash: self.config.initial_cash,
            shares: self.config.initial_shares,
        };
        let w0 = wealth(&portfolio, self.window.closes[0]);
        EnvState {
            portfolio,
            step_index: 0,
            wealth_prev: w0,
            initial_wealth: w0,
            done: false,
        }
    }

    pub fn observation(&self, state: &EnvState) -> &Observation {
        &self.window.observations[state.step_index]
    }

    /// Executes `action` at the current close, then advances one day and
    /// marks the portfolio at the new close.
    pub fn step(&self, state: &mut EnvState, action: Action) -> Result<StepOutcome> {
        if state.done {
            return Err(Error::EpisodeFinished);
        }
        let t = state.step_index;
        let price = self.window.closes[t];
        let date = self.window.dates[t];
        let before = state.portfolio;
        let after = match action {
            Action::Hold => before,
            Action::Buy => execute_buy(&before, price, self.config.buy_fraction, &self.config.costs)?,
            Action::Sell => execute_sell(&before, price, self.config.sell_fraction, &self.config.costs)?,
        };
        let fill = if after.shares > before.shares {
            let shares = after.shares - before.shares;
            Some(Fill::new(date, Side::Buy, shares, price, self.config.costs.fee(shares, price)))
        } else if after.shares < before.shares {
            let shares = before.shares - after.shares;
            Some(Fill::new(date, Side::Sell, shares, price, self.config.costs.fee(shares, price)))
        } else {
            None
        };
        state.portfolio = after;

        state.step_index = t + 1;
        let w = wealth(&state.portfolio, self.window.closes[t + 1]);
        let reward = match self.config.reward {
            RewardMode::Percentage => (w - state.wealth_prev) / state.wealth_prev,
            RewardMode::Absolute => w - state.wealth_prev,
        };
        state.wealth_prev = w;
        state.done = state.step_index + 1 == self.window.len();
        Ok(StepOutcome {
            reward,
            done: state.done,
            wealth: w,
            fill,
        })
    }

    /// Runs one full episode under `policy` and records what happened.
    pub fn run<P>(&self, mut policy: P) -> Result<EpisodeRecord>
    where
        P: FnMut(&Observation) -> Action,
    {
        let mut state = self.reset();
        let mut values = Vec::with_capacity(self.window.len());
        values.push(state.wealth_prev);
        let mut fills = Vec::new();
        let mut actions = Vec::with_capacity(self.episode_len());
        let mut rewards = Vec::with_capacity(self.episode_len());
        while !state.done {
            let action = policy(self.observation(&state));
            let out = self.step(&mut state, action)?;
            values.push(out.wealth);
            rewards.push(out.reward);
            actions.push(action);
            fills.extend(out.fill);
        }
        Ok(EpisodeRecord {
            curve: EquityCurve::new(self.window.dates.clone(), values)?,
            fills,
            actions,
            rewards,
            final_portfolio: state.portfolio,
        })
    }
}

/// Everything observable about one evaluated episode.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    pub curve: EquityCurve,
    pub fills: Vec<Fill>,
    pub actions: Vec<Action>,
    pub rewards: Vec<f64>,
    pub final_portfolio: Portfolio,
}

impl EpisodeRecord {
    pub fn roi(&self) -> f64 {
        self.curve.roi()
    }
}

/// Feedback from one environment transition, as seen by a learning agent.
#[derive(Debug, Clone, PartialEq)]
pub struct Feedback {
    pub observation: Vec<f64>,
    pub reward: f64,
    /// The episode has ended; no further steps follow.
    pub done: bool,
    /// The episode ended because of a genuine terminal state rather than the
    /// end of the data, so no value should be bootstrapped past it.
    pub terminal: bool,
}

/// Episodic environment interface consumed by the training loops.
pub trait Environment {
    fn reset(&mut self) -> Result<Vec<f64>>;
    fn step(&mut self, action: Action) -> Result<Feedback>;
    /// Upper bound on steps per episode.
    fn horizon(&self) -> usize;
    /// Return on investment of the episode in progress (or just finished).
    fn episode_roi(&self) -> f64;
}

/// A [`TradingEnv`] bundled with its running state, for the training loops.
#[derive(Debug, Clone)]
pub struct TradingSession {
    env: TradingEnv,
    state: EnvState,
}

impl TradingSession {
    pub fn new(env: TradingEnv) -> Self {
        let state = env.reset();
        TradingSession { env, state }
    }

    pub fn env(&self) -> &TradingEnv {
        &self.env
    }

    pub fn state(&self) -> &EnvState {
        &self.state
    }
}

impl Environment for TradingSession {
    fn reset(&mut self) -> Result<Vec<f64>> {
        self.state = self.env.reset();
        Ok(self.env.observation(&self.state).values.clone())
    }

    fn step(&mut self, action: Action) -> Result<Feedback> {
        let out = self.env.step(&mut self.state, action)?;
        Ok(Feedback {
            observation: self.env.observation(&self.state).values.clone(),
            reward: out.reward,
            done: out.done,
            // The data running out is a time limit, not an absorbing state.
            terminal: false,
        })
    }

    fn horizon(&self) -> usize {
        self.env.episode_len()
    }

    fn episode_roi(&self) -> f64 {
        roi(self.state.initial_wealth, self.state.wealth_prev).unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests;
