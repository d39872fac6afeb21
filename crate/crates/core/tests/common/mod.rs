#![allow(dead_code)]

use chrono::NaiveDate;
use dqtrade_core::market_data::synthetic::{generate_synthetic, SyntheticKind, SyntheticSpec};
use dqtrade_core::market_data::{build_window, BarSeries, FeatureConfig, MarketWindow};
use dqtrade_core::trading_env::{Action, Environment, Feedback};
use dqtrade_core::Result;

/// Period-10 sinusoid around 100 with amplitude 10, on business days.
pub fn sinusoid(length: usize) -> BarSeries {
    let spec = SyntheticSpec {
        symbol: "SIN".into(),
        kind: SyntheticKind::Sinusoid {
            base: 100.0,
            amplitude: 10.0,
            period: 10.0,
            noise: 0.0,
        },
        length,
        start: NaiveDate::from_ymd_opt(2019, 1, 1).unwrap(),
        volume: 1e6,
    };
    generate_synthetic(&spec, 42).unwrap()
}

pub fn train_window(bars: &BarSeries, fc: &FeatureConfig) -> MarketWindow {
    let norm = fc.fit_normalizer(bars).unwrap();
    build_window(bars, &norm, fc, None).unwrap()
}

/// Deterministic finite MDP: `next[s][a]` is `None` when the transition is
/// terminal. Episodes start in state 0 and are cut after `horizon` steps.
pub struct ToyMdp {
    pub next: Vec<[Option<usize>; 3]>,
    pub reward: Vec<[f64; 3]>,
    pub horizon: usize,
    state: usize,
    steps: usize,
    total: f64,
}

impl ToyMdp {
    pub fn three_state() -> Self {
        ToyMdp {
            next: vec![
                [Some(0), Some(1), None],
                [Some(1), Some(2), Some(0)],
                [Some(2), Some(1), None],
            ],
            reward: vec![[0.0, -0.1, 0.0], [0.0, -0.1, 0.05], [0.0, 0.0, 1.0]],
            horizon: 20,
            state: 0,
            steps: 0,
            total: 0.0,
        }
    }

    /// Value iteration on Q to a fixed point.
    pub fn q_star(&self, gamma: f64) -> Vec<[f64; 3]> {
        let mut q = vec![[0.0; 3]; self.next.len()];
        loop {
            let mut delta = 0.0_f64;
            let mut updated = q.clone();
            for s in 0..q.len() {
                for a in 0..3 {
                    let future = match self.next[s][a] {
                        Some(n) => gamma * q[n].iter().copied().fold(f64::NEG_INFINITY, f64::max),
                        None => 0.0,
                    };
                    updated[s][a] = self.reward[s][a] + future;
                    delta = delta.max((updated[s][a] - q[s][a]).abs());
                }
            }
            q = updated;
            if delta < 1e-14 {
                return q;
            }
        }
    }
}

impl Environment for ToyMdp {
    fn reset(&mut self) -> Result<Vec<f64>> {
        self.state = 0;
        self.steps = 0;
        self.total = 0.0;
        Ok(vec![0.0])
    }

    fn step(&mut self, action: Action) -> Result<Feedback> {
        let a = action.index();
        let reward = self.reward[self.state][a];
        self.steps += 1;
        self.total += reward;
        let (obs, terminal) = match self.next[self.state][a] {
            Some(n) => {
                self.state = n;
                (n as f64, false)
            }
            None => (self.state as f64, true),
        };
        Ok(Feedback {
            observation: vec![obs],
            reward,
            done: terminal || self.steps >= self.horizon,
            terminal,
        })
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn episode_roi(&self) -> f64 {
        self.total
    }
}
