use crate::{Error, Result};

/// Hyper-parameters shared by both learners.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    /// Learning rate: the Q-learning step size and the SGD rate for DQN.
    pub alpha: f64,
    /// Discount factor in `[0, 1)`.
    pub gamma: f64,
    /// One episode is one full pass over the training window.
    pub episodes: usize,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    /// Gradient steps between target-network synchronizations.
    pub target_sync_period: usize,
    pub eps_start: f64,
    pub eps_end: f64,
    /// Share of all training steps over which epsilon decays linearly.
    pub eps_decay_fraction: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            alpha: 0.001,
            gamma: 0.99,
            episodes: 200,
            batch_size: 32,
            buffer_capacity: 10_000,
            target_sync_period: 100,
            eps_start: 1.0,
            eps_end: 0.05,
            eps_decay_fraction: 0.8,
            seed: 42,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::invalid("alpha", "must be positive"));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::invalid("gamma", "must lie in [0, 1)"));
        }
        if self.episodes == 0 {
            return Err(Error::invalid("episodes", "must be at least 1"));
        }
        if self.batch_size == 0 {
            return Err(Error::invalid("batch_size", "must be at least 1"));
        }
        if self.buffer_capacity == 0 {
            return Err(Error::invalid("buffer_capacity", "must be at least 1"));
        }
        if self.target_sync_period == 0 {
            return Err(Error::invalid("target_sync_period", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.eps_start) || !(0.0..=1.0).contains(&self.eps_end) {
            return Err(Error::invalid("epsilon", "must lie in [0, 1]"));
        }
        if self.eps_end > self.eps_start {
            return Err(Error::invalid("eps_end", "must not exceed eps_start"));
        }
        if !(self.eps_decay_fraction > 0.0 && self.eps_decay_fraction <= 1.0) {
            return Err(Error::invalid("eps_decay_fraction", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// One row of training history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeStats {
    /// 1-based episode number.
    pub episode: usize,
    /// Exploration rate at the start of the episode.
    pub epsilon: f64,
    /// Mean squared TD error (tabular) or mean masked MSE (DQN); `None` when
    /// no update happened during the episode.
    pub mean_loss: Option<f64>,
    pub roi: f64,
}
