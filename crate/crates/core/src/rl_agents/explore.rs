use rand::Rng;

use crate::trading_env::Action;
use crate::{Error, Result};

/// Index of the largest value; ties resolve to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Epsilon-greedy choice over three action values. Always draws one uniform
/// variate, plus a second when exploring.
pub fn select_action<R: Rng + ?Sized>(values: &[f64], epsilon: f64, rng: &mut R) -> Action {
    if rng.gen::<f64>() < epsilon {
        Action::ALL[rng.gen_range(0..Action::COUNT)]
    } else {
        Action::ALL[argmax(&values[..Action::COUNT])]
    }
}

/// Linear decay from `start` to `end` over `decay_steps`, flat afterwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonSchedule {
    start: f64,
    end: f64,
    decay_steps: usize,
}

impl EpsilonSchedule {
    pub fn new(start: f64, end: f64, decay_steps: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&end) || end > start {
            return Err(Error::invalid("epsilon schedule", "need 0 <= end <= start <= 1"));
        }
        if decay_steps == 0 {
            return Err(Error::invalid("decay_steps", "must be at least 1"));
        }
        Ok(EpsilonSchedule {
            start,
            end,
            decay_steps,
        })
    }

    pub fn value(&self, step: usize) -> f64 {
        if step >= self.decay_steps {
            self.end
        } else {
            self.start + (self.end - self.start) * (step as f64 / self.decay_steps as f64)
        }
    }
}
