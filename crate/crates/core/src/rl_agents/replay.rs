use alloc::collections::VecDeque;
use alloc::vec::Vec;

use rand::Rng;

use crate::trading_env::Action;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: Vec<f64>,
    pub action: Action,
    pub reward: f64,
    pub next_state: Vec<f64>,
    pub terminal: bool,
}

/// Bounded FIFO of transitions; the oldest is evicted once full.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    items: VecDeque<Transition>,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::invalid("buffer capacity", "must be at least 1"));
        }
        Ok(ReplayBuffer {
            capacity,
            items: VecDeque::with_capacity(capacity.min(1 << 16)),
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn push(&mut self, t: Transition) -> Result<()> {
        if t.state.len() != t.next_state.len() {
            return Err(Error::ShapeMismatch(alloc::format!(
                "transition state length {} but next_state length {}",
                t.state.len(),
                t.next_state.len()
            )));
        }
        if self.items.len() == self.capacity {
            self.items.pop_front();
        }
        self.items.push_back(t);
        Ok(())
    }

    /// Oldest first.
    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.items.iter()
    }

    /// `k` transitions drawn uniformly with replacement.
    pub fn sample<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Result<Vec<&Transition>> {
        if k == 0 {
            return Err(Error::invalid("batch size", "must be at least 1"));
        }
        if k > self.items.len() {
            return Err(Error::InsufficientData {
                needed: k,
                available: self.items.len(),
            });
        }
        Ok((0..k).map(|_| &self.items[rng.gen_range(0..self.items.len())]).collect())
    }
}
