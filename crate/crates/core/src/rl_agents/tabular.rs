use alloc::collections::BTreeMap;

use super::StateKey;
use crate::trading_env::Action;

/// Sparse Q-table. States never written read as all-zero action values.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QTable {
    values: BTreeMap<StateKey, [f64; 3]>,
}

impl QTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn values(&self, state: &StateKey) -> [f64; 3] {
        self.values.get(state).copied().unwrap_or([0.0; 3])
    }

    pub fn get(&self, state: &StateKey, action: Action) -> f64 {
        self.values(state)[action.index()]
    }

    pub fn set(&mut self, state: StateKey, values: [f64; 3]) {
        self.values.insert(state, values);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Visited states in key order.
    pub fn iter(&self) -> impl Iterator<Item = (&StateKey, &[f64; 3])> {
        self.values.iter()
    }

    /// One Q-learning backup:
    /// `Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a))`, with the
    /// bootstrap term dropped on terminal transitions. Returns the TD error.
    #[allow(clippy::too_many_arguments)]
    pub fn update(
        &mut self,
        state: &StateKey,
        action: Action,
        reward: f64,
        next: &StateKey,
        terminal: bool,
        alpha: f64,
        gamma: f64,
    ) -> f64 {
        let future = if terminal {
            0.0
        } else {
            self.values(next).iter().copied().fold(f64::NEG_INFINITY, f64::max)
        };
        let entry = self.values.entry(state.clone()).or_insert([0.0; 3]);
        let q = &mut entry[action.index()];
        let td = reward + gamma * future - *q;
        *q += alpha * td;
        td
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn k(v: u16) -> StateKey {
        StateKey(vec![v])
    }

    #[test]
    fn update_examples() {
        let mut q = QTable::new();
        q.update(&k(0), Action::Buy, 1.0, &k(1), false, 0.5, 0.9);
        assert_eq!(q.get(&k(0), Action::Buy), 0.5);

        let mut z = QTable::new();
        z.update(&k(0), Action::Hold, 0.0, &k(0), false, 0.3, 0.9);
        assert_eq!(z.get(&k(0), Action::Hold), 0.0);

        let mut t = QTable::new();
        t.set(k(1), [100.0, 100.0, 100.0]);
        t.update(&k(0), Action::Sell, 2.0, &k(1), true, 1.0, 0.9);
        assert_eq!(t.get(&k(0), Action::Sell), 2.0);
    }

    #[test]
    fn bootstraps_from_best_next_action() {
        let mut q = QTable::new();
        q.set(k(1), [1.0, 4.0, -2.0]);
        q.update(&k(0), Action::Hold, 1.0, &k(1), false, 1.0, 0.5);
        assert_eq!(q.get(&k(0), Action::Hold), 3.0);
    }

    #[test]
    fn unvisited_reads_zero() {
        assert_eq!(QTable::new().values(&k(7)), [0.0; 3]);
    }

    proptest! {
        #[test]
        fn update_is_convex_combination(
            old in -10.0f64..10.0,
            next in prop::array::uniform3(-10.0f64..10.0),
            r in -5.0f64..5.0,
            alpha in 0.001f64..=1.0,
            gamma in 0.0f64..0.999,
            terminal in any::<bool>(),
        ) {
            let mut q = QTable::new();
            q.set(k(0), [old, 0.0, 0.0]);
            q.set(k(1), next);
            let target = r + if terminal { 0.0 } else { gamma * next.iter().copied().fold(f64::NEG_INFINITY, f64::max) };
            q.update(&k(0), Action::Hold, r, &k(1), terminal, alpha, gamma);
            let new = q.get(&k(0), Action::Hold);
            let (lo, hi) = (old.min(target), old.max(target));
            prop_assert!(new >= lo - 1e-12 && new <= hi + 1e-12);
            if alpha == 1.0 && terminal {
                prop_assert_eq!(new, r);
            }
        }
    }
}
