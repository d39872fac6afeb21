use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{argmax, select_action, Discretizer, EpisodeStats, EpsilonSchedule, Policy, QTable, TrainConfig};
use crate::trading_env::{Action, Environment};
use crate::{Error, Result};

/// Linear epsilon decay over `eps_decay_fraction` of all planned steps.
pub(super) fn schedule_for(cfg: &TrainConfig, horizon: usize) -> Result<EpsilonSchedule> {
    let total = cfg.episodes.saturating_mul(horizon.max(1));
    let decay = libm::ceil(cfg.eps_decay_fraction * total as f64) as usize;
    EpsilonSchedule::new(cfg.eps_start, cfg.eps_end, decay.max(1))
}

/// Tabular Q-learning: `cfg.episodes` full episodes of epsilon-greedy
/// interaction, one backup per step.
pub fn train_qlearning<E: Environment>(
    env: &mut E,
    cfg: &TrainConfig,
    discretizer: &Discretizer,
) -> Result<(QTable, Vec<EpisodeStats>)> {
    cfg.validate()?;
    if cfg.alpha > 1.0 {
        return Err(Error::invalid("alpha", "tabular step size must lie in (0, 1]"));
    }
    let schedule = schedule_for(cfg, env.horizon())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut table = QTable::new();
    let mut history = Vec::with_capacity(cfg.episodes);
    let mut t = 0usize;

    for episode in 1..=cfg.episodes {
        let eps_at_start = schedule.value(t);
        let mut state = discretizer.key(&env.reset()?)?;
        let mut sq_td = 0.0;
        let mut steps = 0usize;
        loop {
            let action = select_action(&table.values(&state), schedule.value(t), &mut rng);
            let fb = env.step(action)?;
            let next = discretizer.key(&fb.observation)?;
            let td = table.update(&state, action, fb.reward, &next, fb.terminal, cfg.alpha, cfg.gamma);
            sq_td += td * td;
            steps += 1;
            t += 1;
            state = next;
            if fb.done {
                break;
            }
        }
        history.push(EpisodeStats {
            episode,
            epsilon: eps_at_start,
            mean_loss: Some(sq_td / steps as f64),
            roi: env.episode_roi(),
        });
    }
    Ok((table, history))
}

/// Greedy policy over a trained table.
#[derive(Debug, Clone)]
pub struct TabularPolicy {
    pub table: QTable,
    pub discretizer: Discretizer,
}

impl Policy for TabularPolicy {
    fn act(&self, observation: &[f64]) -> Action {
        match self.discretizer.key(observation) {
            Ok(key) => Action::ALL[argmax(&self.table.values(&key))],
            Err(_) => Action::Hold,
        }
    }
}
