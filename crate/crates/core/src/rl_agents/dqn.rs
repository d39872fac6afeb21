use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::qlearning::schedule_for;
use super::{argmax, select_action, EpisodeStats, Policy, ReplayBuffer, TrainConfig, Transition};
use crate::neural_net::Mlp;
use crate::trading_env::{Action, Environment};
use crate::{Error, Result};

/// Regression targets: `r` on terminal transitions, otherwise
/// `r + gamma * max_a' target_net(s')[a']`.
pub fn bellman_targets(batch: &[&Transition], target_net: &Mlp, gamma: f64) -> Result<Vec<f64>> {
    batch
        .iter()
        .map(|t| {
            if t.terminal {
                Ok(t.reward)
            } else {
                let q = target_net.forward(&t.next_state)?;
                Ok(t.reward + gamma * q.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            }
        })
        .collect()
}

/// One SGD step of the online network towards the batch's Bellman targets,
/// with the loss restricted to each transition's taken action. Returns the
/// loss measured before the step.
pub fn fit_batch(online: &mut Mlp, target_net: &Mlp, batch: &[&Transition], gamma: f64, lr: f64) -> Result<f64> {
    let targets = bellman_targets(batch, target_net, gamma)?;
    let width = online.output_len();
    let mut inputs = Vec::with_capacity(batch.len());
    let mut target_rows = Vec::with_capacity(batch.len());
    let mut mask = Vec::with_capacity(batch.len());
    for (t, y) in batch.iter().zip(targets) {
        let a = t.action.index();
        let mut row = vec![0.0; width];
        row[a] = y;
        let mut m = vec![false; width];
        m[a] = true;
        inputs.push(t.state.clone());
        target_rows.push(row);
        mask.push(m);
    }
    let (loss, grads) = online.backward(&inputs, &target_rows, Some(&mask))?;
    online.sgd_step(&grads, lr)?;
    Ok(loss)
}

/// Deep Q-learning with uniform experience replay and a target network
/// synchronized every `cfg.target_sync_period` gradient steps. Learning
/// starts once the buffer holds `cfg.batch_size` transitions.
pub fn train_dqn<E: Environment>(env: &mut E, cfg: &TrainConfig, net: Mlp) -> Result<(Mlp, Vec<EpisodeStats>)> {
    cfg.validate()?;
    if cfg.batch_size > cfg.buffer_capacity {
        return Err(Error::invalid("batch_size", "cannot exceed buffer_capacity"));
    }
    if net.output_len() != Action::COUNT {
        return Err(Error::ShapeMismatch(alloc::format!(
            "network has {} outputs, need one per action",
            net.output_len()
        )));
    }
    let schedule = schedule_for(cfg, env.horizon())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut online = net;
    let mut target = online.clone();
    let mut buffer = ReplayBuffer::new(cfg.buffer_capacity)?;
    let mut history = Vec::with_capacity(cfg.episodes);
    let mut t = 0usize;
    let mut grad_steps = 0usize;

    for episode in 1..=cfg.episodes {
        let eps_at_start = schedule.value(t);
        let mut obs = env.reset()?;
        let mut loss_sum = 0.0;
        let mut updates = 0usize;
        loop {
            let q = online.forward(&obs)?;
            let action = select_action(&q, schedule.value(t), &mut rng);
            let fb = env.step(action)?;
            buffer.push(Transition {
                state: core::mem::take(&mut obs),
                action,
                reward: fb.reward,
                next_state: fb.observation.clone(),
                terminal: fb.terminal,
            })?;
            obs = fb.observation;
            t += 1;

            if buffer.len() >= cfg.batch_size {
                let batch = buffer.sample(cfg.batch_size, &mut rng)?;
                loss_sum += fit_batch(&mut online, &target, &batch, cfg.gamma, cfg.alpha)?;
                updates += 1;
                grad_steps += 1;
                if grad_steps.is_multiple_of(cfg.target_sync_period) {
                    target.copy_from(&online);
                }
            }
            if fb.done {
                break;
            }
        }
        history.push(EpisodeStats {
            episode,
            epsilon: eps_at_start,
            mean_loss: (updates > 0).then(|| loss_sum / updates as f64),
            roi: env.episode_roi(),
        });
    }
    Ok((online, history))
}

/// Greedy policy over a trained network.
#[derive(Debug, Clone)]
pub struct DqnPolicy {
    pub net: Mlp,
}

impl Policy for DqnPolicy {
    fn act(&self, observation: &[f64]) -> Action {
        match self.net.forward(observation) {
            Ok(q) => Action::ALL[argmax(&q)],
            Err(_) => Action::Hold,
        }
    }
}
