mod common;

use common::ToyMdp;
use dqtrade_core::rl_agents::{train_qlearning, Discretizer, StateKey, TrainConfig};
use dqtrade_core::trading_env::Action;

fn config() -> TrainConfig {
    TrainConfig {
        alpha: 0.1,
        gamma: 0.99,
        episodes: 5_000,
        seed: 7,
        ..TrainConfig::default()
    }
}

#[test]
fn converges_to_value_iteration() {
    let mut mdp = ToyMdp::three_state();
    let q_star = mdp.q_star(0.99);
    // Sanity on the oracle: V(s2) = 1 via Sell, Q(s1, Buy) = -0.1 + 0.99.
    assert!((q_star[2][2] - 1.0).abs() < 1e-12);
    assert!((q_star[1][1] - 0.89).abs() < 1e-12);

    let disc = Discretizer::uniform(1, &[0.5, 1.5]).unwrap();
    let (table, history) = train_qlearning(&mut mdp, &config(), &disc).unwrap();
    assert_eq!(history.len(), 5_000);
    let mut worst = 0.0_f64;
    for (s, row) in q_star.iter().enumerate() {
        let learned = table.values(&StateKey(vec![s as u16]));
        for a in 0..3 {
            worst = worst.max((learned[a] - row[a]).abs());
        }
    }
    assert!(worst < 1e-2, "max |Q - Q*| = {worst}");
    let greedy = table.values(&StateKey(vec![0]));
    assert_eq!(dqtrade_core::rl_agents::argmax(&greedy), Action::Buy.index());
}

#[test]
fn identical_seeds_identical_tables() {
    let disc = Discretizer::uniform(1, &[0.5, 1.5]).unwrap();
    let cfg = TrainConfig {
        episodes: 300,
        ..config()
    };
    let a = train_qlearning(&mut ToyMdp::three_state(), &cfg, &disc).unwrap();
    let b = train_qlearning(&mut ToyMdp::three_state(), &cfg, &disc).unwrap();
    assert_eq!(a, b);
    let c = train_qlearning(&mut ToyMdp::three_state(), &TrainConfig { seed: 8, ..cfg }, &disc).unwrap();
    assert_ne!(a.1, c.1);
}
