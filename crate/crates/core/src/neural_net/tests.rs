use super::*;
use proptest::prelude::*;
use rand::Rng;

fn set_layer(net: &mut Mlp, k: usize, weights: &[f64], biases: &[f64]) {
    let layer = &mut net.layers_mut()[k];
    layer.weights_mut().copy_from_slice(weights);
    layer.biases_mut().copy_from_slice(biases);
}

fn random_batch(rng: &mut ChaCha8Rng, rows: usize, width: usize) -> Vec<Vec<f64>> {
    (0..rows).map(|_| (0..width).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect()
}

fn param_mut(n: &mut Mlp, k: usize, which: usize, i: usize) -> &mut f64 {
    let l = &mut n.layers_mut()[k];
    if which == 0 {
        &mut l.weights_mut()[i]
    } else {
        &mut l.biases_mut()[i]
    }
}

/// Central finite differences of the masked MSE with respect to every
/// parameter, in `GradientSet::iter` order.
fn numeric_gradient(net: &Mlp, x: &[Vec<f64>], t: &[Vec<f64>], mask: Option<&[Vec<bool>]>, h: f64) -> Vec<f64> {
    let loss = |n: &Mlp| {
        let pred: Vec<Vec<f64>> = x.iter().map(|xi| n.forward(xi).unwrap()).collect();
        mse_loss(&pred, t, mask).unwrap()
    };
    let mut out = Vec::new();
    let mut probe = net.clone();
    for k in 0..net.layers().len() {
        for which in 0..2 {
            let len = if which == 0 {
                net.layers()[k].weights().len()
            } else {
                net.layers()[k].biases().len()
            };
            for i in 0..len {
                let orig = *param_mut(&mut probe, k, which, i);
                *param_mut(&mut probe, k, which, i) = orig + h;
                let up = loss(&probe);
                *param_mut(&mut probe, k, which, i) = orig - h;
                let down = loss(&probe);
                *param_mut(&mut probe, k, which, i) = orig;
                out.push((up - down) / (2.0 * h));
            }
        }
    }
    out
}

fn max_rel_error(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(1e-7))
        .fold(0.0, f64::max)
}

#[test]
fn init_shapes_and_determinism() {
    let net = Mlp::new(&[4, 8, 3], 1).unwrap();
    let shapes: Vec<_> = net.layers().iter().map(Layer::shape).collect();
    assert_eq!(shapes, vec![(4, 8), (8, 3)]);
    assert_eq!(net, Mlp::new(&[4, 8, 3], 1).unwrap());
    assert_ne!(net, Mlp::new(&[4, 8, 3], 2).unwrap());
    assert!(net.layers().iter().all(|l| l.biases().iter().all(|b| *b == 0.0)));
    let limit = (6.0f64 / 12.0).sqrt();
    assert!(net.layers()[0].weights().iter().all(|w| w.abs() <= limit));
    assert!(Mlp::new(&[4], 1).is_err());
    assert!(Mlp::new(&[4, 0, 3], 1).is_err());
}

#[test]
fn forward_zero_and_identity() {
    let zero = Mlp::zeros(&[3, 5, 2]).unwrap();
    assert_eq!(zero.forward(&[1.0, -2.0, 3.0]).unwrap(), vec![0.0, 0.0]);

    let mut id = Mlp::zeros(&[3, 3]).unwrap();
    set_layer(&mut id, 0, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0], &[0.0; 3]);
    assert_eq!(id.forward(&[1.5, -2.0, 7.0]).unwrap(), vec![1.5, -2.0, 7.0]);
    assert!(id.forward(&[1.0]).is_err());
}

#[test]
fn forward_hand_computed_1_2_1() {
    // h1 = relu(2x + 0.5), h2 = relu(-x + 1), y = 3 h1 - h2 + 0.25
    let mut net = Mlp::zeros(&[1, 2, 1]).unwrap();
    set_layer(&mut net, 0, &[2.0, -1.0], &[0.5, 1.0]);
    set_layer(&mut net, 1, &[3.0, -1.0], &[0.25]);
    // x = 0.3: h1 = 1.1, h2 = 0.7, y = 3.3 - 0.7 + 0.25 = 2.85
    assert!((net.forward(&[0.3]).unwrap()[0] - 2.85).abs() < 1e-12);
    // x = 2: h1 = 4.5, h2 = relu(-1) = 0, y = 13.75
    assert!((net.forward(&[2.0]).unwrap()[0] - 13.75).abs() < 1e-12);
}

#[test]
fn mse_examples() {
    let p = vec![vec![1.0, 2.0]];
    assert_eq!(mse_loss(&p, &p, None).unwrap(), 0.0);
    assert_eq!(mse_loss(&[vec![2.0]], &[vec![0.0]], None).unwrap(), 4.0);
    let mask = vec![vec![true, false]];
    assert_eq!(mse_loss(&[vec![1.0, 100.0]], &[vec![0.0, 0.0]], Some(&mask)).unwrap(), 1.0);
    let none = vec![vec![false, false]];
    assert!(matches!(
        mse_loss(&[vec![1.0, 1.0]], &[vec![0.0, 0.0]], Some(&none)),
        Err(Error::EmptySelection)
    ));
    assert!(mse_loss(&[vec![1.0]], &[vec![1.0, 2.0]], None).is_err());
}

#[test]
fn backward_zero_at_stationary_point() {
    let net = Mlp::new(&[4, 8, 3], 3).unwrap();
    let x = vec![vec![0.1, -0.2, 0.3, 0.4]];
    let t = vec![net.forward(&x[0]).unwrap()];
    let (loss, g) = net.backward(&x, &t, None).unwrap();
    assert_eq!(loss, 0.0);
    assert!(g.iter().all(|v| v == 0.0));
}

#[test]
fn backward_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let net = Mlp::with_rng(&[4, 8, 3], &mut rng).unwrap();
        let x = random_batch(&mut rng, 5, 4);
        let t = random_batch(&mut rng, 5, 3);
        let mask: Vec<Vec<bool>> = (0..5)
            .map(|_| {
                let a = rng.gen_range(0..3);
                (0..3).map(|j| j == a).collect()
            })
            .collect();
        for m in [None, Some(mask.as_slice())] {
            let (_, g) = net.backward(&x, &t, m).unwrap();
            let analytic: Vec<f64> = g.iter().collect();
            let numeric = numeric_gradient(&net, &x, &t, m, 1e-5);
            assert!(max_rel_error(&analytic, &numeric) < 1e-4);
        }
    }
}

#[test]
fn gradients_scale_with_residuals() {
    let net = Mlp::new(&[4, 8, 3], 5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let x = random_batch(&mut rng, 4, 4);
    let pred: Vec<Vec<f64>> = x.iter().map(|xi| net.forward(xi).unwrap()).collect();
    let resid = random_batch(&mut rng, 4, 3);
    let target = |k: f64| -> Vec<Vec<f64>> {
        pred.iter()
            .zip(&resid)
            .map(|(p, r)| p.iter().zip(r).map(|(a, b)| a - k * b).collect())
            .collect()
    };
    let (_, g1) = net.backward(&x, &target(1.0), None).unwrap();
    let (_, g2) = net.backward(&x, &target(2.0), None).unwrap();
    for (a, b) in g1.iter().zip(g2.iter()) {
        assert!((2.0 * a - b).abs() <= 1e-10 * (1.0 + b.abs()));
    }
}

#[test]
fn sgd_examples() {
    let mut net = Mlp::new(&[2, 3, 1], 0).unwrap();
    let before = net.clone();
    let (_, g) = net.backward(&[vec![0.5, 0.5]], &[vec![1.0]], None).unwrap();
    net.sgd_step(&g, 0.0).unwrap();
    assert_eq!(net, before);

    let mut one = Mlp::zeros(&[1, 1]).unwrap();
    set_layer(&mut one, 0, &[1.0], &[0.0]);
    let mut g = GradientSet::zeros_like(&one);
    g.layers[0].weights_mut()[0] = 2.0;
    one.sgd_step(&g, 0.1).unwrap();
    assert!((one.layers()[0].weight(0, 0) - 0.8).abs() < 1e-15);

    let other = Mlp::new(&[2, 2], 0).unwrap();
    assert!(one.sgd_step(&GradientSet::zeros_like(&other), 0.1).is_err());
}

#[test]
fn sgd_minimizes_convex_quadratic() {
    // f(w) = (w - 3)^2 realized as a 1-1 linear net: input 1, target 3, bias frozen at 0.
    let mut net = Mlp::zeros(&[1, 1]).unwrap();
    let mut iters = 0;
    loop {
        let (_, mut g) = net.backward(&[vec![1.0]], &[vec![3.0]], None).unwrap();
        g.layers[0].biases_mut()[0] = 0.0;
        net.sgd_step(&g, 0.01).unwrap();
        iters += 1;
        if (net.layers()[0].weight(0, 0) - 3.0).abs() < 1e-6 || iters == 10_000 {
            break;
        }
    }
    assert!((net.layers()[0].weight(0, 0) - 3.0).abs() < 1e-6);
    assert!(iters < 10_000);
}

#[test]
fn clone_is_independent() {
    let mut src = Mlp::new(&[3, 4, 2], 9).unwrap();
    let copy = src.clone();
    let x = [0.3, -0.1, 0.8];
    assert_eq!(src.forward(&x).unwrap(), copy.forward(&x).unwrap());
    let (_, g) = src.backward(&[x.to_vec()], &[vec![5.0, -5.0]], None).unwrap();
    src.sgd_step(&g, 0.1).unwrap();
    assert_ne!(src, copy);
    assert_eq!(copy, Mlp::new(&[3, 4, 2], 9).unwrap());
    assert_eq!(copy.clone().clone(), copy);
    let mut target = copy.clone();
    target.copy_from(&src);
    assert_eq!(target, src);
}

#[test]
fn from_layers_validates() {
    let net = Mlp::new(&[2, 3, 1], 4).unwrap();
    let rebuilt = Mlp::from_layers(net.layers().to_vec()).unwrap();
    assert_eq!(rebuilt, net);
    let bad = vec![Layer::zeros(2, 3), Layer::zeros(4, 1)];
    assert!(Mlp::from_layers(bad).is_err());
}

#[test]
fn dead_hidden_layer_blocks_signal() {
    let mut net = Mlp::new(&[2, 4, 2], 8).unwrap();
    let l = &mut net.layers_mut()[0];
    l.weights_mut().iter_mut().for_each(|w| *w = 0.0);
    l.biases_mut().iter_mut().for_each(|b| *b = -1.0);
    let a = net.forward(&[0.3, 0.9]).unwrap();
    let b = net.forward(&[-5.0, 2.0]).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, net.layers()[1].biases().to_vec());
}

proptest! {
    #[test]
    fn output_homogeneous_in_last_layer(seed in any::<u64>(), c in 0.1f64..10.0, x in prop::collection::vec(-1.0f64..1.0, 3)) {
        let net = Mlp::new(&[3, 5, 2], seed).unwrap();
        let mut scaled = net.clone();
        let last = scaled.layers().len() - 1;
        scaled.layers_mut()[last].weights_mut().iter_mut().for_each(|w| *w *= c);
        let y = net.forward(&x).unwrap();
        let ys = scaled.forward(&x).unwrap();
        for (a, b) in y.iter().zip(&ys) {
            prop_assert!((a * c - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }
}
