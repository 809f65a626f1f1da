use alphagan_core::nn::{
    sgd_step, Activation, AdamState, Matrix, MlpNetwork, Optimizer, SeededRng,
};

const ACTS: [Activation; 3] = [Activation::ReLU, Activation::Sigmoid, Activation::Identity];

fn random_net(rng: &mut SeededRng) -> MlpNetwork {
    let depth = 1 + rng.below(3);
    let mut sizes = vec![1 + rng.below(6)];
    let mut acts = Vec::new();
    for _ in 0..depth {
        sizes.push(1 + rng.below(16));
        acts.push(ACTS[rng.below(3)]);
    }
    let mut net = MlpNetwork::new(&sizes, &acts, rng).unwrap();
    // Fresh layers have zero biases; a dead ReLU layer upstream would then pin
    // pre-activations exactly on the kink, where differences are meaningless.
    let params: Vec<f64> = (0..net.parameter_count())
        .map(|_| rng.normal(0.0, 0.7))
        .collect();
    net.set_flat_parameters(&params).unwrap();
    net
}

/// Straight-line evaluation from the raw parameter arrays.
fn naive_forward(net: &MlpNetwork, x: &Matrix) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = (0..x.rows()).map(|r| x.row(r).to_vec()).collect();
    for layer in net.layers() {
        let w = layer.weights();
        rows = rows
            .iter()
            .map(|v| {
                (0..layer.outputs())
                    .map(|o| {
                        let mut z = layer.biases()[o];
                        for (i, vi) in v.iter().enumerate().take(layer.inputs()) {
                            z += w.get(o, i) * vi;
                        }
                        match layer.activation() {
                            Activation::ReLU => z.max(0.0),
                            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
                            Activation::Identity => z,
                        }
                    })
                    .collect()
            })
            .collect();
    }
    rows
}

fn weighted_sum(out: &Matrix, c: &Matrix) -> f64 {
    out.data().iter().zip(c.data()).map(|(a, b)| a * b).sum()
}

#[test]
fn forward_matches_naive_evaluation() {
    for seed in 0..20 {
        let mut rng = SeededRng::new(seed);
        let mut net = random_net(&mut rng);
        let x = rng.normal_matrix(7, net.input_width());
        let out = net.forward(&x).unwrap();
        let oracle = naive_forward(&net, &x);
        for (r, row) in oracle.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                assert!((out.get(r, c) - v).abs() <= 1e-12 * (1.0 + v.abs()));
            }
        }
    }
}

#[test]
fn backprop_matches_central_differences() {
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for seed in 0..30 {
        let mut rng = SeededRng::new(100 + seed);
        let mut net = random_net(&mut rng);
        let x = rng.normal_matrix(5, net.input_width());
        let c = rng.normal_matrix(5, net.output_width());
        net.forward(&x).unwrap();
        net.backward(&c).unwrap();
        let analytic = net.flat_gradients();
        let params = net.flat_parameters();
        for k in 0..params.len() {
            let mut p = params.clone();
            p[k] += h;
            net.set_flat_parameters(&p).unwrap();
            let up = weighted_sum(&net.forward(&x).unwrap(), &c);
            p[k] -= 2.0 * h;
            net.set_flat_parameters(&p).unwrap();
            let down = weighted_sum(&net.forward(&x).unwrap(), &c);
            let numeric = (up - down) / (2.0 * h);
            // Relative error with a 1e-6 floor so exactly-zero gradients compare sanely.
            let rel =
                (analytic[k] - numeric).abs() / analytic[k].abs().max(numeric.abs()).max(1e-6);
            worst = worst.max(rel);
        }
    }
    assert!(worst < 1e-4, "max relative error {worst}");
}

#[test]
fn sigmoid_output_strictly_inside_unit_interval() {
    let mut rng = SeededRng::new(3);
    let mut net = MlpNetwork::new(
        &[2, 8, 1],
        &[Activation::ReLU, Activation::Sigmoid],
        &mut rng,
    )
    .unwrap();
    let x = rng.normal_matrix(200, 2).map(|v| 50.0 * v);
    assert!(net
        .forward(&x)
        .unwrap()
        .data()
        .iter()
        .all(|&d| d > 0.0 && d < 1.0));
}

#[test]
fn single_adam_step_matches_hand_formula() {
    let (lr, b1, b2, eps) = (0.01, 0.5, 0.999, 1e-8);
    let mut adam = AdamState::new(lr, b1, b2, eps);
    let grads = [0.3, -2.0, 0.0];
    let mut params = [1.0, 1.0, 1.0];
    adam.begin_step();
    adam.update_slot(0, &mut params, &grads).unwrap();
    for (p, g) in params.iter().zip(grads) {
        // m̂ = g, v̂ = g² after bias correction of the first step.
        let expected = 1.0 - lr * g / (g.abs() + eps);
        assert!((p - expected).abs() < 1e-15, "{p} vs {expected}");
    }
}

#[test]
fn sgd_is_linear_in_gradients() {
    let (g1, g2) = ([0.5, -1.0], [2.0, 0.25]);
    let mut twice = [1.0, 2.0];
    sgd_step(&mut twice, &g1, 0.1);
    sgd_step(&mut twice, &g2, 0.1);
    let summed: Vec<f64> = g1.iter().zip(g2).map(|(a, b)| a + b).collect();
    let mut once = [1.0, 2.0];
    sgd_step(&mut once, &summed, 0.1);
    for (a, b) in twice.iter().zip(once) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn identical_seeds_give_identical_trajectories() {
    let run = || {
        let mut rng = SeededRng::new(77);
        let mut net = MlpNetwork::new(
            &[3, 16, 1],
            &[Activation::ReLU, Activation::Sigmoid],
            &mut rng,
        )
        .unwrap();
        let mut opt = Optimizer::adam(1e-3, 0.5, 0.999);
        let mut trace = Vec::new();
        for _ in 0..20 {
            let x = rng.normal_matrix(8, 3);
            let out = net.forward(&x).unwrap();
            net.backward(&out.map(|d| d - 0.5)).unwrap();
            opt.step(&mut net).unwrap();
            trace.extend(net.flat_parameters());
        }
        trace
    };
    let (a, b) = (run(), run());
    assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
}
