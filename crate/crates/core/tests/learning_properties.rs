use dta::datagen::{gaussian_weights, poisson_pattern_with, poisson_train};
use dta::learning::{
    decoding_step, encoding_step, find_theta_star, match_spikes, theta_scan, train_decoding,
    DecodingProblem, Direction, DtaConfig,
};
use dta::neuron::{
    dynamic_theta_left, membrane_v0, simulate, InputPattern, NeuronParams, SpikeTrain, WeightVector,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Case {
    params: NeuronParams,
    w: WeightVector,
    x: InputPattern,
    y: SpikeTrain,
}

fn case(seed: u64, n: usize, duration: f64) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = poisson_pattern_with(n, duration, 0.005, &mut rng).unwrap();
    let y = poisson_train(duration, 0.005, &mut rng);
    let w = gaussian_weights(n, 0.02, 0.02, &mut rng);
    Case {
        params: NeuronParams::new(n),
        w,
        x,
        y,
    }
}

#[test]
fn feasible_steps_meet_their_constraints() {
    let cfg = DtaConfig::default();
    let mut feasible = 0;
    for seed in 0..60 {
        let Case { params, w, x, y } = case(seed, 100, 200.0);
        let o = simulate(&params, &w, &x, None).unwrap();
        let stray = match_spikes(&o, &y, cfg.match_tol).unmatched_actual;
        let step = encoding_step(&params, &w, &x, &y, &cfg).unwrap();
        if !step.updated || step.used_fallback {
            continue;
        }
        feasible += 1;
        let tol = 1e-6 * params.threshold();
        for t in y.iter() {
            let gap = membrane_v0(&params, &step.weights, &x, t) - dynamic_theta_left(&params, &y, t);
            assert!(gap.abs() <= tol, "seed {seed}, t {t}: {gap}");
        }
        for t in stray.iter() {
            let v = membrane_v0(&params, &step.weights, &x, t);
            let bound = dynamic_theta_left(&params, &y, t) - cfg.margin(&params) + tol;
            assert!(v <= bound, "seed {seed}, t {t}: {v} > {bound}");
        }
    }
    assert!(feasible >= 20, "only {feasible} feasible steps");
}

#[test]
fn theta_star_moves_the_count_by_one() {
    for seed in 0..40 {
        let Case { params, w, x, .. } = case(1000 + seed, 100, 200.0);
        let w: Vec<f64> = w.iter().map(|v| v * 4.0).collect();
        let c = simulate(&params, &w, &x, None).unwrap().len();
        let mut dirs = vec![(Direction::MoreSpikes, c + 1)];
        if c > 0 {
            dirs.push((Direction::FewerSpikes, c - 1));
        }
        for (dir, target) in dirs {
            match find_theta_star(&params, &w, &x, dir) {
                Ok(th) => {
                    assert_eq!(simulate(&params, &w, &x, Some(th)).unwrap().len(), target);
                    let above = th > params.threshold();
                    assert_eq!(above, dir == Direction::FewerSpikes);
                }
                Err(_) => {
                    // the scan is the documented way out; it must not error
                    let scan = theta_scan(&params, &w, &x, target).unwrap();
                    if let Some(th) = scan {
                        assert_eq!(simulate(&params, &w, &x, Some(th)).unwrap().len(), target);
                    }
                }
            }
        }
    }
}

#[test]
fn one_decoding_step_changes_the_count_by_one() {
    let cfg = DtaConfig::default();
    let (mut feasible, mut exact) = (0, 0);
    for seed in 0..100 {
        let Case { params, w, x, .. } = case(5000 + seed, 100, 200.0);
        let c = simulate(&params, &w, &x, None).unwrap().len();
        let label = if seed % 2 == 0 { c + 2 } else { c.saturating_sub(1) };
        if label == c {
            continue;
        }
        let r = decoding_step(&params, &w, &x, label, &cfg).unwrap();
        if !r.updated || r.used_fallback {
            continue;
        }
        feasible += 1;
        let after = simulate(&params, &r.weights, &x, None).unwrap().len();
        let want = if label > c { c + 1 } else { c - 1 };
        exact += usize::from(after == want);
    }
    let rate = exact as f64 / feasible as f64;
    assert!(feasible >= 40, "only {feasible} feasible steps");
    assert!(rate >= 0.95, "{exact}/{feasible}");
}

#[test]
fn decoding_training_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let n = 200;
    let patterns: Vec<_> = (0..6)
        .map(|_| poisson_pattern_with(n, 50.0, 0.005, &mut rng).unwrap())
        .collect();
    let labels = vec![1, 2, 3, 1, 2, 3];
    let w0 = gaussian_weights(n, 0.01, 0.01, &mut rng);
    let problem = DecodingProblem::new(patterns, labels).unwrap();
    let params = NeuronParams::new(n);
    let cfg = DtaConfig {
        max_epochs: 30,
        ..DtaConfig::default()
    };
    let a = train_decoding(&problem, &params, &w0, &cfg, 3).unwrap();
    let b = train_decoding(&problem, &params, &w0, &cfg, 3).unwrap();
    assert_eq!(a, b);
    assert!(a.converged, "{:?}", a.accuracy_per_epoch);
}
