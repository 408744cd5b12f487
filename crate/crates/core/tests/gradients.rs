mod common;

use common::*;
use emac::executor::{dpo_loss, log_probs, softplus};
use rand::Rng;

#[test]
fn dpo_gradient_matches_central_differences() {
    let worst = dpo_fd_worst(1, 100);
    assert!(worst < FD_TOL, "worst relative error {worst:e}");
}

#[test]
fn ce_gradient_matches_central_differences() {
    let worst = ce_fd_worst(2, 100);
    assert!(worst < FD_TOL, "worst relative error {worst:e}");
}

#[test]
fn plan_model_gradient_matches_central_differences() {
    let worst = plan_fd_worst(3, 100);
    assert!(worst < FD_TOL, "worst relative error {worst:e}");
}

#[test]
fn dpo_loss_at_the_reference_is_ln_two() {
    let mut rng = emac::seed::rng(4);
    for _ in 0..100 {
        let pair = random_pair(&mut rng);
        let theta = random_params(&mut rng, &pair.input);
        let loss = dpo_loss(&theta, &theta, &pair, rng.random_range(0.01..5.0));
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-12);
    }
}

#[test]
fn dpo_loss_falls_as_the_expert_gains_probability() {
    let mut rng = emac::seed::rng(5);
    for _ in 0..50 {
        let pair = random_pair(&mut rng);
        let reference = random_params(&mut rng, &pair.input);
        let mut theta = reference.clone();
        let mut last = dpo_loss(&theta, &reference, &pair, 0.1);
        let t = pair.input.candidates[pair.expert].template;
        let u = pair.input.candidates[pair.executed].template;
        if t == u {
            continue;
        }
        for _ in 0..5 {
            theta.bias[t] += 0.5;
            let now = dpo_loss(&theta, &reference, &pair, 0.1);
            assert!(now < last);
            last = now;
        }
    }
}

#[test]
fn softplus_is_stable_at_extremes() {
    assert_eq!(softplus(-800.0), 0.0);
    assert_eq!(softplus(800.0), 800.0);
    assert!((softplus(0.0) - std::f64::consts::LN_2).abs() < 1e-15);
}

#[test]
fn log_probs_normalise_and_ignore_shifts() {
    let mut rng = emac::seed::rng(6);
    for _ in 0..50 {
        let input = random_input(&mut rng);
        let mut theta = random_params(&mut rng, &input);
        let lp = log_probs(&theta, &input);
        let total: f64 = lp.iter().map(|l| l.exp()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for b in &mut theta.bias {
            *b += 3.25;
        }
        for (a, b) in lp.iter().zip(log_probs(&theta, &input)) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
