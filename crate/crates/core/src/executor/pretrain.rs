use super::features::PolicyInput;
use super::policy::{add_log_prob_grad, log_probs, PolicyParams};

/// A demonstration step: the policy input and the expert's candidate index.
pub type Demo = (PolicyInput, usize);

/// Behaviour cloning by full-batch gradient descent on the mean
/// cross-entropy of the expert action. Zero epochs return the uniform policy.
pub fn bc_pretrain(demos: &[Demo], epochs: usize, lr: f64) -> PolicyParams {
    let mut params = PolicyParams::zeros();
    if demos.is_empty() {
        return params;
    }
    let scale = -1.0 / demos.len() as f64;
    for _ in 0..epochs {
        let mut grad = PolicyParams::zeros();
        for (input, expert) in demos {
            add_log_prob_grad(&mut grad, &params, input, *expert, scale);
        }
        params.axpy(-lr, &grad);
    }
    params
}

/// Mean cross-entropy of the expert actions.
pub fn demo_loss(params: &PolicyParams, demos: &[Demo]) -> f64 {
    demos.iter().map(|(input, e)| -log_probs(params, input)[*e]).sum::<f64>() / demos.len().max(1) as f64
}

/// Fraction of demos where the expert action has the highest probability.
pub fn demo_accuracy(params: &PolicyParams, demos: &[Demo]) -> f64 {
    let hits = demos
        .iter()
        .filter(|(input, e)| {
            let lp = log_probs(params, input);
            lp.iter().enumerate().all(|(i, l)| i == *e || *l < lp[*e])
        })
        .count();
    hits as f64 / demos.len().max(1) as f64
}
