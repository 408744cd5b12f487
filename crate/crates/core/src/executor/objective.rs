use serde::{Deserialize, Serialize};

use super::features::{Candidate, ExecContext, PolicyInput};
use super::policy::{add_log_prob_grad, add_logit_grad, log_probs, PolicyParams};
use crate::world::{SkillAction, TaskSpec, VisualObs};

pub const DEFAULT_BETA: f64 = 0.1;

/// One aggregated decision: what the policy did and what the expert wanted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferencePair {
    pub task: TaskSpec,
    pub obs: VisualObs,
    pub context: ExecContext,
    pub candidates: Vec<Candidate>,
    pub planned: Option<usize>,
    pub executed: usize,
    pub expert: usize,
    pub input: PolicyInput,
}

impl PreferencePair {
    pub fn executed_action(&self) -> &SkillAction {
        &self.candidates[self.executed].action
    }

    pub fn expert_action(&self) -> &SkillAction {
        &self.candidates[self.expert].action
    }

    pub fn degenerate(&self) -> bool {
        self.executed == self.expert
    }
}

/// ln(1 + e^x) without overflow.
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Log-ratio margin Δ between the expert and the executed action.
pub fn dpo_margin(theta: &PolicyParams, reference: &PolicyParams, input: &PolicyInput, expert: usize, executed: usize) -> f64 {
    let lt = log_probs(theta, input);
    let lr = log_probs(reference, input);
    (lt[expert] - lr[expert]) - (lt[executed] - lr[executed])
}

/// −log σ(βΔ).
pub fn dpo_loss(theta: &PolicyParams, reference: &PolicyParams, pair: &PreferencePair, beta: f64) -> f64 {
    softplus(-beta * dpo_margin(theta, reference, &pair.input, pair.expert, pair.executed))
}

/// Mean DPO gradient over a batch. The softmax normaliser cancels between
/// the two log-probabilities, leaving only the two logit gradients.
pub fn dpo_grad(theta: &PolicyParams, reference: &PolicyParams, batch: &[PreferencePair], beta: f64) -> PolicyParams {
    let mut grad = PolicyParams::zeros();
    accumulate_dpo_grad(&mut grad, theta, reference, batch, beta);
    grad
}

/// Adds the mean DPO gradient into `grad` and returns the mean loss.
pub fn accumulate_dpo_grad(grad: &mut PolicyParams, theta: &PolicyParams, reference: &PolicyParams, batch: &[PreferencePair], beta: f64) -> f64 {
    assert!(!batch.is_empty(), "batch must be non-empty");
    let n = batch.len() as f64;
    let mut loss = 0.0;
    for pair in batch {
        let delta = dpo_margin(theta, reference, &pair.input, pair.expert, pair.executed);
        loss += softplus(-beta * delta);
        let coef = -beta * sigmoid(-beta * delta) / n;
        if pair.expert != pair.executed {
            add_logit_grad(grad, &pair.input, pair.expert, coef);
            add_logit_grad(grad, &pair.input, pair.executed, -coef);
        }
    }
    loss / n
}

/// −log π_θ(expert).
pub fn ce_loss(theta: &PolicyParams, pair: &PreferencePair) -> f64 {
    -log_probs(theta, &pair.input)[pair.expert]
}

pub fn ce_grad(theta: &PolicyParams, batch: &[PreferencePair]) -> PolicyParams {
    let mut grad = PolicyParams::zeros();
    accumulate_ce_grad(&mut grad, theta, batch);
    grad
}

pub fn accumulate_ce_grad(grad: &mut PolicyParams, theta: &PolicyParams, batch: &[PreferencePair]) -> f64 {
    assert!(!batch.is_empty(), "batch must be non-empty");
    let n = batch.len() as f64;
    let mut loss = 0.0;
    for pair in batch {
        loss += ce_loss(theta, pair);
        add_log_prob_grad(grad, theta, &pair.input, pair.expert, -1.0 / n);
    }
    loss / n
}
