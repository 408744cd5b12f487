use rand::Rng;
use serde::{Deserialize, Serialize};

use super::features::{Candidate, PolicyInput, FEATURE_DIM, MATCH_DIM, TEMPLATES};
use crate::world::SkillAction;

/// Linear scorer: template weights over raster features, a per-template
/// bias and weights on the plan-conditioning features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyParams {
    /// Row-major `FEATURE_DIM × TEMPLATES`.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub match_weights: Vec<f64>,
}

impl Default for PolicyParams {
    fn default() -> Self {
        Self::zeros()
    }
}

impl PolicyParams {
    pub fn zeros() -> Self {
        PolicyParams {
            weights: vec![0.0; FEATURE_DIM * TEMPLATES],
            bias: vec![0.0; TEMPLATES],
            match_weights: vec![0.0; MATCH_DIM],
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len() + self.bias.len() + self.match_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat view index: weights, then bias, then match weights.
    pub fn get(&self, i: usize) -> f64 {
        let (w, b) = (self.weights.len(), self.bias.len());
        if i < w {
            self.weights[i]
        } else if i < w + b {
            self.bias[i - w]
        } else {
            self.match_weights[i - w - b]
        }
    }

    pub fn get_mut(&mut self, i: usize) -> &mut f64 {
        let (w, b) = (self.weights.len(), self.bias.len());
        if i < w {
            &mut self.weights[i]
        } else if i < w + b {
            &mut self.bias[i - w]
        } else {
            &mut self.match_weights[i - w - b]
        }
    }

    /// `self += scale * other`.
    pub fn axpy(&mut self, scale: f64, other: &PolicyParams) {
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            *a += scale * b;
        }
        for (a, b) in self.bias.iter_mut().zip(&other.bias) {
            *a += scale * b;
        }
        for (a, b) in self.match_weights.iter_mut().zip(&other.match_weights) {
            *a += scale * b;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().chain(&self.bias).chain(&self.match_weights).all(|x| x.is_finite())
    }
}

pub fn logits(params: &PolicyParams, input: &PolicyInput) -> Vec<f64> {
    input
        .candidates
        .iter()
        .map(|c| {
            let mut z = params.bias[c.template];
            for &f in &input.features.active {
                z += params.weights[f as usize * TEMPLATES + c.template];
            }
            for (m, x) in params.match_weights.iter().zip(&c.psi) {
                z += m * x;
            }
            z
        })
        .collect()
}

pub fn log_softmax(z: &[f64]) -> Vec<f64> {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = m + z.iter().map(|x| (x - m).exp()).sum::<f64>().ln();
    z.iter().map(|x| x - lse).collect()
}

pub fn log_probs(params: &PolicyParams, input: &PolicyInput) -> Vec<f64> {
    log_softmax(&logits(params, input))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionDistribution {
    pub actions: Vec<SkillAction>,
    pub probs: Vec<f64>,
}

impl ActionDistribution {
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, p) in self.probs.iter().enumerate() {
            if *p > self.probs[best] {
                best = i;
            }
        }
        best
    }
}

/// Softmax over the candidates only; non-candidates never enter the sum.
pub fn policy_dist(params: &PolicyParams, input: &PolicyInput, candidates: &[Candidate]) -> ActionDistribution {
    assert!(!candidates.is_empty(), "candidate set must be non-empty");
    let probs = log_probs(params, input).into_iter().map(f64::exp).collect();
    ActionDistribution { actions: candidates.iter().map(|c| c.action.clone()).collect(), probs }
}

/// Samples an index from softmax(z / temperature).
pub fn sample_index(z: &[f64], temperature: f64, rng: &mut impl Rng) -> usize {
    let scaled: Vec<f64> = z.iter().map(|x| x / temperature).collect();
    let p: Vec<f64> = log_softmax(&scaled).into_iter().map(f64::exp).collect();
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, pi) in p.iter().enumerate() {
        acc += pi;
        if u < acc {
            return i;
        }
    }
    p.len() - 1
}

/// Adds `scale · ∂logit(c)/∂θ` into `grad`.
pub fn add_logit_grad(grad: &mut PolicyParams, input: &PolicyInput, c: usize, scale: f64) {
    let cand = &input.candidates[c];
    for &f in &input.features.active {
        grad.weights[f as usize * TEMPLATES + cand.template] += scale;
    }
    grad.bias[cand.template] += scale;
    for (g, x) in grad.match_weights.iter_mut().zip(&cand.psi) {
        *g += scale * x;
    }
}

/// Adds `scale · ∇ log π(a)` into `grad`.
pub fn add_log_prob_grad(grad: &mut PolicyParams, params: &PolicyParams, input: &PolicyInput, a: usize, scale: f64) {
    let lp = log_probs(params, input);
    add_logit_grad(grad, input, a, scale);
    for (c, l) in lp.iter().enumerate() {
        add_logit_grad(grad, input, c, -scale * l.exp());
    }
}
