//! Linear-softmax autoregressive model over plan-step tokens.
//!
//! A token is the verb plus the kind of its primary argument, e.g.
//! `take spraybottle` or `put in/on toilet`. The context of step i is the
//! task type, the feedback code that triggered the plan, the relative
//! position i/30, the previous token (or BOS) and a bias.

use serde::{Deserialize, Serialize};

use super::plan::{PlanContext, Plan};
use super::PlannerError;
use crate::world::{FeedbackCode, ObjectKind, ReceptacleKind, SkillAction, TaskType, Verb};

const POSITION_SCALE: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanCondition {
    pub task_type: TaskType,
    /// Feedback code that triggered this plan; `None` for an initial plan.
    pub trigger: Option<FeedbackCode>,
}

impl PlanCondition {
    pub fn from_context(ctx: &PlanContext) -> Self {
        PlanCondition {
            task_type: ctx.task.task_type,
            trigger: ctx.text_history.last().map(|h| h.feedback.code).filter(|c| *c != FeedbackCode::Ok),
        }
    }
}

/// Token for a step: verb plus the kind of its primary argument.
pub fn step_token(action: &SkillAction) -> String {
    let kind = |id: Option<&str>| id.and_then(|s| s.split_whitespace().next()).unwrap_or("").to_string();
    match action.verb {
        Verb::Goto => format!("go to {}", kind(action.receptacle_arg())),
        Verb::Open => format!("open {}", kind(action.receptacle_arg())),
        Verb::Close => format!("close {}", kind(action.receptacle_arg())),
        Verb::Put => format!("put in/on {}", kind(action.receptacle_arg())),
        v => format!("{} {}", v.name(), kind(action.object_arg())),
    }
}

/// Every token the action grammar can produce.
pub fn full_vocabulary() -> Vec<String> {
    let mut v = Vec::new();
    for verb in ["go to", "open", "close", "put in/on"] {
        for k in ReceptacleKind::ALL {
            v.push(format!("{verb} {}", k.name()));
        }
    }
    for verb in ["take", "heat", "cool", "clean", "use"] {
        for k in ObjectKind::ALL {
            v.push(format!("{verb} {}", k.name()));
        }
    }
    v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanModelParams {
    pub vocabulary: Vec<String>,
    /// Row-major `vocabulary.len() × feature_dim()`.
    pub weights: Vec<f64>,
}

impl Default for PlanModelParams {
    fn default() -> Self {
        Self::zeros(full_vocabulary())
    }
}

impl PlanModelParams {
    pub fn zeros(vocabulary: Vec<String>) -> Self {
        let dim = feature_dim(vocabulary.len());
        PlanModelParams { weights: vec![0.0; vocabulary.len() * dim], vocabulary }
    }

    pub fn dim(&self) -> usize {
        feature_dim(self.vocabulary.len())
    }

    fn token_id(&self, token: &str) -> Result<usize, PlannerError> {
        self.vocabulary
            .iter()
            .position(|t| t == token)
            .ok_or_else(|| PlannerError::OutOfVocabulary(token.to_string()))
    }

    pub fn encode(&self, plan: &Plan) -> Result<Vec<usize>, PlannerError> {
        plan.steps.iter().map(|s| self.token_id(&step_token(s))).collect()
    }
}

/// task one-hot (6) + trigger one-hot (none + 7 codes) + position + bias +
/// previous token one-hot (V + BOS).
pub fn feature_dim(vocab: usize) -> usize {
    6 + 8 + 1 + 1 + vocab + 1
}

/// Sparse (index, value) features for step `i` whose predecessor is `prev`.
fn features(cond: &PlanCondition, i: usize, prev: Option<usize>, vocab: usize) -> [(usize, f64); 5] {
    let trig = cond.trigger.map_or(0, |c| 1 + c.index());
    [
        (cond.task_type.index(), 1.0),
        (6 + trig, 1.0),
        (14, i as f64 / POSITION_SCALE),
        (15, 1.0),
        (16 + prev.map_or(vocab, |p| p), 1.0),
    ]
}

fn step_logits(params: &PlanModelParams, feats: &[(usize, f64)], out: &mut [f64]) {
    let dim = params.dim();
    for (v, o) in out.iter_mut().enumerate() {
        let row = &params.weights[v * dim..(v + 1) * dim];
        *o = feats.iter().map(|&(f, x)| row[f] * x).sum();
    }
}

fn log_softmax_in_place(z: &mut [f64]) {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = m + z.iter().map(|x| (x - m).exp()).sum::<f64>().ln();
    for x in z.iter_mut() {
        *x -= lse;
    }
}

/// Negative log-likelihood of a tokenised plan, optionally accumulating the
/// gradient (scaled by `scale`) into `grad`.
fn nll_tokens(params: &PlanModelParams, tokens: &[usize], cond: &PlanCondition, mut grad: Option<(&mut [f64], f64)>) -> f64 {
    let v = params.vocabulary.len();
    let dim = params.dim();
    let mut z = vec![0.0; v];
    let mut total = 0.0;
    let mut prev = None;
    for (i, &y) in tokens.iter().enumerate() {
        let feats = features(cond, i, prev, v);
        step_logits(params, &feats, &mut z);
        log_softmax_in_place(&mut z);
        total -= z[y];
        if let Some((g, scale)) = grad.as_mut() {
            for (k, lp) in z.iter().enumerate() {
                let coef = (lp.exp() - f64::from(u8::from(k == y))) * *scale;
                if coef == 0.0 {
                    continue;
                }
                for &(f, x) in &feats {
                    g[k * dim + f] += coef * x;
                }
            }
        }
        prev = Some(y);
    }
    total
}

/// Sum over steps of −log P(step | context).
pub fn plan_model_nll(params: &PlanModelParams, plan: &Plan, cond: &PlanCondition) -> Result<f64, PlannerError> {
    let tokens = params.encode(plan)?;
    Ok(nll_tokens(params, &tokens, cond, None))
}

/// Gradient of [`plan_model_nll`] with respect to the weights.
pub fn plan_model_grad(params: &PlanModelParams, plan: &Plan, cond: &PlanCondition) -> Result<Vec<f64>, PlannerError> {
    let tokens = params.encode(plan)?;
    let mut g = vec![0.0; params.weights.len()];
    nll_tokens(params, &tokens, cond, Some((&mut g, 1.0)));
    Ok(g)
}

pub type PlanCorpus = Vec<(PlanCondition, Plan)>;

/// Mean NLL over a corpus.
pub fn corpus_nll(params: &PlanModelParams, corpus: &[(PlanCondition, Plan)]) -> Result<f64, PlannerError> {
    if corpus.is_empty() {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for (cond, plan) in corpus {
        total += plan_model_nll(params, plan, cond)?;
    }
    Ok(total / corpus.len() as f64)
}

/// Full-batch gradient descent on the mean corpus NLL. Returns the updated
/// parameters and the loss before each epoch.
pub fn finetune_plan_model(
    params: &PlanModelParams,
    corpus: &[(PlanCondition, Plan)],
    epochs: usize,
    lr: f64,
) -> Result<(PlanModelParams, Vec<f64>), PlannerError> {
    let mut p = params.clone();
    let encoded: Vec<(PlanCondition, Vec<usize>)> =
        corpus.iter().map(|(c, plan)| Ok((*c, p.encode(plan)?))).collect::<Result<_, PlannerError>>()?;
    let mut history = Vec::with_capacity(epochs);
    if encoded.is_empty() {
        return Ok((p, history));
    }
    let scale = 1.0 / encoded.len() as f64;
    let mut grad = vec![0.0; p.weights.len()];
    for _ in 0..epochs {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut loss = 0.0;
        for (cond, tokens) in &encoded {
            loss += nll_tokens(&p, tokens, cond, Some((&mut grad, scale)));
        }
        history.push(loss * scale);
        for (w, g) in p.weights.iter_mut().zip(&grad) {
            *w -= lr * g;
        }
    }
    Ok((p, history))
}
