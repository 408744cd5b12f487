#![allow(dead_code)]

use emac::executor::{
    ce_grad, ce_loss, dpo_grad, dpo_loss, CandidateFeatures, Features, PolicyInput, PolicyParams, PreferencePair,
    FEATURE_DIM, MATCH_DIM, TEMPLATES,
};
use emac::planner::{
    full_vocabulary, plan_model_grad, plan_model_nll, Plan, PlanCondition, PlanModelParams,
};
use emac::world::{
    demo_bathroom, render_visual, FeedbackCode, ObjectKind, ReceptacleKind, SkillAction, TaskType,
};
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const FD_STEP: f64 = 1e-5;
pub const FD_TOL: f64 = 1e-5;

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-8)
}

pub fn random_input(rng: &mut ChaCha8Rng) -> PolicyInput {
    let n_feats = rng.random_range(5..60);
    let mut active: Vec<u32> = (0..n_feats).map(|_| rng.random_range(0..FEATURE_DIM as u32)).collect();
    active.sort_unstable();
    active.dedup();
    let n_cands = rng.random_range(2..12);
    let candidates = (0..n_cands)
        .map(|_| {
            let mut psi = [0.0; MATCH_DIM];
            for p in &mut psi {
                *p = f64::from(u8::from(rng.random_bool(0.4)));
            }
            CandidateFeatures { template: rng.random_range(0..TEMPLATES), psi }
        })
        .collect();
    PolicyInput { features: Features { active }, candidates }
}

/// Random values on every coordinate the input touches.
pub fn random_params(rng: &mut ChaCha8Rng, input: &PolicyInput) -> PolicyParams {
    let mut p = PolicyParams::zeros();
    for c in &input.candidates {
        for &f in &input.features.active {
            p.weights[f as usize * TEMPLATES + c.template] = rng.random_range(-0.5..0.5);
        }
        p.bias[c.template] = rng.random_range(-1.0..1.0);
    }
    for m in &mut p.match_weights {
        *m = rng.random_range(-2.0..2.0);
    }
    p
}

/// Coordinates (flat indices) the input touches.
pub fn touched(input: &PolicyInput) -> Vec<usize> {
    let w = FEATURE_DIM * TEMPLATES;
    let mut idx: Vec<usize> = Vec::new();
    for c in &input.candidates {
        idx.extend(input.features.active.iter().map(|&f| f as usize * TEMPLATES + c.template));
        idx.push(w + c.template);
    }
    idx.extend((0..MATCH_DIM).map(|m| w + TEMPLATES + m));
    idx.sort_unstable();
    idx.dedup();
    idx
}

/// A pair whose decision context is irrelevant to the objective; only the
/// input and the two indices matter.
pub fn random_pair(rng: &mut ChaCha8Rng) -> PreferencePair {
    let input = random_input(rng);
    let n = input.candidates.len();
    let expert = rng.random_range(0..n);
    let mut executed = rng.random_range(0..n);
    if executed == expert {
        executed = (executed + 1) % n;
    }
    let (world, task) = demo_bathroom();
    PreferencePair {
        task,
        obs: render_visual(&world),
        context: emac::executor::ExecContext::from_state(&world),
        candidates: Vec::new(),
        planned: None,
        executed,
        expert,
        input,
    }
}

/// Central-difference directional derivative of `f` at `theta` along a
/// random direction on `coords`, compared with `grad · v`.
pub fn directional_check(
    rng: &mut ChaCha8Rng,
    theta: &PolicyParams,
    grad: &PolicyParams,
    coords: &[usize],
    f: impl Fn(&PolicyParams) -> f64,
) -> f64 {
    let v: Vec<f64> = coords.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
    let shifted = |sign: f64| {
        let mut p = theta.clone();
        for (&i, vi) in coords.iter().zip(&v) {
            *p.get_mut(i) += sign * FD_STEP * vi;
        }
        f(&p)
    };
    let fd = (shifted(1.0) - shifted(-1.0)) / (2.0 * FD_STEP);
    let analytic: f64 = coords.iter().zip(&v).map(|(&i, vi)| grad.get(i) * vi).sum();
    rel_err(fd, analytic)
}

/// Worst relative error of the DPO gradient over `n` random pairs.
pub fn dpo_fd_worst(seed: u64, n: usize) -> f64 {
    let mut rng = emac::seed::rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let pair = random_pair(&mut rng);
        let theta = random_params(&mut rng, &pair.input);
        let reference = random_params(&mut rng, &pair.input);
        let beta = rng.random_range(0.05..2.0);
        let g = dpo_grad(&theta, &reference, std::slice::from_ref(&pair), beta);
        let coords = touched(&pair.input);
        worst = worst.max(directional_check(&mut rng, &theta, &g, &coords, |p| dpo_loss(p, &reference, &pair, beta)));
    }
    worst
}

pub fn ce_fd_worst(seed: u64, n: usize) -> f64 {
    let mut rng = emac::seed::rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let pair = random_pair(&mut rng);
        let theta = random_params(&mut rng, &pair.input);
        let g = ce_grad(&theta, std::slice::from_ref(&pair));
        let coords = touched(&pair.input);
        worst = worst.max(directional_check(&mut rng, &theta, &g, &coords, |p| ce_loss(p, &pair)));
    }
    worst
}

pub fn random_plan(rng: &mut ChaCha8Rng) -> (PlanCondition, Plan) {
    let len = rng.random_range(1..10);
    let steps = (0..len)
        .map(|_| {
            let r = format!("{} {}", ReceptacleKind::ALL.choose(rng).unwrap().name(), rng.random_range(1..4));
            let o = format!("{} {}", ObjectKind::ALL.choose(rng).unwrap().name(), rng.random_range(1..4));
            match rng.random_range(0..6) {
                0 => SkillAction::goto(&r),
                1 => SkillAction::open(&r),
                2 => SkillAction::take(&o, &r),
                3 => SkillAction::put(&o, &r),
                4 => SkillAction::heat(&o, &r),
                _ => SkillAction::use_object(&o),
            }
        })
        .collect();
    let trigger = if rng.random_bool(0.5) { Some(*FeedbackCode::ALL.choose(rng).unwrap()) } else { None };
    (PlanCondition { task_type: *TaskType::ALL.choose(rng).unwrap(), trigger }, Plan::new(steps))
}

pub fn plan_fd_worst(seed: u64, n: usize) -> f64 {
    let mut rng = emac::seed::rng(seed);
    let vocab = full_vocabulary();
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let (cond, plan) = random_plan(&mut rng);
        let mut params = PlanModelParams::zeros(vocab.clone());
        for w in &mut params.weights {
            *w = rng.random_range(-0.3..0.3);
        }
        let g = plan_model_grad(&params, &plan, &cond).unwrap();
        let v: Vec<f64> = g.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
        let shifted = |sign: f64| {
            let mut p = params.clone();
            for (w, vi) in p.weights.iter_mut().zip(&v) {
                *w += sign * FD_STEP * vi;
            }
            plan_model_nll(&p, &plan, &cond).unwrap()
        };
        let fd = (shifted(1.0) - shifted(-1.0)) / (2.0 * FD_STEP);
        let analytic: f64 = g.iter().zip(&v).map(|(a, b)| a * b).sum();
        worst = worst.max(rel_err(fd, analytic));
    }
    worst
}
