use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::aggregate::aggregate;
use super::config::{Channel, LossMode, NoiseSpec, TrainerConfig};
use super::episode::{run_episode, Behavior, EpisodeOptions, TaskInstance, Trajectory};
use crate::executor::{
    add_logit_grad, bc_pretrain, candidate_set, log_probs, sigmoid, softplus, Demo, ExecContext, PolicyInput,
    PolicyParams, PreferencePair,
};
use crate::planner::{
    corpus_nll, finetune_plan_model, oracle_action, ErrorTally, MemoryPool, PlanCorpus, PlanModelParams,
    PlannerBackend,
};
use crate::seed::{derive_seed, hash_str, rng};
use crate::world::{check_success, generate_task, render_visual, step_skill, valid_actions, TaskType};

const SHUFFLE_TAG: u64 = 0x5348;
const DEMO_TAG: u64 = 0xBC;
const TRAIN_NOISE_TAG: u64 = 0x4E;

/// Per-trial numbers for one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub trial: usize,
    pub sampled_success: Vec<bool>,
    pub greedy_success: Vec<bool>,
    pub greedy_steps: Vec<u32>,
    pub sampled_rate: f64,
    pub greedy_rate: f64,
    /// Mean greedy steps over successful episodes.
    pub avg_steps: f64,
    pub dataset_size: usize,
    pub trained_pairs: usize,
    pub epoch_losses: Vec<f64>,
    pub train_loss: f64,
    pub plan_nll: Option<f64>,
    pub planner_errors: ErrorTally,
    /// Planner errors in the training rollouts.
    pub planner_errors_seen: u32,
    /// Planner errors in the greedy held-out rollouts.
    pub planner_errors_ood: u32,
    pub heldout_success: Vec<bool>,
    pub heldout_rate: Option<f64>,
}

/// One line of the persisted trajectory log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryLine {
    pub trial: usize,
    pub task_id: String,
    pub step: usize,
    pub action: String,
    pub planned: Option<String>,
    pub expert: Option<String>,
    pub outcome: String,
    pub feedback: String,
    pub episode_success: bool,
}

/// Everything needed to resume a run after any completed trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunState {
    pub config: TrainerConfig,
    pub next_trial: usize,
    pub finished: bool,
    pub theta: PolicyParams,
    pub reference: PolicyParams,
    pub dataset: Vec<PreferencePair>,
    pub corpus: PlanCorpus,
    pub plan_model: PlanModelParams,
    pub memories: BTreeMap<String, MemoryPool>,
    pub reports: Vec<TrialReport>,
}

impl RunState {
    pub fn new(config: TrainerConfig) -> Self {
        let reference = pretrain_reference(&config);
        RunState {
            next_trial: 0,
            finished: config.max_trials == 0,
            theta: reference.clone(),
            reference,
            dataset: Vec::new(),
            corpus: Vec::new(),
            plan_model: PlanModelParams::default(),
            memories: BTreeMap::new(),
            reports: Vec::new(),
            config,
        }
    }

    pub fn memory_for(&self, task_id: &str) -> MemoryPool {
        self.memories.get(task_id).cloned().unwrap_or_else(|| MemoryPool::new(self.config.memory_cap))
    }
}

/// Expert demonstrations on tasks drawn from their own seed range.
pub fn reference_demos(config: &TrainerConfig) -> Vec<Demo> {
    let mut demos = Vec::new();
    for i in 0..config.bc_tasks {
        let task_type = TaskType::ALL[i % TaskType::ALL.len()];
        let seed = derive_seed(&[config.master_seed, DEMO_TAG, i as u64]);
        let Ok((mut state, task)) = generate_task(seed, task_type, false) else { continue };
        state.horizon = config.horizon;
        while !check_success(&state, &task) && state.step_count < state.horizon {
            let Some(expert) = oracle_action(&state, &task) else { break };
            let valid = valid_actions(&state);
            let (candidates, planned) = candidate_set(&state, &valid, Some(&expert));
            let visual = render_visual(&state);
            let ctx = ExecContext::from_state(&state);
            let input = PolicyInput::build(&visual, &task, &ctx, &candidates, planned.map(|i| &candidates[i]));
            demos.push((input, planned.expect("expert is a candidate")));
            let Ok((next, _, _)) = step_skill(&state, &expert) else { break };
            state = next;
        }
    }
    demos
}

pub fn pretrain_reference(config: &TrainerConfig) -> PolicyParams {
    bc_pretrain(&reference_demos(config), config.bc_epochs, config.bc_lr)
}

/// Minibatch gradient descent over `dataset`. DPO trains on the pairs where
/// the executed action differs from the expert's; CE trains on every pair.
/// Returns the updated parameters and the mean loss of each epoch.
pub fn train_policy(
    dataset: &[PreferencePair],
    theta: &PolicyParams,
    reference: &PolicyParams,
    config: &TrainerConfig,
    seed: u64,
) -> (PolicyParams, Vec<f64>, usize) {
    let used: Vec<&PreferencePair> = match config.loss_mode {
        LossMode::Dpo => dataset.iter().filter(|p| !p.degenerate()).collect(),
        LossMode::Ce => dataset.iter().collect(),
    };
    let mut theta = theta.clone();
    let mut losses = Vec::with_capacity(config.epochs_per_trial);
    if used.is_empty() {
        return (theta, losses, 0);
    }
    let ref_margin: Vec<f64> = match config.loss_mode {
        LossMode::Dpo => used
            .iter()
            .map(|p| {
                let l = log_probs(reference, &p.input);
                l[p.expert] - l[p.executed]
            })
            .collect(),
        LossMode::Ce => Vec::new(),
    };
    let mut order: Vec<usize> = (0..used.len()).collect();
    let beta = config.beta;
    for epoch in 0..config.epochs_per_trial {
        order.shuffle(&mut rng(derive_seed(&[seed, epoch as u64])));
        let mut total = 0.0;
        for batch in order.chunks(config.batch_size) {
            let n = batch.len() as f64;
            let mut updates: Vec<(usize, usize, f64)> = Vec::new();
            for &k in batch {
                let p = used[k];
                let l = log_probs(&theta, &p.input);
                match config.loss_mode {
                    LossMode::Dpo => {
                        let delta = l[p.expert] - l[p.executed] - ref_margin[k];
                        total += softplus(-beta * delta);
                        let step = config.lr * beta * sigmoid(-beta * delta) / n;
                        updates.push((k, p.expert, step));
                        updates.push((k, p.executed, -step));
                    }
                    LossMode::Ce => {
                        total -= l[p.expert];
                        updates.push((k, p.expert, config.lr / n));
                        for (c, lc) in l.iter().enumerate() {
                            updates.push((k, c, -config.lr * lc.exp() / n));
                        }
                    }
                }
            }
            for (k, c, step) in updates {
                add_logit_grad(&mut theta, &used[k].input, c, step);
            }
        }
        losses.push(total / used.len() as f64);
    }
    (theta, losses, used.len())
}

/// Greedy rollouts of `theta` over a task list, in task order.
pub fn rollout_greedy(
    tasks: &[TaskInstance],
    theta: &PolicyParams,
    backend: &PlannerBackend,
    memories: Option<&BTreeMap<String, MemoryPool>>,
    opts: &EpisodeOptions,
    trial_index: u32,
) -> Vec<Trajectory> {
    tasks
        .par_iter()
        .map(|t| {
            let memory = memories.and_then(|m| m.get(&t.id)).cloned().unwrap_or_default();
            let mut o = *opts;
            o.noise.seed = derive_seed(&[opts.noise.seed, hash_str(&t.id)]);
            run_episode(t, theta, backend, &memory, trial_index, Behavior::Greedy, &o)
        })
        .collect()
}

/// Drives the trial loop one trial at a time so callers can checkpoint.
pub struct Trainer<'a> {
    pub tasks: &'a [TaskInstance],
    /// Tasks never trained on, evaluated greedily after every trial.
    pub heldout: &'a [TaskInstance],
    pub backend: PlannerBackend,
    pub state: RunState,
}

impl<'a> Trainer<'a> {
    pub fn new(config: TrainerConfig, tasks: &'a [TaskInstance], backend: PlannerBackend) -> Self {
        Trainer { tasks, heldout: &[], backend, state: RunState::new(config) }
    }

    pub fn resume(state: RunState, tasks: &'a [TaskInstance], backend: PlannerBackend) -> Self {
        Trainer { tasks, heldout: &[], backend, state }
    }

    pub fn with_heldout(mut self, heldout: &'a [TaskInstance]) -> Self {
        self.heldout = heldout;
        self
    }

    pub fn finished(&self) -> bool {
        self.state.finished || self.state.next_trial >= self.state.config.max_trials
    }

    fn options(&self, noise: NoiseSpec) -> EpisodeOptions {
        EpisodeOptions { horizon: self.state.config.horizon, replanning: self.state.config.replanning, noise }
    }

    /// Runs one trial: sampled rollouts, aggregation, policy and plan-model
    /// updates, then a greedy evaluation. Returns the trajectory log lines.
    pub fn step_trial(&mut self) -> Vec<TrajectoryLine> {
        let cfg = self.state.config.clone();
        let trial = self.state.next_trial;
        let master = cfg.master_seed;
        let train_opts = self.options(NoiseSpec { rate: cfg.train_noise, channel: Channel::Visual, seed: 0 });
        let theta = &self.state.theta;
        let backend = &self.backend;
        let memories = &self.state.memories;
        let sampled: Vec<Trajectory> = self
            .tasks
            .par_iter()
            .map(|t| {
                let seed = derive_seed(&[master, trial as u64, hash_str(&t.id)]);
                let memory = memories.get(&t.id).cloned().unwrap_or_else(|| MemoryPool::new(cfg.memory_cap));
                let mut o = train_opts;
                o.noise.seed = derive_seed(&[seed, TRAIN_NOISE_TAG]);
                let behavior = Behavior::Sample { seed, temperature: cfg.temperature };
                run_episode(t, theta, backend, &memory, trial as u32, behavior, &o)
            })
            .collect();

        let mut lines = Vec::new();
        let mut errors = ErrorTally::default();
        for traj in &sampled {
            let memory = self.state.memory_for(&traj.task_id);
            let agg = aggregate(traj, &self.backend, &memory);
            for (i, (step, expert)) in traj.steps.iter().zip(&agg.experts).enumerate() {
                lines.push(TrajectoryLine {
                    trial,
                    task_id: traj.task_id.clone(),
                    step: i,
                    action: step.action.surface_form.clone(),
                    planned: step.planned.map(|k| step.candidates[k].action.surface_form.clone()),
                    expert: expert.as_ref().map(|e| e.surface_form.clone()),
                    outcome: step.outcome.feedback_code.name().to_string(),
                    feedback: step.feedback.text.clone(),
                    episode_success: traj.success,
                });
            }
            self.state.dataset.extend(agg.pairs);
            self.state.memories.insert(traj.task_id.clone(), agg.memory);
            if cfg.replanning {
                self.state.corpus.extend(traj.plans.iter().cloned());
            }
            errors.add(&traj.errors);
        }

        let shuffle_seed = derive_seed(&[master, trial as u64, SHUFFLE_TAG]);
        let (theta, epoch_losses, trained_pairs) =
            train_policy(&self.state.dataset, &self.state.theta, &self.state.reference, &cfg, shuffle_seed);
        self.state.theta = theta;

        let plan_nll = if cfg.replanning && !self.state.corpus.is_empty() {
            match finetune_plan_model(&self.state.plan_model, &self.state.corpus, cfg.plan_epochs, cfg.plan_lr) {
                Ok((p, _)) => {
                    self.state.plan_model = p;
                    corpus_nll(&self.state.plan_model, &self.state.corpus).ok()
                }
                Err(e) => {
                    tracing::warn!("plan model update skipped: {e}");
                    None
                }
            }
        } else {
            None
        };

        let greedy = rollout_greedy(
            self.tasks,
            &self.state.theta,
            &self.backend,
            Some(&self.state.memories),
            &self.options(NoiseSpec::none()),
            trial as u32,
        );
        let heldout = rollout_greedy(
            self.heldout,
            &self.state.theta,
            &self.backend,
            None,
            &self.options(NoiseSpec::none()),
            trial as u32,
        );
        let heldout_success: Vec<bool> = heldout.iter().map(|t| t.success).collect();
        let sampled_success: Vec<bool> = sampled.iter().map(|t| t.success).collect();
        let greedy_success: Vec<bool> = greedy.iter().map(|t| t.success).collect();
        let greedy_steps: Vec<u32> = greedy.iter().map(|t| t.len() as u32).collect();
        let report = TrialReport {
            trial,
            sampled_rate: rate(&sampled_success),
            greedy_rate: rate(&greedy_success),
            avg_steps: mean_steps(&greedy_success, &greedy_steps),
            sampled_success,
            greedy_success,
            greedy_steps,
            dataset_size: self.state.dataset.len(),
            trained_pairs,
            train_loss: epoch_losses.last().copied().unwrap_or(0.0),
            epoch_losses,
            plan_nll,
            planner_errors: errors,
            planner_errors_seen: errors.total(),
            planner_errors_ood: heldout.iter().map(|t| t.errors.total()).sum(),
            heldout_rate: (!heldout_success.is_empty()).then(|| rate(&heldout_success)),
            heldout_success,
        };
        tracing::info!(
            trial,
            sampled = report.sampled_rate,
            greedy = report.greedy_rate,
            pairs = report.dataset_size,
            loss = report.train_loss,
            "trial finished"
        );
        self.state.reports.push(report);
        self.state.next_trial += 1;
        if self.state.next_trial >= cfg.max_trials {
            self.state.finished = true;
        }
        lines
    }

    pub fn run(mut self) -> RunState {
        while !self.finished() {
            self.step_trial();
        }
        self.state
    }
}

/// Runs a full training loop with the given backend.
pub fn run_training(config: TrainerConfig, tasks: &[TaskInstance], backend: PlannerBackend) -> RunState {
    Trainer::new(config, tasks, backend).run()
}

pub fn rate(bits: &[bool]) -> f64 {
    if bits.is_empty() {
        return 0.0;
    }
    bits.iter().filter(|b| **b).count() as f64 / bits.len() as f64
}

/// Mean steps over successful episodes; zero when none succeeded.
pub fn mean_steps(success: &[bool], steps: &[u32]) -> f64 {
    let s: Vec<f64> = success.iter().zip(steps).filter(|(ok, _)| **ok).map(|(_, n)| f64::from(*n)).collect();
    if s.is_empty() {
        0.0
    } else {
        s.iter().sum::<f64>() / s.len() as f64
    }
}

/// Total planner errors over every trial.
pub fn count_planner_errors(reports: &[TrialReport]) -> u32 {
    reports.iter().map(|r| r.planner_errors.total()).sum()
}
