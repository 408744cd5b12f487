use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::NoiseSpec;
use crate::executor::{candidate_set, logits, sample_index, Candidate, ExecContext, PolicyInput, PolicyParams};
use crate::planner::{
    next_step, oracle_search, propose_plan, replan, ErrorTally, HistoryEntry, MemoryPool, NextStep, Plan,
    PlanCondition, PlanContext, PlannerBackend,
};
use crate::seed::derive_seed;
use crate::text::{apply_text_noise, translate_outcome, FeedbackLine, TextObs};
use crate::world::{
    apply_visual_noise, check_success, render_visual, step_skill, valid_actions, SkillAction, StepOutcome, TaskSpec,
    VisualObs, WorldState,
};

/// A generated task ready to be rolled out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskInstance {
    pub id: String,
    pub world: WorldState,
    pub task: TaskSpec,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Behavior {
    Sample { seed: u64, temperature: f64 },
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeOptions {
    pub horizon: u32,
    pub replanning: bool,
    pub noise: NoiseSpec,
}

/// One executor decision and what came of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub state: WorldState,
    pub visual: VisualObs,
    pub text: TextObs,
    pub context: ExecContext,
    pub candidates: Vec<Candidate>,
    pub planned: Option<usize>,
    pub input: PolicyInput,
    pub chosen: usize,
    pub action: SkillAction,
    pub outcome: StepOutcome,
    pub feedback: FeedbackLine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub task_id: String,
    pub task: TaskSpec,
    pub trial_index: u32,
    pub environment_text: String,
    pub steps: Vec<StepRecord>,
    pub text_history: Vec<HistoryEntry>,
    pub final_state: WorldState,
    pub success: bool,
    /// Expert plans seen during the episode, for the plan model.
    pub plans: Vec<(PlanCondition, Plan)>,
    pub errors: ErrorTally,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// World states before every step plus the final one.
    pub fn states(&self) -> Vec<WorldState> {
        let mut v: Vec<WorldState> = self.steps.iter().map(|s| s.state.clone()).collect();
        v.push(self.final_state.clone());
        v
    }
}

fn expert_plan(state: &WorldState, task: &TaskSpec, trigger: Option<crate::world::FeedbackCode>) -> Option<(PlanCondition, Plan)> {
    oracle_search(state, task).ok().map(|p| (PlanCondition { task_type: task.task_type, trigger }, p))
}

/// Rolls out one episode: the planner proposes, the executor picks among
/// the candidates, and failures trigger a replan when enabled.
#[allow(clippy::too_many_arguments)]
pub fn run_episode(
    instance: &TaskInstance,
    theta: &PolicyParams,
    backend: &PlannerBackend,
    memory: &MemoryPool,
    trial_index: u32,
    behavior: Behavior,
    opts: &EpisodeOptions,
) -> Trajectory {
    let task = &instance.task;
    let mut state = instance.world.clone();
    state.horizon = opts.horizon;
    let noise = opts.noise;
    let noisy_text = noise.channel.textual() && noise.rate > 0.0;
    let noisy_visual = noise.channel.visual() && noise.rate > 0.0;

    let mut ctx = PlanContext::new(&instance.id, task, &state, memory.clone());
    if noisy_text {
        ctx.current_obs = apply_text_noise(&ctx.current_obs, noise.rate, derive_seed(&[noise.seed, 0]));
        ctx.environment_text = ctx.current_obs.room_description.clone();
    }
    let environment_text = ctx.environment_text.clone();
    let mut rng = match behavior {
        Behavior::Sample { seed, .. } => ChaCha8Rng::seed_from_u64(seed),
        Behavior::Greedy => ChaCha8Rng::seed_from_u64(0),
    };
    let mut tally = ErrorTally::default();
    let mut plans = Vec::new();
    plans.extend(expert_plan(&state, task, None));
    let mut plan = propose_plan(&ctx, backend, &mut tally).ok();
    let mut steps = Vec::new();
    let mut success = check_success(&state, task);

    while !success && state.step_count < state.horizon {
        let planned = match plan.as_ref().map(|p| next_step(&ctx, p)) {
            Some(NextStep::Step { action, .. }) => action,
            _ => {
                if !opts.replanning {
                    break;
                }
                ctx.plan_origin = ctx.text_history.len();
                match propose_plan(&ctx, backend, &mut tally) {
                    Ok(p) if !p.steps.is_empty() => {
                        let first = p.steps[0].clone();
                        plan = Some(p);
                        first
                    }
                    _ => break,
                }
            }
        };

        let tick = u64::from(state.step_count) + 1;
        let mut visual = render_visual(&state);
        if noisy_visual {
            visual = apply_visual_noise(&visual, noise.rate, derive_seed(&[noise.seed, tick, 1]));
        }
        let text = ctx.current_obs.clone();
        let context = ExecContext::from_state(&state);
        let valid = valid_actions(&state);
        let (candidates, planned_idx) = candidate_set(&state, &valid, Some(&planned));
        let input = PolicyInput::build(&visual, task, &context, &candidates, planned_idx.map(|i| &candidates[i]));
        let z = logits(theta, &input);
        let chosen = match behavior {
            Behavior::Sample { temperature, .. } => sample_index(&z, temperature, &mut rng),
            Behavior::Greedy => argmax(&z),
        };
        let action = candidates[chosen].action.clone();
        let (next, outcome, _) = step_skill(&state, &action).expect("loop guard keeps the episode within its horizon");
        let feedback = translate_outcome(&outcome, &action, &state);
        ctx.record(action.clone(), feedback.clone(), &next);
        if noisy_text {
            ctx.current_obs = apply_text_noise(&ctx.current_obs, noise.rate, derive_seed(&[noise.seed, tick, 2]));
        }
        steps.push(StepRecord {
            state: state.clone(),
            visual,
            text,
            context,
            candidates,
            planned: planned_idx,
            input,
            chosen,
            action,
            outcome: outcome.clone(),
            feedback: feedback.clone(),
        });
        state = next;
        success = check_success(&state, task);
        if !outcome.success && !success && opts.replanning && state.step_count < state.horizon {
            plans.extend(expert_plan(&state, task, Some(outcome.feedback_code)));
            if let Some(old) = plan.as_ref() {
                if let Ok(p) = replan(&ctx, old, &feedback, backend, &mut tally) {
                    plan = Some(p);
                }
            }
        }
    }

    Trajectory {
        task_id: instance.id.clone(),
        task: task.clone(),
        trial_index,
        environment_text,
        steps,
        text_history: ctx.text_history,
        final_state: state,
        success,
        plans,
        errors: tally,
    }
}

/// Index of the first maximum.
pub fn argmax(z: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in z.iter().enumerate() {
        if *v > z[best] {
            best = i;
        }
    }
    best
}
