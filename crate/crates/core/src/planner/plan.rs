use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::memory::MemoryPool;
use super::oracle::{oracle_action, oracle_search};
use super::wire::WireClient;
use super::PlannerError;
use crate::text::{build_prompt, translate_state, FeedbackLine, PromptBundle, TextObs};
use crate::world::{check_success, step_skill, FeedbackCode, SkillAction, TaskSpec, WorldState};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plan {
    pub steps: Vec<SkillAction>,
    pub rationale: Vec<String>,
}

impl Plan {
    pub fn new(steps: Vec<SkillAction>) -> Self {
        Plan { steps, rationale: Vec::new() }
    }

    pub fn surface_forms(&self) -> Vec<String> {
        self.steps.iter().map(|s| s.surface_form.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub obs: TextObs,
    pub action: SkillAction,
    pub feedback: FeedbackLine,
}

/// Everything the planner conditions on. `belief` is the planner's view of
/// the world; the oracle backend reads it directly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanContext {
    pub task_id: String,
    pub task: TaskSpec,
    pub environment_text: String,
    pub text_history: Vec<HistoryEntry>,
    pub memory: MemoryPool,
    pub current_obs: TextObs,
    pub belief: WorldState,
    /// History index at which the current plan was adopted.
    pub plan_origin: usize,
}

impl PlanContext {
    pub fn new(task_id: &str, task: &TaskSpec, state: &WorldState, memory: MemoryPool) -> Self {
        let obs = translate_state(state);
        PlanContext {
            task_id: task_id.to_string(),
            task: task.clone(),
            environment_text: obs.room_description.clone(),
            text_history: Vec::new(),
            memory,
            current_obs: obs,
            belief: state.clone(),
            plan_origin: 0,
        }
    }

    /// Records an executed step and the resulting state.
    pub fn record(&mut self, action: SkillAction, feedback: FeedbackLine, next_state: &WorldState) {
        let obs = std::mem::replace(&mut self.current_obs, translate_state(next_state));
        self.text_history.push(HistoryEntry { obs, action, feedback });
        self.belief = next_state.clone();
    }

    pub fn prompt_bundle(&self) -> PromptBundle {
        PromptBundle {
            environment_text: self.environment_text.clone(),
            instruction_text: self.task.instruction.clone(),
            history: self
                .text_history
                .iter()
                .map(|h| (h.action.surface_form.clone(), h.feedback.clone()))
                .collect(),
            memory_texts: self.memory.texts(),
        }
    }
}

#[derive(Clone, Default)]
pub enum PlannerBackend {
    #[default]
    Oracle,
    Wire(Arc<WireClient>),
}

impl std::fmt::Debug for PlannerBackend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PlannerBackend::Oracle => f.write_str("Oracle"),
            PlannerBackend::Wire(_) => f.write_str("Wire"),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorTally {
    pub parse_failures: u32,
    pub no_progress: u32,
    pub failed_plans: u32,
}

impl ErrorTally {
    pub fn total(&self) -> u32 {
        self.parse_failures + self.no_progress + self.failed_plans
    }

    pub fn add(&mut self, other: &ErrorTally) {
        self.parse_failures += other.parse_failures;
        self.no_progress += other.no_progress;
        self.failed_plans += other.failed_plans;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NextStep {
    Step { index: usize, action: SkillAction },
    Exhausted,
}

/// Number of plan steps already attempted: plan steps are matched in order
/// against the actions taken since the plan was adopted.
pub fn matched_steps(history: &[HistoryEntry], plan: &Plan) -> usize {
    let mut j = 0;
    for entry in history {
        if j < plan.steps.len() && entry.action == plan.steps[j] {
            j += 1;
        }
    }
    j
}

pub fn next_step(ctx: &PlanContext, plan: &Plan) -> NextStep {
    let j = matched_steps(&ctx.text_history[ctx.plan_origin.min(ctx.text_history.len())..], plan);
    match plan.steps.get(j) {
        Some(a) => NextStep::Step { index: j, action: a.clone() },
        None => NextStep::Exhausted,
    }
}

/// Simulates `steps` from `state` with stuck receptacles released and
/// failures skipped. True if the goal holds at any point.
pub fn plan_solves(state: &WorldState, task: &TaskSpec, steps: &[SkillAction]) -> bool {
    let mut s = state.clone();
    for r in &mut s.receptacles {
        r.stuck = false;
    }
    s.horizon = s.step_count + steps.len() as u32 + 1;
    if check_success(&s, task) {
        return true;
    }
    for a in steps {
        let Ok((next, _, _)) = step_skill(&s, a) else { return false };
        s = next;
        if check_success(&s, task) {
            return true;
        }
    }
    false
}

/// Proposes a fresh plan from the current belief. Plans that would not
/// solve the task are still returned but counted in `tally`.
pub fn propose_plan(ctx: &PlanContext, backend: &PlannerBackend, tally: &mut ErrorTally) -> Result<Plan, PlannerError> {
    let plan = match backend {
        PlannerBackend::Oracle => oracle_search(&ctx.belief, &ctx.task)?,
        PlannerBackend::Wire(client) => {
            let mut prompt = build_prompt(&ctx.prompt_bundle());
            prompt.push_str(if ctx.text_history.is_empty() { "Action Sequence:\n" } else { "Replanned Action Sequence:\n" });
            let answer = client.request_plan(&prompt, false);
            tally.parse_failures += answer.malformed;
            answer.plan?
        }
    };
    if !plan_solves(&ctx.belief, &ctx.task, &plan.steps) {
        tally.failed_plans += 1;
    }
    Ok(plan)
}

/// Builds the replanning prompt: the transcript followed by the first
/// question of the check-and-replan exchange.
pub fn replan_prompt(ctx: &PlanContext) -> String {
    let mut prompt = build_prompt(&ctx.prompt_bundle());
    prompt.push_str("> Q: Was the planned action executed successfully?\n");
    prompt
}

/// Revises `old_plan` after the most recent step failed. The steps matched
/// before the failure are kept; the rest is replaced by a plan from the
/// current belief. If the new continuation begins by retrying the failed
/// action, the failed attempt stays in the plan so that it keeps matching
/// the history.
pub fn replan(
    ctx: &PlanContext,
    old_plan: &Plan,
    failure: &FeedbackLine,
    backend: &PlannerBackend,
    tally: &mut ErrorTally,
) -> Result<Plan, PlannerError> {
    debug_assert_ne!(failure.code, FeedbackCode::Ok);
    let origin = ctx.plan_origin.min(ctx.text_history.len());
    let since = &ctx.text_history[origin..];
    let Some((last, before)) = since.split_last() else {
        return propose_plan(ctx, backend, tally);
    };
    let j = matched_steps(before, old_plan);
    let own_step = old_plan.steps.get(j) == Some(&last.action);
    let new_plan = match backend {
        PlannerBackend::Oracle => {
            let continuation = oracle_search(&ctx.belief, &ctx.task)?;
            let mut steps = old_plan.steps[..j].to_vec();
            if continuation.steps.first() == Some(&last.action) {
                steps.push(last.action.clone());
            }
            steps.extend(continuation.steps);
            Plan::new(steps)
        }
        PlannerBackend::Wire(client) => {
            let answer = client.request_plan(&replan_prompt(ctx), true);
            tally.parse_failures += answer.malformed;
            answer.plan?
        }
    };
    if new_plan.steps == old_plan.steps {
        if own_step {
            tally.no_progress += 1;
            return Err(PlannerError::NoProgress);
        }
        return Ok(old_plan.clone());
    }
    let done = matched_steps(since, &new_plan);
    if !plan_solves(&ctx.belief, &ctx.task, &new_plan.steps[done..]) {
        tally.failed_plans += 1;
    }
    Ok(new_plan)
}

/// The expert's choice at the current step.
pub fn corrected_action(ctx: &PlanContext, backend: &PlannerBackend) -> Option<SkillAction> {
    if let PlannerBackend::Wire(client) = backend {
        let mut prompt = build_prompt(&ctx.prompt_bundle());
        prompt.push_str("Next Action:\n");
        if let Ok(plan) = client.request_plan(&prompt, false).plan {
            return plan.steps.into_iter().next();
        }
    }
    oracle_action(&ctx.belief, &ctx.task)
}

/// The check-and-replan exchange after step `failed` (1-based) failed,
/// followed by the revised plan. `first_new` indexes the first step of the
/// revised plan that was not in the old one.
pub fn replan_transcript(failed: usize, code: FeedbackCode, action: &SkillAction, new_plan: &Plan, first_new: usize) -> String {
    let mut out = String::new();
    out.push_str("> Q: Was the planned action executed successfully?\n> No.\n");
    out.push_str(&format!("> think: step {failed} is failed to execute. {}.\n", super::retrospect::diagnose(code, action)));
    out.push_str("> Q: Does the current plan can solve the task?\n> No.\n");
    out.push_str("> think: I need to change the action sequence.");
    if let Some(step) = new_plan.steps.get(first_new) {
        out.push_str(&format!(" I need to {}.", step.surface_form));
    }
    out.push('\n');
    out.push_str(super::wire::REPLAN_MARKER);
    out.push('\n');
    out.push_str(&crate::text::render_steps(&new_plan.surface_forms()));
    out
}
