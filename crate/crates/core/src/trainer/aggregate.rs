use super::episode::Trajectory;
use crate::executor::PreferencePair;
use crate::planner::{
    corrected_action, push_memory, retrospect, EpisodeView, FeedbackRecord, MemoryPool, PlanContext, PlannerBackend,
};
use crate::world::SkillAction;

/// What one finished trajectory contributes to the next round of training.
#[derive(Debug, Clone)]
pub struct Aggregated {
    pub pairs: Vec<PreferencePair>,
    /// Expert action per step, `None` where the expert had nothing to offer.
    pub experts: Vec<Option<SkillAction>>,
    pub record: FeedbackRecord,
    pub memory: MemoryPool,
}

/// Relabels every step with the expert's choice from the state the policy
/// actually reached, and writes the episode summary into the task's memory.
pub fn aggregate(traj: &Trajectory, backend: &PlannerBackend, memory: &MemoryPool) -> Aggregated {
    let mut pairs = Vec::with_capacity(traj.steps.len());
    let mut experts = Vec::with_capacity(traj.steps.len());
    for (t, step) in traj.steps.iter().enumerate() {
        let ctx = PlanContext {
            task_id: traj.task_id.clone(),
            task: traj.task.clone(),
            environment_text: traj.environment_text.clone(),
            text_history: match backend {
                PlannerBackend::Wire(_) => traj.text_history[..t].to_vec(),
                PlannerBackend::Oracle => Vec::new(),
            },
            memory: memory.clone(),
            current_obs: step.text.clone(),
            belief: step.state.clone(),
            plan_origin: 0,
        };
        let expert = corrected_action(&ctx, backend);
        if let Some(e) = expert.as_ref().and_then(|e| step.candidates.iter().position(|c| &c.action == e)) {
            pairs.push(PreferencePair {
                task: traj.task.clone(),
                obs: step.visual.clone(),
                context: step.context,
                candidates: step.candidates.clone(),
                planned: step.planned,
                executed: step.chosen,
                expert: e,
                input: step.input.clone(),
            });
        }
        experts.push(expert);
    }
    let states = traj.states();
    let view = EpisodeView {
        task_id: &traj.task_id,
        trial_index: traj.trial_index,
        task: &traj.task,
        environment_text: &traj.environment_text,
        text: &traj.text_history,
        states: &states,
        success: traj.success,
    };
    let record = retrospect(&view, backend);
    let memory = push_memory(memory.clone(), record.clone());
    Aggregated { pairs, experts, record, memory }
}
