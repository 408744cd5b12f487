use super::memory::FeedbackRecord;
use super::oracle::oracle_action;
use super::plan::{HistoryEntry, PlannerBackend};
use crate::text::build_prompt;
use crate::text::PromptBundle;
use crate::world::{FeedbackCode, SkillAction, TaskSpec, Verb, WorldState};

/// One finished episode as seen by the critic: the textual steps and the
/// world states around them (`states.len() == text.len() + 1`).
pub struct EpisodeView<'a> {
    pub task_id: &'a str,
    pub trial_index: u32,
    pub task: &'a TaskSpec,
    pub environment_text: &'a str,
    pub text: &'a [HistoryEntry],
    pub states: &'a [WorldState],
    pub success: bool,
}

fn gerund(verb: Verb) -> &'static str {
    match verb {
        Verb::Goto => "going",
        Verb::Open => "opening",
        Verb::Close => "closing",
        Verb::Take => "taking",
        Verb::Put => "putting",
        Verb::Heat => "heating",
        Verb::Cool => "cooling",
        Verb::Clean => "cleaning",
        Verb::Use => "using",
    }
}

pub fn diagnose(code: FeedbackCode, action: &SkillAction) -> String {
    let r = action.receptacle_arg().unwrap_or("the receptacle");
    let o = action.object_arg().unwrap_or("the object");
    match code {
        FeedbackCode::Ok => "the step succeeded".to_string(),
        FeedbackCode::ClosedReceptacle => format!("{r} is closed"),
        FeedbackCode::Stuck => format!("{r} is stuck"),
        FeedbackCode::NotHere => format!("I was not at {}", action.receptacle_arg().unwrap_or(o)),
        FeedbackCode::HandsFull => "my hands were full".to_string(),
        FeedbackCode::NotFound => format!("{o} was not found at {r}"),
        FeedbackCode::Invalid => format!("\"{}\" is not possible there", action.surface_form),
    }
}

/// Hint for the step after a failure, derived from the expert's next move.
pub fn corrective_hint(failed: &SkillAction, expert: Option<&SkillAction>) -> String {
    match expert {
        Some(e) if e == failed => format!("retry {}", failed.surface_form),
        Some(e) => format!("{} before {}", e.surface_form, gerund(failed.verb)),
        None => format!("retry {}", failed.surface_form),
    }
}

/// Summarises an episode: the earliest failed step with a diagnosis and a
/// corrective hint. Failed episodes without a failed step point at the
/// first step that diverged from the expert.
pub fn retrospect(view: &EpisodeView, backend: &PlannerBackend) -> FeedbackRecord {
    let mut record = FeedbackRecord {
        task_id: view.task_id.to_string(),
        trial_index: view.trial_index,
        failed_step: None,
        diagnosis: String::new(),
        corrective_hint: String::new(),
        final_success: view.success,
    };
    if view.success {
        record.diagnosis = format!("Solved in {} steps.", view.text.len());
        return record;
    }
    if let Some(i) = view.text.iter().position(|h| h.feedback.code != FeedbackCode::Ok) {
        let failed = &view.text[i].action;
        let expert = oracle_action(&view.states[i + 1], view.task);
        record.failed_step = Some(failed.clone());
        record.diagnosis = diagnose(view.text[i].feedback.code, failed);
        record.corrective_hint = corrective_hint(failed, expert.as_ref());
    } else {
        let divergence = view.text.iter().enumerate().find_map(|(i, h)| {
            let expert = oracle_action(&view.states[i], view.task)?;
            (expert != h.action).then(|| (i, h.action.clone(), expert))
        });
        match divergence {
            Some((i, executed, expert)) => {
                record.failed_step = Some(executed);
                record.diagnosis = format!("step {} strayed from the plan", i + 1);
                record.corrective_hint = format!("{} instead", expert.surface_form);
            }
            None => {
                let last = view.states.last().expect("at least the initial state");
                let expert = oracle_action(last, view.task);
                let step = expert.clone().or_else(|| view.text.last().map(|h| h.action.clone()));
                record.failed_step = Some(step.unwrap_or_else(|| SkillAction::goto("nothing 1")));
                record.diagnosis = "ran out of steps".to_string();
                record.corrective_hint = match expert {
                    Some(e) => format!("{} sooner", e.surface_form),
                    None => "act sooner".to_string(),
                };
            }
        }
    }
    if let PlannerBackend::Wire(client) = backend {
        let bundle = PromptBundle {
            environment_text: view.environment_text.to_string(),
            instruction_text: view.task.instruction.clone(),
            history: view.text.iter().map(|h| (h.action.surface_form.clone(), h.feedback.clone())).collect(),
            memory_texts: Vec::new(),
        };
        let prompt = build_prompt(&bundle) + "Environment Return. Failed.\n> think:";
        if let Ok(text) = client.complete(&prompt) {
            if let Some(line) = text.lines().map(str::trim).find(|l| !l.is_empty()) {
                record.corrective_hint = line.trim_start_matches("> think:").trim().to_string();
            }
        }
    }
    record
}
