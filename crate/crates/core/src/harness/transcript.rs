use std::sync::Arc;

use crate::planner::{
    matched_steps, propose_plan, replan, replan_transcript, ErrorTally, MemoryPool, PlanContext, PlannerBackend,
    ReplayTransport, WireClient, WireConfig,
};
use crate::text::{build_prompt, render_steps, translate_outcome};
use crate::world::{demo_bathroom, step_skill};

/// What a completion model answered for the bathroom task: a plan that
/// forgets the second cabinet is closed.
pub const SCRIPTED_PLAN: &str = "> think: To solve the task, I need to find and take a spraybottle, then put it on toilet.\n\
> think: First I need to find a spraybottle. A spraybottle is more likely to appear in cabinet (1-4). I can check one by one, starting with cabinet 1.\n\
Action Sequence:\n\
> step 1: go to cabinet 1\n\
> step 2: go to cabinet 2\n\
> step 3: take spraybottle 2 from cabinet 2\n\
> step 4: go to toilet 1\n\
> step 5: put spraybottle 2 in/on toilet 1\n";

/// Plays the bathroom task end to end: the scripted plan, its execution
/// until the take fails, and the oracle's replan. Returns the transcript.
pub fn bathroom_transcript() -> String {
    let (mut state, task) = demo_bathroom();
    let mut ctx = PlanContext::new("bathroom", &task, &state, MemoryPool::default());
    let scripted = WireClient::new(Box::new(ReplayTransport::new([SCRIPTED_PLAN.to_string()])), WireConfig::default());
    let mut tally = ErrorTally::default();
    let plan = propose_plan(&ctx, &PlannerBackend::Wire(Arc::new(scripted)), &mut tally).expect("scripted plan parses");

    let mut out = build_prompt(&ctx.prompt_bundle());
    out.push_str("Action Sequence:\n");
    out.push_str(&render_steps(&plan.surface_forms()));
    for (i, action) in plan.steps.iter().enumerate() {
        let (next, outcome, _) = step_skill(&state, action).expect("within horizon");
        let feedback = translate_outcome(&outcome, action, &state);
        out.push_str(&format!("> step {}: {}\nEnv. feedback: {}\n", i + 1, action.surface_form, feedback.text));
        ctx.record(action.clone(), feedback.clone(), &next);
        state = next;
        if !outcome.success {
            let new_plan = replan(&ctx, &plan, &feedback, &PlannerBackend::Oracle, &mut tally).expect("oracle replans");
            let kept = matched_steps(&ctx.text_history[..i], &plan);
            out.push_str(&replan_transcript(i + 1, outcome.feedback_code, action, &new_plan, kept));
            break;
        }
    }
    out
}
