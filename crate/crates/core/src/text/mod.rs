//! Parallel textual world: state and outcome translation, token noise and
//! planner prompt assembly.

mod noise;
mod prompt;
mod translate;

pub use noise::{apply_text_noise, noise_vocabulary, token_changes};
pub use prompt::{build_prompt, render_steps, PromptBundle, PROMPT_HEADER};
pub use translate::{
    article_list, room_description, translate_outcome, translate_state, FeedbackLine, TextObs, FAILURE_PREFIX, MIDDLE,
};
