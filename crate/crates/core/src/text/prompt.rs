use serde::{Deserialize, Serialize};

use super::translate::FeedbackLine;

pub const PROMPT_HEADER: &str = "# emac prompt v1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub environment_text: String,
    pub instruction_text: String,
    pub history: Vec<(String, FeedbackLine)>,
    pub memory_texts: Vec<String>,
}

/// Serializes a bundle: header, memory, environment, instruction, then the
/// step/feedback history.
pub fn build_prompt(bundle: &PromptBundle) -> String {
    let mut out = String::new();
    out.push_str(PROMPT_HEADER);
    out.push('\n');
    for (i, m) in bundle.memory_texts.iter().enumerate() {
        out.push_str(&format!("Memory {}: {m}\n", i + 1));
    }
    out.push_str(&format!("Environment: {}\n", bundle.environment_text));
    out.push_str(&format!("task instruction: Your task is to: {}.\n", bundle.instruction_text));
    if !bundle.history.is_empty() {
        out.push_str("Action Sequence:\n");
        for (i, (action, feedback)) in bundle.history.iter().enumerate() {
            out.push_str(&format!("> step {}: {action}\n", i + 1));
            out.push_str(&format!("Env. feedback: {}\n", feedback.text));
        }
    }
    out
}

/// Numbered "> step k: ..." lines for a plan.
pub fn render_steps<S: AsRef<str>>(steps: &[S]) -> String {
    steps
        .iter()
        .enumerate()
        .map(|(i, s)| format!("> step {}: {}\n", i + 1, s.as_ref()))
        .collect()
}
