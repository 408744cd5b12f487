//! Line-delimited trajectory snapshots.

use serde::{Deserialize, Serialize};

use super::action::SkillAction;
use super::state::WorldState;
use super::step::{step_skill, FeedbackCode};
use super::visual::render_visual;
use super::WorldError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotRecord {
    pub step: u32,
    pub state_hash: String,
    pub action: String,
    pub outcome: FeedbackCode,
    pub raster_digest: String,
}

/// Replays `actions` from `start`, producing one record per step. The
/// state hash and raster digest describe the state after the step.
pub fn record_trajectory(start: &WorldState, actions: &[SkillAction]) -> Result<Vec<SnapshotRecord>, WorldError> {
    let mut state = start.clone();
    let mut out = Vec::with_capacity(actions.len());
    for action in actions {
        let (next, outcome, _) = step_skill(&state, action)?;
        out.push(SnapshotRecord {
            step: next.step_count,
            state_hash: next.state_hash(),
            action: action.surface_form.clone(),
            outcome: outcome.feedback_code,
            raster_digest: render_visual(&next).digest(),
        });
        state = next;
    }
    Ok(out)
}

pub fn to_jsonl(records: &[SnapshotRecord]) -> String {
    records
        .iter()
        .map(|r| serde_json::to_string(r).expect("snapshot serializes") + "\n")
        .collect()
}

pub fn from_jsonl(text: &str) -> Result<Vec<SnapshotRecord>, serde_json::Error> {
    text.lines().filter(|l| !l.trim().is_empty()).map(serde_json::from_str).collect()
}
