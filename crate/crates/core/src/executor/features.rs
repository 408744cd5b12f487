//! Binary featurisation of the raster and of candidate actions.

use serde::{Deserialize, Serialize};

use crate::world::{
    kind_of_code, GridPos, Location, ReceptacleKind, SkillAction, TaskSpec, TaskType, Verb, VisualObs, WorldState,
    BASE_CODES, OVERLAY_CODES,
};

pub const WINDOW: usize = 5;
/// Base codes plus one padding code for cells outside the grid.
pub const BASE_SLOTS: usize = BASE_CODES as usize + 1;
pub const OVERLAY_SLOTS: usize = OVERLAY_CODES as usize;
pub const CELL_SLOTS: usize = BASE_SLOTS + OVERLAY_SLOTS;
pub const RASTER_DIM: usize = WINDOW * WINDOW * CELL_SLOTS;
pub const TASK_OFFSET: usize = RASTER_DIM;
pub const INVENTORY_OFFSET: usize = TASK_OFFSET + 6;
pub const FACING_OFFSET: usize = INVENTORY_OFFSET + 1;
/// Facing kinds plus "nothing".
pub const FACING_SLOTS: usize = ReceptacleKind::ALL.len() + 1;
pub const FEATURE_DIM: usize = FACING_OFFSET + FACING_SLOTS;
/// Verb × referent receptacle kind (plus "no receptacle").
pub const KIND_SLOTS: usize = ReceptacleKind::ALL.len() + 1;
pub const TEMPLATES: usize = Verb::ALL.len() * KIND_SLOTS;
pub const MATCH_DIM: usize = 3;

/// Non-visual bits the executor receives alongside the raster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecContext {
    pub agent_pos: GridPos,
    pub facing: Option<ReceptacleKind>,
    pub holding: bool,
}

impl ExecContext {
    pub fn from_state(state: &WorldState) -> Self {
        ExecContext { agent_pos: state.agent_pos, facing: state.facing().map(|r| r.kind), holding: !state.inventory.is_empty() }
    }
}

/// Sorted indices of the features equal to one; every other entry is zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Features {
    pub active: Vec<u32>,
}

impl Features {
    pub fn dim(&self) -> usize {
        FEATURE_DIM
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; FEATURE_DIM];
        for &i in &self.active {
            v[i as usize] = 1.0;
        }
        v
    }
}

pub fn featurize(obs: &VisualObs, task_type: TaskType, ctx: &ExecContext) -> Features {
    let mut active = Vec::with_capacity(WINDOW * WINDOW * 2 + 3);
    let half = (WINDOW / 2) as isize;
    let (ar, ac) = (ctx.agent_pos.0 as isize, ctx.agent_pos.1 as isize);
    for dr in -half..=half {
        for dc in -half..=half {
            let cell = ((dr + half) as usize * WINDOW + (dc + half) as usize) * CELL_SLOTS;
            let (r, c) = (ar + dr, ac + dc);
            let inside = r >= 0 && c >= 0 && (r as usize) < obs.rows && (c as usize) < obs.cols;
            let (base, overlay) = if inside {
                (obs.base_at(r as usize, c as usize) as usize, obs.overlay_at(r as usize, c as usize) as usize)
            } else {
                (BASE_CODES as usize, 0)
            };
            active.push((cell + base) as u32);
            active.push((cell + BASE_SLOTS + overlay) as u32);
        }
    }
    active.push((TASK_OFFSET + task_type.index()) as u32);
    if ctx.holding {
        active.push(INVENTORY_OFFSET as u32);
    }
    active.push((FACING_OFFSET + ctx.facing.map_or(ReceptacleKind::ALL.len(), |k| k.index())) as u32);
    Features { active }
}

/// A candidate action together with where its referent receptacle is.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Candidate {
    pub action: SkillAction,
    pub kind: Option<ReceptacleKind>,
    pub cell: Option<GridPos>,
}

impl Candidate {
    pub fn template(&self) -> usize {
        self.action.verb.index() * KIND_SLOTS + self.kind.map_or(ReceptacleKind::ALL.len(), |k| k.index())
    }

    /// The raster shows a receptacle of the expected kind at the referent.
    pub fn grounded(&self, obs: &VisualObs) -> bool {
        match (self.cell, self.kind) {
            (Some((r, c)), Some(k)) => kind_of_code(obs.base_at(r, c)) == Some(k),
            _ => false,
        }
    }
}

/// Resolves the referent receptacle of an action in `state`. For `use`
/// that is the receptacle holding the object.
pub fn describe(state: &WorldState, action: &SkillAction) -> Candidate {
    let idx = match action.receptacle_arg() {
        Some(rid) => state.receptacle_index(rid),
        None => action.object_arg().and_then(|o| match state.location_of(o) {
            Some(Location::In(i)) => Some(i),
            _ => None,
        }),
    };
    let rec = idx.map(|i| &state.receptacles[i]);
    Candidate { action: action.clone(), kind: rec.map(|r| r.kind), cell: rec.map(|r| r.grid_pos) }
}

/// Plan-conditioning features of a candidate relative to the planned step:
/// exact match while grounded, same verb, same referent kind while grounded.
pub fn match_features(c: &Candidate, planned: Option<&Candidate>, obs: &VisualObs) -> [f64; MATCH_DIM] {
    let Some(b) = planned else { return [0.0; MATCH_DIM] };
    let grounded = c.grounded(obs);
    let f = |x: bool| if x { 1.0 } else { 0.0 };
    [
        f(c.action == b.action && grounded),
        f(c.action.verb == b.action.verb),
        f(b.kind.is_some() && c.kind == b.kind && grounded),
    ]
}

/// What the policy scores for one candidate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateFeatures {
    pub template: usize,
    pub psi: [f64; MATCH_DIM],
}

/// Complete policy input for one decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyInput {
    pub features: Features,
    pub candidates: Vec<CandidateFeatures>,
}

impl PolicyInput {
    pub fn build(obs: &VisualObs, task: &TaskSpec, ctx: &ExecContext, candidates: &[Candidate], planned: Option<&Candidate>) -> Self {
        PolicyInput {
            features: featurize(obs, task.task_type, ctx),
            candidates: candidates
                .iter()
                .map(|c| CandidateFeatures { template: c.template(), psi: match_features(c, planned, obs) })
                .collect(),
        }
    }
}

/// Candidate set for a step: the valid actions plus the planned step when it
/// is not already among them.
pub fn candidate_set(state: &WorldState, valid: &[SkillAction], planned: Option<&SkillAction>) -> (Vec<Candidate>, Option<usize>) {
    let mut out: Vec<Candidate> = valid.iter().map(|a| describe(state, a)).collect();
    let idx = planned.map(|b| match valid.iter().position(|a| a == b) {
        Some(i) => i,
        None => {
            out.push(describe(state, b));
            out.len() - 1
        }
    });
    (out, idx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions_add_up() {
        assert_eq!(BASE_SLOTS, 33);
        assert_eq!(CELL_SLOTS, 58);
        assert_eq!(FEATURE_DIM, 25 * 58 + 6 + 1 + 16);
        assert_eq!(TEMPLATES, 9 * 16);
    }
}
