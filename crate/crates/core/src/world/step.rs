use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::action::{MicroAction, SkillAction, Verb};
use super::kinds::{Property, ReceptacleKind, StateFlag};
use super::state::{GridPos, Location, TaskSpec, WorldState};
use super::WorldError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeedbackCode {
    Ok,
    ClosedReceptacle,
    NotHere,
    HandsFull,
    NotFound,
    Invalid,
    Stuck,
}

impl FeedbackCode {
    pub const ALL: [FeedbackCode; 7] = [
        FeedbackCode::Ok,
        FeedbackCode::ClosedReceptacle,
        FeedbackCode::NotHere,
        FeedbackCode::HandsFull,
        FeedbackCode::NotFound,
        FeedbackCode::Invalid,
        FeedbackCode::Stuck,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            FeedbackCode::Ok => "ok",
            FeedbackCode::ClosedReceptacle => "closed-receptacle",
            FeedbackCode::NotHere => "not-here",
            FeedbackCode::HandsFull => "hands-full",
            FeedbackCode::NotFound => "not-found",
            FeedbackCode::Invalid => "invalid",
            FeedbackCode::Stuck => "stuck",
        }
    }
}

/// What changed after a successful step, or what blocked a failed one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Delta {
    Arrived { receptacle: String, closed: bool, visible: Vec<String> },
    Opened { receptacle: String, contents: Vec<String> },
    Closed { receptacle: String },
    PickedUp { object: String, from: String },
    Placed { object: String, into: String },
    Transformed { object: String, flag: StateFlag, appliance: String },
    Toggled { object: String, lit: bool },
    Failed { referent: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepOutcome {
    pub success: bool,
    pub feedback_code: FeedbackCode,
    pub observed_delta: Delta,
}

impl StepOutcome {
    fn ok(delta: Delta) -> Self {
        StepOutcome { success: true, feedback_code: FeedbackCode::Ok, observed_delta: delta }
    }

    fn fail(code: FeedbackCode, referent: &str) -> Self {
        StepOutcome {
            success: false,
            feedback_code: code,
            observed_delta: Delta::Failed { referent: referent.to_string() },
        }
    }
}

pub type StepResult = (WorldState, StepOutcome, Vec<MicroAction>);

const DIRS: [(isize, isize, MicroAction); 4] = [
    (-1, 0, MicroAction::MoveNorth),
    (1, 0, MicroAction::MoveSouth),
    (0, 1, MicroAction::MoveEast),
    (0, -1, MicroAction::MoveWest),
];

/// Breadth-first shortest path over floor cells, entering `goal` as the
/// last cell. Neighbours are expanded north, south, east, west.
pub fn shortest_path(state: &WorldState, from: GridPos, goal: GridPos) -> Option<Vec<MicroAction>> {
    let (rows, cols) = state.grid_dims;
    if from == goal {
        return Some(Vec::new());
    }
    let mut blocked = vec![false; rows * cols];
    for r in &state.receptacles {
        blocked[r.grid_pos.0 * cols + r.grid_pos.1] = true;
    }
    let mut parent: Vec<Option<(usize, MicroAction)>> = vec![None; rows * cols];
    let mut visited = vec![false; rows * cols];
    let start = from.0 * cols + from.1;
    let target = goal.0 * cols + goal.1;
    visited[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(cell) = queue.pop_front() {
        if cell == target {
            let mut moves = Vec::new();
            let mut cur = cell;
            while let Some((prev, m)) = parent[cur] {
                moves.push(m);
                cur = prev;
            }
            moves.reverse();
            return Some(moves);
        }
        let (r, c) = ((cell / cols) as isize, (cell % cols) as isize);
        for (dr, dc, m) in DIRS {
            let (nr, nc) = (r + dr, c + dc);
            if nr < 0 || nc < 0 || nr >= rows as isize || nc >= cols as isize {
                continue;
            }
            let next = nr as usize * cols + nc as usize;
            if visited[next] || (blocked[next] && next != target) {
                continue;
            }
            visited[next] = true;
            parent[next] = Some((cell, m));
            queue.push_back(next);
        }
    }
    None
}

/// Applies one skill action. Pure: the input state is never mutated. Every
/// call consumes one step, and failed actions change nothing else, except
/// that a stuck receptacle becomes unstuck once it has resisted an attempt.
pub fn step_skill(state: &WorldState, action: &SkillAction) -> Result<StepResult, WorldError> {
    if state.step_count >= state.horizon {
        return Err(WorldError::EpisodeExhausted { step: state.step_count, horizon: state.horizon });
    }
    let mut next = state.clone();
    next.step_count += 1;
    let (outcome, micro) = apply(&mut next, state, action);
    if !outcome.success {
        let mut failed = state.clone();
        failed.step_count += 1;
        if outcome.feedback_code == FeedbackCode::Stuck {
            if let Some(i) = action.receptacle_arg().and_then(|r| failed.receptacle_index(r)) {
                failed.receptacles[i].stuck = false;
            }
        }
        return Ok((failed, outcome, Vec::new()));
    }
    Ok((next, outcome, micro))
}

fn apply(next: &mut WorldState, state: &WorldState, action: &SkillAction) -> (StepOutcome, Vec<MicroAction>) {
    use FeedbackCode::*;
    let fail = |code, referent: &str| (StepOutcome::fail(code, referent), Vec::new());
    let rid = action.receptacle_arg().unwrap_or("");
    let oid = action.object_arg().unwrap_or("");
    let expected_args = match action.verb {
        Verb::Goto | Verb::Open | Verb::Close | Verb::Use => 1,
        _ => 2,
    };
    if action.args.len() != expected_args {
        return fail(Invalid, &action.surface_form);
    }
    if action.verb == Verb::Use {
        return apply_use(next, state, oid);
    }
    let Some(ri) = state.receptacle_index(rid) else {
        return fail(NotFound, rid);
    };
    let rec = &state.receptacles[ri];
    if action.verb == Verb::Goto {
        let Some(moves) = shortest_path(state, state.agent_pos, rec.grid_pos) else {
            return fail(NotFound, rid);
        };
        next.agent_pos = rec.grid_pos;
        next.agent_facing = Some(rec.id.clone());
        if rec.accessible() {
            next.observed.insert(rec.id.clone());
        }
        let visible = if rec.accessible() { rec.contents.clone() } else { Vec::new() };
        let delta = Delta::Arrived { receptacle: rec.id.clone(), closed: !rec.accessible(), visible };
        return (StepOutcome::ok(delta), moves);
    }
    if state.facing_index() != Some(ri) {
        return fail(NotHere, rid);
    }
    match action.verb {
        Verb::Open => {
            if !rec.openable || rec.is_open {
                return fail(Invalid, rid);
            }
            if rec.stuck {
                return fail(Stuck, rid);
            }
            next.receptacles[ri].is_open = true;
            next.observed.insert(rec.id.clone());
            let delta = Delta::Opened { receptacle: rec.id.clone(), contents: rec.contents.clone() };
            (StepOutcome::ok(delta), vec![MicroAction::ActuateOpen])
        }
        Verb::Close => {
            if !rec.openable || !rec.is_open {
                return fail(Invalid, rid);
            }
            next.receptacles[ri].is_open = false;
            (StepOutcome::ok(Delta::Closed { receptacle: rec.id.clone() }), vec![MicroAction::ActuateClose])
        }
        Verb::Take => {
            if !rec.accessible() {
                return fail(ClosedReceptacle, rid);
            }
            if !state.inventory.is_empty() {
                return fail(HandsFull, rid);
            }
            let Some(pos) = rec.contents.iter().position(|o| o == oid) else {
                return fail(NotFound, rid);
            };
            if !state.objects[oid].has(Property::Pickable) {
                return fail(Invalid, rid);
            }
            next.receptacles[ri].contents.remove(pos);
            next.inventory.push(oid.to_string());
            let delta = Delta::PickedUp { object: oid.to_string(), from: rec.id.clone() };
            (StepOutcome::ok(delta), vec![MicroAction::Grasp])
        }
        Verb::Put => {
            if !rec.accessible() {
                return fail(ClosedReceptacle, rid);
            }
            if state.inventory.first().map(String::as_str) != Some(oid) {
                return fail(NotFound, rid);
            }
            next.inventory.clear();
            next.receptacles[ri].contents.push(oid.to_string());
            let delta = Delta::Placed { object: oid.to_string(), into: rec.id.clone() };
            (StepOutcome::ok(delta), vec![MicroAction::Release])
        }
        Verb::Heat | Verb::Cool | Verb::Clean => {
            let (appliance, flag, prop) = match action.verb {
                Verb::Heat => (ReceptacleKind::Microwave, StateFlag::Hot, Property::Heatable),
                Verb::Cool => (ReceptacleKind::Fridge, StateFlag::Cold, Property::Coolable),
                _ => (ReceptacleKind::Sinkbasin, StateFlag::Clean, Property::Cleanable),
            };
            if rec.kind != appliance {
                return fail(Invalid, rid);
            }
            if state.inventory.first().map(String::as_str) != Some(oid) {
                return fail(NotFound, rid);
            }
            if !state.objects[oid].has(prop) {
                return fail(Invalid, rid);
            }
            let flags = &mut next.objects.get_mut(oid).expect("held object exists").state_flags;
            match flag {
                StateFlag::Hot => {
                    flags.remove(&StateFlag::Cold);
                }
                StateFlag::Cold => {
                    flags.remove(&StateFlag::Hot);
                }
                _ => {}
            }
            flags.insert(flag);
            use MicroAction::*;
            let micro = match action.verb {
                Verb::Heat => vec![ActuateOpen, Release, ActuateClose, Toggle, ActuateOpen, Grasp, ActuateClose],
                Verb::Cool => vec![ActuateOpen, Release, ActuateClose, ActuateOpen, Grasp, ActuateClose],
                _ => vec![Release, Toggle, Toggle, Grasp],
            };
            let delta = Delta::Transformed { object: oid.to_string(), flag, appliance: rec.id.clone() };
            (StepOutcome::ok(delta), micro)
        }
        Verb::Goto | Verb::Use => unreachable!("handled above"),
    }
}

fn apply_use(next: &mut WorldState, state: &WorldState, oid: &str) -> (StepOutcome, Vec<MicroAction>) {
    let Some(obj) = state.objects.get(oid) else {
        return (StepOutcome::fail(FeedbackCode::NotFound, oid), Vec::new());
    };
    let here = match (state.facing(), state.location_of(oid)) {
        (Some(rec), Some(Location::In(i))) => state.receptacles[i].id == rec.id && rec.accessible(),
        _ => false,
    };
    if !here {
        return (StepOutcome::fail(FeedbackCode::NotHere, oid), Vec::new());
    }
    if !obj.has(Property::LightSource) {
        return (StepOutcome::fail(FeedbackCode::Invalid, oid), Vec::new());
    }
    let flags = &mut next.objects.get_mut(oid).expect("object exists").state_flags;
    let lit = !flags.contains(&StateFlag::Lit);
    if lit {
        flags.insert(StateFlag::Lit);
    } else {
        flags.remove(&StateFlag::Lit);
    }
    (StepOutcome::ok(Delta::Toggled { object: oid.to_string(), lit }), vec![MicroAction::Toggle])
}

/// Enumerates applicable actions in a fixed order: gotos in search order,
/// open/close of the faced receptacle, takes, put, appliance actions, use.
pub fn valid_actions(state: &WorldState) -> Vec<SkillAction> {
    let mut out: Vec<SkillAction> = state.receptacles.iter().map(|r| SkillAction::goto(&r.id)).collect();
    let Some(rec) = state.facing() else {
        return out;
    };
    if rec.openable {
        out.push(if rec.is_open { SkillAction::close(&rec.id) } else { SkillAction::open(&rec.id) });
    }
    let holding = state.holding();
    if rec.accessible() && holding.is_none() {
        for o in &rec.contents {
            if state.objects[o].has(Property::Pickable) {
                out.push(SkillAction::take(o, &rec.id));
            }
        }
    }
    if let Some(obj) = holding {
        if rec.accessible() {
            out.push(SkillAction::put(&obj.id, &rec.id));
        }
        match rec.kind {
            ReceptacleKind::Microwave if obj.has(Property::Heatable) => out.push(SkillAction::heat(&obj.id, &rec.id)),
            ReceptacleKind::Fridge if obj.has(Property::Coolable) => out.push(SkillAction::cool(&obj.id, &rec.id)),
            ReceptacleKind::Sinkbasin if obj.has(Property::Cleanable) => {
                out.push(SkillAction::clean(&obj.id, &rec.id))
            }
            _ => {}
        }
    }
    if rec.accessible() {
        for o in &rec.contents {
            if state.objects[o].has(Property::LightSource) {
                out.push(SkillAction::use_object(o));
            }
        }
    }
    out
}

pub fn check_success(state: &WorldState, task: &TaskSpec) -> bool {
    let goal = &task.goal;
    let satisfies = |id: &str| {
        let o = &state.objects[id];
        o.kind == goal.object && goal.flag.is_none_or(|f| o.state_flags.contains(&f))
    };
    if goal.under_light {
        let Some(rec) = state.facing() else { return false };
        let lamp_lit = rec.contents.iter().any(|o| {
            let obj = &state.objects[o];
            obj.has(Property::LightSource) && obj.state_flags.contains(&StateFlag::Lit)
        });
        return lamp_lit && state.inventory.iter().any(|o| satisfies(o));
    }
    let Some(dest) = goal.destination else { return false };
    let placed = state
        .receptacles
        .iter()
        .filter(|r| r.kind == dest)
        .flat_map(|r| r.contents.iter())
        .filter(|o| satisfies(o))
        .count();
    placed as u32 >= goal.count
}
