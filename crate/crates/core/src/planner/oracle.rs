//! Breadth-first search expert over a compact abstraction of the world.
//!
//! Only the objects that matter for the goal are tracked (instances of the
//! goal kind, plus lamps for Look tasks). The searcher knows where every
//! object is, but it may only take from (or switch on a lamp in) a
//! receptacle once every lower-indexed receptacle of the same kind has been
//! looked into. That reproduces the "check one by one, starting with
//! cabinet 1" search pattern of a careful human planner.

use std::collections::{HashMap, VecDeque};

use super::{Plan, PlannerError};
use crate::world::{Location, Property, ReceptacleKind, SkillAction, StateFlag, TaskSpec, WorldState};

const NONE: u8 = u8::MAX;
const HELD: u8 = u8::MAX - 1;
const IRRELEVANT: u8 = u8::MAX - 2;
const MAX_TRACKED: usize = 8;
const MAX_EXPANSIONS: usize = 400_000;

const HOT: u8 = 1;
const COLD: u8 = 2;
const CLEAN: u8 = 4;
const LIT: u8 = 8;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Node {
    facing: u8,
    hold: u8,
    open: u16,
    observed: u16,
    loc: [u8; MAX_TRACKED],
    flags: [u8; MAX_TRACKED],
}

#[derive(Clone, Copy, Debug)]
enum Op {
    Goto(u8),
    Open(u8),
    Take(u8),
    Put(u8),
    Apply(u8),
    Use(u8),
}

struct Model<'a> {
    state: &'a WorldState,
    kinds: Vec<ReceptacleKind>,
    openable: u16,
    /// Same-kind receptacles with a lower index, per receptacle.
    prereq: Vec<u16>,
    tracked: Vec<String>,
    is_goal_kind: Vec<bool>,
    held_irrelevant: Option<String>,
    goal_flag: u8,
    appliance: Option<ReceptacleKind>,
    destination: Option<ReceptacleKind>,
    count: u32,
    under_light: bool,
}

fn flag_bit(f: StateFlag) -> u8 {
    match f {
        StateFlag::Hot => HOT,
        StateFlag::Cold => COLD,
        StateFlag::Clean => CLEAN,
        StateFlag::Lit => LIT,
    }
}

/// True when the searcher's knowledge allows taking from receptacle `idx`:
/// every lower-indexed receptacle of the same kind has been observed.
pub fn search_rule_allows(state: &WorldState, idx: usize) -> bool {
    let rec = &state.receptacles[idx];
    state
        .receptacles
        .iter()
        .filter(|r| r.kind == rec.kind && r.index < rec.index)
        .all(|r| state.observed.contains(&r.id))
}

impl<'a> Model<'a> {
    fn new(state: &'a WorldState, task: &TaskSpec) -> Result<(Self, Node), PlannerError> {
        let n = state.receptacles.len();
        if n > 16 {
            return Err(PlannerError::Unsolvable("more than 16 receptacles".into()));
        }
        let kinds: Vec<ReceptacleKind> = state.receptacles.iter().map(|r| r.kind).collect();
        let mut openable = 0u16;
        let mut open = 0u16;
        let mut observed = 0u16;
        let mut prereq = vec![0u16; n];
        for (i, r) in state.receptacles.iter().enumerate() {
            if r.openable {
                openable |= 1 << i;
            }
            if r.is_open {
                open |= 1 << i;
            }
            if state.observed.contains(&r.id) {
                observed |= 1 << i;
            }
            for (j, s) in state.receptacles.iter().enumerate() {
                if s.kind == r.kind && s.index < r.index {
                    prereq[i] |= 1 << j;
                }
            }
        }
        let goal = &task.goal;
        let mut tracked = Vec::new();
        let mut is_goal_kind = Vec::new();
        for obj in state.objects.values() {
            let lamp = goal.under_light && obj.has(Property::LightSource);
            if obj.kind == goal.object || lamp {
                tracked.push(obj.id.clone());
                is_goal_kind.push(obj.kind == goal.object);
            }
        }
        if tracked.len() > MAX_TRACKED {
            return Err(PlannerError::Unsolvable("too many goal objects".into()));
        }
        let mut node = Node {
            facing: state.facing_index().map_or(NONE, |i| i as u8),
            hold: NONE,
            open,
            observed,
            loc: [NONE; MAX_TRACKED],
            flags: [0; MAX_TRACKED],
        };
        for (k, id) in tracked.iter().enumerate() {
            node.loc[k] = match state.location_of(id) {
                Some(Location::In(i)) => i as u8,
                Some(Location::Held) => {
                    node.hold = k as u8;
                    HELD
                }
                None => return Err(PlannerError::Unsolvable(format!("{id} is nowhere"))),
            };
            for f in &state.objects[id].state_flags {
                node.flags[k] |= flag_bit(*f);
            }
        }
        let held_irrelevant = match state.inventory.first() {
            Some(id) if !tracked.contains(id) => {
                node.hold = IRRELEVANT;
                Some(id.clone())
            }
            _ => None,
        };
        let appliance = match goal.flag {
            Some(StateFlag::Hot) => Some(ReceptacleKind::Microwave),
            Some(StateFlag::Cold) => Some(ReceptacleKind::Fridge),
            Some(StateFlag::Clean) => Some(ReceptacleKind::Sinkbasin),
            _ => None,
        };
        let model = Model {
            state,
            kinds,
            openable,
            prereq,
            tracked,
            is_goal_kind,
            held_irrelevant,
            goal_flag: goal.flag.map_or(0, flag_bit),
            appliance,
            destination: goal.destination,
            count: goal.count,
            under_light: goal.under_light,
        };
        Ok((model, node))
    }

    fn accessible(&self, n: &Node, r: u8) -> bool {
        let bit = 1u16 << r;
        self.openable & bit == 0 || n.open & bit != 0
    }

    fn allowed(&self, n: &Node, r: u8) -> bool {
        let p = self.prereq[r as usize];
        n.observed & p == p
    }

    fn has_flag(&self, n: &Node, k: usize) -> bool {
        n.flags[k] & self.goal_flag == self.goal_flag
    }

    fn placed(&self, n: &Node, k: usize) -> bool {
        self.is_goal_kind[k]
            && n.loc[k] != HELD
            && Some(self.kinds[n.loc[k] as usize]) == self.destination
            && self.has_flag(n, k)
    }

    fn lamp_lit_at(&self, n: &Node, r: u8) -> bool {
        (0..self.tracked.len()).any(|k| !self.is_goal_kind[k] && n.loc[k] == r && n.flags[k] & LIT != 0)
    }

    fn is_goal(&self, n: &Node) -> bool {
        if self.under_light {
            let holding_goal = n.hold != NONE && n.hold != IRRELEVANT && self.is_goal_kind[n.hold as usize];
            return holding_goal && n.facing != NONE && self.lamp_lit_at(n, n.facing);
        }
        let placed = (0..self.tracked.len()).filter(|&k| self.placed(n, k)).count();
        placed as u32 >= self.count
    }

    /// Objects the plan still has to fetch from a receptacle.
    fn wanted(&self, n: &Node, k: usize) -> bool {
        if n.loc[k] == HELD {
            return false;
        }
        if self.is_goal_kind[k] {
            if self.under_light {
                n.hold == NONE || n.hold == IRRELEVANT
            } else {
                !self.placed(n, k)
            }
        } else {
            n.flags[k] & LIT == 0
        }
    }

    fn goto_targets(&self, n: &Node) -> u16 {
        let mut mask = 0u16;
        for k in 0..self.tracked.len() {
            if !self.wanted(n, k) {
                continue;
            }
            let at = n.loc[k];
            let p = self.prereq[at as usize];
            let missing = p & !n.observed;
            if missing == 0 {
                mask |= 1 << at;
            } else {
                mask |= 1 << missing.trailing_zeros();
            }
        }
        if n.hold != NONE && n.hold != IRRELEVANT {
            let k = n.hold as usize;
            let needs_flag = !self.has_flag(n, k);
            for (r, kind) in self.kinds.iter().enumerate() {
                if needs_flag && Some(*kind) == self.appliance {
                    mask |= 1 << r;
                }
                if !needs_flag && Some(*kind) == self.destination {
                    mask |= 1 << r;
                }
            }
            if self.under_light {
                for j in 0..self.tracked.len() {
                    if !self.is_goal_kind[j] && n.loc[j] != HELD {
                        mask |= 1 << n.loc[j];
                    }
                }
            }
        }
        if n.facing != NONE {
            mask &= !(1 << n.facing);
        }
        mask
    }

    fn successors(&self, n: &Node, out: &mut Vec<(Op, Node)>) {
        out.clear();
        let targets = self.goto_targets(n);
        for r in 0..self.kinds.len() as u8 {
            if targets & (1 << r) != 0 {
                let mut m = *n;
                m.facing = r;
                if self.accessible(n, r) {
                    m.observed |= 1 << r;
                }
                out.push((Op::Goto(r), m));
            }
        }
        let f = n.facing;
        if f == NONE {
            return;
        }
        let fbit = 1u16 << f;
        if self.openable & fbit != 0 && n.open & fbit == 0 {
            let mut m = *n;
            m.open |= fbit;
            m.observed |= fbit;
            out.push((Op::Open(f), m));
        }
        let access = self.accessible(n, f);
        if n.hold == NONE && access && self.allowed(n, f) {
            for k in 0..self.tracked.len() {
                if self.is_goal_kind[k] && n.loc[k] == f && self.wanted(n, k) {
                    let mut m = *n;
                    m.loc[k] = HELD;
                    m.hold = k as u8;
                    out.push((Op::Take(k as u8), m));
                }
            }
        }
        if n.hold == IRRELEVANT && access {
            let mut m = *n;
            m.hold = NONE;
            out.push((Op::Put(IRRELEVANT), m));
        } else if n.hold != NONE && n.hold != IRRELEVANT {
            let k = n.hold as usize;
            if access && !self.under_light && Some(self.kinds[f as usize]) == self.destination && self.has_flag(n, k) {
                let mut m = *n;
                m.loc[k] = f;
                m.hold = NONE;
                out.push((Op::Put(k as u8), m));
            }
            if Some(self.kinds[f as usize]) == self.appliance && !self.has_flag(n, k) {
                let mut m = *n;
                match self.goal_flag {
                    HOT => m.flags[k] &= !COLD,
                    COLD => m.flags[k] &= !HOT,
                    _ => {}
                }
                m.flags[k] |= self.goal_flag;
                out.push((Op::Apply(k as u8), m));
            }
        }
        if self.under_light && access && self.allowed(n, f) {
            for k in 0..self.tracked.len() {
                if !self.is_goal_kind[k] && n.loc[k] == f && n.flags[k] & LIT == 0 {
                    let mut m = *n;
                    m.flags[k] |= LIT;
                    out.push((Op::Use(k as u8), m));
                }
            }
        }
    }

    fn to_action(&self, before: &Node, op: Op) -> SkillAction {
        let rid = |r: u8| self.state.receptacles[r as usize].id.as_str();
        match op {
            Op::Goto(r) => SkillAction::goto(rid(r)),
            Op::Open(r) => SkillAction::open(rid(r)),
            Op::Take(k) => SkillAction::take(&self.tracked[k as usize], rid(before.facing)),
            Op::Put(k) => {
                let obj = if k == IRRELEVANT {
                    self.held_irrelevant.as_deref().expect("irrelevant object held")
                } else {
                    &self.tracked[k as usize]
                };
                SkillAction::put(obj, rid(before.facing))
            }
            Op::Apply(k) => {
                let obj = &self.tracked[k as usize];
                let r = rid(before.facing);
                match self.goal_flag {
                    HOT => SkillAction::heat(obj, r),
                    COLD => SkillAction::cool(obj, r),
                    _ => SkillAction::clean(obj, r),
                }
            }
            Op::Use(k) => SkillAction::use_object(&self.tracked[k as usize]),
        }
    }
}

/// Shortest skill-level plan that solves `task` from `state`. Stuck flags
/// are ignored; a stuck receptacle is handled by replanning after the first
/// failed open.
pub fn oracle_search(state: &WorldState, task: &TaskSpec) -> Result<Plan, PlannerError> {
    let (model, start) = Model::new(state, task)?;
    if model.is_goal(&start) {
        return Err(PlannerError::AlreadySolved);
    }
    let mut nodes: Vec<(Node, usize, Option<Op>)> = vec![(start, usize::MAX, None)];
    let mut seen: HashMap<Node, ()> = HashMap::new();
    seen.insert(start, ());
    let mut queue = VecDeque::from([0usize]);
    let mut buf = Vec::new();
    while let Some(i) = queue.pop_front() {
        let node = nodes[i].0;
        model.successors(&node, &mut buf);
        for &(op, next) in &buf {
            if seen.contains_key(&next) {
                continue;
            }
            seen.insert(next, ());
            nodes.push((next, i, Some(op)));
            let idx = nodes.len() - 1;
            if model.is_goal(&next) {
                return Ok(Plan::new(reconstruct(&model, &nodes, idx)));
            }
            if nodes.len() > MAX_EXPANSIONS {
                return Err(PlannerError::Unsolvable("search budget exhausted".into()));
            }
            queue.push_back(idx);
        }
    }
    Err(PlannerError::Unsolvable("goal unreachable".into()))
}

fn reconstruct(model: &Model, nodes: &[(Node, usize, Option<Op>)], mut idx: usize) -> Vec<SkillAction> {
    let mut steps = Vec::new();
    while let Some(op) = nodes[idx].2 {
        let parent = nodes[idx].1;
        steps.push(model.to_action(&nodes[parent].0, op));
        idx = parent;
    }
    steps.reverse();
    steps
}

/// First step of the oracle plan, or `None` when the task is already solved
/// or cannot be solved from here.
pub fn oracle_action(state: &WorldState, task: &TaskSpec) -> Option<SkillAction> {
    oracle_search(state, task).ok().and_then(|p| p.steps.into_iter().next())
}
