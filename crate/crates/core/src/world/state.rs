use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::kinds::{ObjectKind, Property, ReceptacleKind, StateFlag, TaskType};

pub type GridPos = (usize, usize);

/// Default episode length.
pub const DEFAULT_HORIZON: u32 = 30;
pub const GRID_ROWS: usize = 7;
pub const GRID_COLS: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub id: String,
    pub kind: ObjectKind,
    pub properties: BTreeSet<Property>,
    pub state_flags: BTreeSet<StateFlag>,
}

impl ObjectSpec {
    pub fn new(kind: ObjectKind, index: u32) -> Self {
        ObjectSpec {
            id: format!("{} {}", kind.name(), index),
            kind,
            properties: kind.properties().into_iter().collect(),
            state_flags: BTreeSet::new(),
        }
    }

    pub fn has(&self, p: Property) -> bool {
        self.properties.contains(&p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReceptacleSpec {
    pub id: String,
    pub kind: ReceptacleKind,
    pub index: u32,
    pub openable: bool,
    pub is_open: bool,
    pub contents: Vec<String>,
    pub grid_pos: GridPos,
    pub stuck: bool,
}

impl ReceptacleSpec {
    pub fn new(kind: ReceptacleKind, index: u32, grid_pos: GridPos) -> Self {
        ReceptacleSpec {
            id: format!("{} {}", kind.name(), index),
            kind,
            index,
            openable: kind.openable(),
            is_open: !kind.openable(),
            contents: Vec::new(),
            grid_pos,
            stuck: false,
        }
    }

    /// Contents are visible and reachable.
    pub fn accessible(&self) -> bool {
        !self.openable || self.is_open
    }
}

/// Full symbolic world state. Receptacles are kept sorted by (kind, index),
/// which is also the search order used by the oracle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorldState {
    pub grid_dims: (usize, usize),
    pub receptacles: Vec<ReceptacleSpec>,
    pub objects: BTreeMap<String, ObjectSpec>,
    pub agent_pos: GridPos,
    pub agent_facing: Option<String>,
    pub inventory: Vec<String>,
    pub step_count: u32,
    pub horizon: u32,
    pub rng_seed: u64,
    /// Receptacles whose contents the agent has seen at least once.
    pub observed: BTreeSet<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    In(usize),
    Held,
}

impl WorldState {
    pub fn receptacle_index(&self, id: &str) -> Option<usize> {
        self.receptacles.iter().position(|r| r.id == id)
    }

    pub fn receptacle(&self, id: &str) -> Option<&ReceptacleSpec> {
        self.receptacles.iter().find(|r| r.id == id)
    }

    pub fn facing_index(&self) -> Option<usize> {
        self.agent_facing.as_deref().and_then(|id| self.receptacle_index(id))
    }

    pub fn facing(&self) -> Option<&ReceptacleSpec> {
        self.facing_index().map(|i| &self.receptacles[i])
    }

    pub fn holding(&self) -> Option<&ObjectSpec> {
        self.inventory.first().and_then(|id| self.objects.get(id))
    }

    pub fn location_of(&self, object_id: &str) -> Option<Location> {
        if self.inventory.iter().any(|o| o == object_id) {
            return Some(Location::Held);
        }
        self.receptacles
            .iter()
            .position(|r| r.contents.iter().any(|o| o == object_id))
            .map(Location::In)
    }

    pub fn receptacle_at(&self, pos: GridPos) -> Option<usize> {
        self.receptacles.iter().position(|r| r.grid_pos == pos)
    }

    /// Cells that block movement (every receptacle cell).
    pub fn is_blocked(&self, pos: GridPos) -> bool {
        self.receptacle_at(pos).is_some()
    }

    /// SHA-256 over the canonical JSON encoding.
    pub fn state_hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("world state serializes");
        crate::seed::sha256_hex(&bytes)
    }

    /// Checks every structural invariant, returning a description of the
    /// first violation found.
    pub fn validate(&self) -> Result<(), String> {
        let (rows, cols) = self.grid_dims;
        if self.inventory.len() > 1 {
            return Err("inventory over capacity".into());
        }
        if self.step_count > self.horizon {
            return Err("step count beyond horizon".into());
        }
        if self.agent_pos.0 >= rows || self.agent_pos.1 >= cols {
            return Err("agent out of bounds".into());
        }
        let mut seen = BTreeSet::new();
        for r in &self.receptacles {
            if r.grid_pos.0 >= rows || r.grid_pos.1 >= cols {
                return Err(format!("{} out of bounds", r.id));
            }
            if !r.is_open && !r.openable {
                return Err(format!("{} closed but not openable", r.id));
            }
            for o in &r.contents {
                if !self.objects.contains_key(o) {
                    return Err(format!("unknown object {o}"));
                }
                if !seen.insert(o.clone()) {
                    return Err(format!("{o} placed twice"));
                }
            }
        }
        for o in &self.inventory {
            if !self.objects.contains_key(o) || !seen.insert(o.clone()) {
                return Err(format!("inventory object {o} invalid"));
            }
        }
        if seen.len() != self.objects.len() {
            return Err("object not placed anywhere".into());
        }
        for obj in self.objects.values() {
            for f in &obj.state_flags {
                if !obj.has(f.required_property()) {
                    return Err(format!("{} has unreachable flag {:?}", obj.id, f));
                }
            }
        }
        Ok(())
    }
}

/// Structured goal of a task.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalPredicate {
    pub object: ObjectKind,
    pub flag: Option<StateFlag>,
    pub destination: Option<ReceptacleKind>,
    pub count: u32,
    /// Look tasks: hold the object while facing a lit lamp.
    pub under_light: bool,
}

impl GoalPredicate {
    pub fn render_instruction(&self, task_type: TaskType) -> String {
        let o = self.object.name();
        match (task_type, self.destination) {
            (TaskType::Look, _) | (_, None) => format!("look at {o} under the desklamp"),
            (_, Some(d)) => {
                let lead = match task_type {
                    TaskType::PickPlace => "put some",
                    TaskType::CleanPlace => "put a clean",
                    TaskType::HeatPlace => "put a hot",
                    TaskType::CoolPlace => "put a cool",
                    TaskType::Pick2Place => "put two",
                    TaskType::Look => unreachable!(),
                };
                format!("{lead} {o} {} {}", d.preposition(), d.name())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub task_type: TaskType,
    pub instruction: String,
    pub goal: GoalPredicate,
    pub seed: u64,
    pub ood: bool,
}

impl TaskSpec {
    pub fn new(task_type: TaskType, goal: GoalPredicate, seed: u64, ood: bool) -> Self {
        TaskSpec {
            instruction: goal.render_instruction(task_type),
            task_type,
            goal,
            seed,
            ood,
        }
    }
}
