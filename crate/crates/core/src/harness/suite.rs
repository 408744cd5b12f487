use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::trainer::TaskInstance;
use crate::world::{generate_task_with, GenOptions, TaskType};

/// Seed ranges keep the suites disjoint.
pub const SEEN_BASE: u64 = 0;
pub const OOD_BASE: u64 = 10_000;
pub const STUCK_BASE: u64 = 20_000;
/// Seed candidates tried per requested task before giving up.
const SEED_BUDGET: u64 = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteKind {
    Seen,
    Ood,
    Stuck,
}

impl SuiteKind {
    pub fn name(self) -> &'static str {
        match self {
            SuiteKind::Seen => "seen",
            SuiteKind::Ood => "ood",
            SuiteKind::Stuck => "stuck",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [SuiteKind::Seen, SuiteKind::Ood, SuiteKind::Stuck].into_iter().find(|k| k.name() == s)
    }

    /// Default task counts per type, in `TaskType::ALL` order.
    pub fn default_counts(self) -> [usize; 6] {
        match self {
            SuiteKind::Seen => [20; 6],
            SuiteKind::Ood => [23, 23, 22, 22, 22, 22],
            SuiteKind::Stuck => [10; 6],
        }
    }

    fn base_seed(self) -> u64 {
        match self {
            SuiteKind::Seen => SEEN_BASE,
            SuiteKind::Ood => OOD_BASE,
            SuiteKind::Stuck => STUCK_BASE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub id: String,
    pub task_type: TaskType,
    pub seed: u64,
    pub ood: bool,
    pub stuck: bool,
}

impl SuiteEntry {
    pub fn instantiate(&self) -> Result<TaskInstance, HarnessError> {
        let (world, task) = generate_task_with(self.seed, self.task_type, self.ood, GenOptions { stuck: self.stuck })
            .map_err(|e| HarnessError::Suite(e.to_string()))?;
        Ok(TaskInstance { id: self.id.clone(), world, task })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSpec {
    pub kind: SuiteKind,
    pub entries: Vec<SuiteEntry>,
}

impl SuiteSpec {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn instantiate(&self) -> Result<Vec<TaskInstance>, HarnessError> {
        self.entries.iter().map(SuiteEntry::instantiate).collect()
    }
}

/// Builds a suite with `counts[i]` tasks of type `TaskType::ALL[i]`. Seeds
/// whose generation fails are skipped, so every entry instantiates.
pub fn gen_suite(kind: SuiteKind, counts: [usize; 6]) -> Result<SuiteSpec, HarnessError> {
    let mut entries = Vec::new();
    let stuck = kind == SuiteKind::Stuck;
    let ood = kind == SuiteKind::Ood;
    for (t, &want) in TaskType::ALL.iter().zip(&counts) {
        let mut got = 0;
        let mut seed = kind.base_seed();
        let limit = kind.base_seed() + SEED_BUDGET * want.max(1) as u64;
        while got < want {
            if seed >= limit {
                return Err(HarnessError::Suite(format!("could not fill {} {} tasks", kind.name(), t.column())));
            }
            if generate_task_with(seed, *t, ood, GenOptions { stuck }).is_ok() {
                entries.push(SuiteEntry {
                    id: format!("{}-{}-{seed}", kind.name(), t.column().to_lowercase()),
                    task_type: *t,
                    seed,
                    ood,
                    stuck,
                });
                got += 1;
            }
            seed += 1;
        }
    }
    Ok(SuiteSpec { kind, entries })
}

pub fn default_suite(kind: SuiteKind) -> Result<SuiteSpec, HarnessError> {
    gen_suite(kind, kind.default_counts())
}
