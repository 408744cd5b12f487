use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::world::SkillAction;

pub const DEFAULT_MEMORY_CAP: usize = 3;

/// Retrospective feedback for one episode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedbackRecord {
    pub task_id: String,
    pub trial_index: u32,
    pub failed_step: Option<SkillAction>,
    pub diagnosis: String,
    pub corrective_hint: String,
    pub final_success: bool,
}

impl FeedbackRecord {
    /// One-line rendering used in memory blocks of a prompt.
    pub fn to_text(&self) -> String {
        match &self.failed_step {
            None => format!("[trial {}] Succeeded. {}", self.trial_index, self.diagnosis),
            Some(step) => format!(
                "[trial {}] Failed at \"{}\": {}. Next time: {}.",
                self.trial_index, step.surface_form, self.diagnosis, self.corrective_hint
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryPool {
    records: VecDeque<FeedbackRecord>,
    cap: usize,
}

impl Default for MemoryPool {
    fn default() -> Self {
        Self::new(DEFAULT_MEMORY_CAP)
    }
}

impl MemoryPool {
    pub fn new(cap: usize) -> Self {
        MemoryPool { records: VecDeque::with_capacity(cap + 1), cap }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Oldest first.
    pub fn records(&self) -> impl Iterator<Item = &FeedbackRecord> {
        self.records.iter()
    }

    pub fn texts(&self) -> Vec<String> {
        self.records.iter().map(FeedbackRecord::to_text).collect()
    }
}

/// Appends a record, evicting the oldest ones beyond the cap.
pub fn push_memory(mut pool: MemoryPool, record: FeedbackRecord) -> MemoryPool {
    pool.records.push_back(record);
    while pool.records.len() > pool.cap {
        pool.records.pop_front();
    }
    pool
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(i: u32) -> FeedbackRecord {
        FeedbackRecord {
            task_id: "t".into(),
            trial_index: i,
            failed_step: None,
            diagnosis: String::new(),
            corrective_hint: String::new(),
            final_success: true,
        }
    }

    #[test]
    fn keeps_the_last_three() {
        let mut pool = MemoryPool::default();
        assert!(pool.is_empty());
        pool = push_memory(pool, rec(0));
        assert_eq!(pool.len(), 1);
        for i in 1..10 {
            pool = push_memory(pool, rec(i));
        }
        let kept: Vec<u32> = pool.records().map(|r| r.trial_index).collect();
        assert_eq!(kept, vec![7, 8, 9]);
    }
}
