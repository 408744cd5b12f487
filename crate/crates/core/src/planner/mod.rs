//! The planner: search oracle, plan bookkeeping, replanning, retrospection,
//! feedback memory, the optional completion backend and the plan model.

mod memory;
mod oracle;
mod plan;
mod plan_model;
mod retrospect;
pub mod wire;

use thiserror::Error;

pub use memory::{push_memory, FeedbackRecord, MemoryPool, DEFAULT_MEMORY_CAP};
pub use oracle::{oracle_action, oracle_search, search_rule_allows};
pub use plan::{
    corrected_action, matched_steps, next_step, plan_solves, propose_plan, replan, replan_prompt, replan_transcript, ErrorTally,
    HistoryEntry, NextStep, Plan, PlanContext, PlannerBackend,
};
pub use plan_model::{
    corpus_nll, feature_dim, finetune_plan_model, full_vocabulary, plan_model_grad, plan_model_nll, step_token,
    PlanCondition, PlanCorpus, PlanModelParams,
};
pub use retrospect::{corrective_hint, diagnose, retrospect, EpisodeView};
pub use wire::{parse_plan, HttpTransport, ReplayTransport, Transport, WireClient, WireConfig};

#[derive(Debug, Error)]
pub enum PlannerError {
    #[error("no parseable plan after {attempts} malformed responses")]
    ParseFailure { attempts: u32 },
    #[error("completion request timed out")]
    Timeout,
    #[error("replanned sequence is identical to the failed plan")]
    NoProgress,
    #[error("task cannot be solved: {0}")]
    Unsolvable(String),
    #[error("task is already solved")]
    AlreadySolved,
    #[error("step token {0:?} is not in the plan vocabulary")]
    OutOfVocabulary(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("environment variable {0} is not set")]
    MissingEndpoint(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
