//! The simulated household: kinds, state, skill semantics, generation and
//! the symbolic raster.

mod action;
mod fixture;
mod generate;
pub mod kinds;
mod snapshot;
mod state;
mod step;
mod visual;

use thiserror::Error;

pub use action::{MicroAction, SkillAction, Verb};
pub use fixture::demo_bathroom;
pub use generate::{generate_task, generate_task_with, GenOptions, Room, MAX_ATTEMPTS, MAX_PLAN_LEN};
pub use kinds::{ObjectKind, Property, ReceptacleKind, StateFlag, TaskType};
pub use snapshot::{from_jsonl, record_trajectory, to_jsonl, SnapshotRecord};
pub use state::{
    GoalPredicate, GridPos, Location, ObjectSpec, ReceptacleSpec, TaskSpec, WorldState, DEFAULT_HORIZON, GRID_COLS,
    GRID_ROWS,
};
pub use step::{check_success, shortest_path, step_skill, valid_actions, Delta, FeedbackCode, StepOutcome, StepResult};
pub use visual::{
    apply_visual_noise, kind_of_code, noise_rect, receptacle_code, render_visual, VisualObs, BASE_CODES, OVERLAY_CODES,
};

#[derive(Debug, Error)]
pub enum WorldError {
    #[error("episode exhausted at step {step} of {horizon}")]
    EpisodeExhausted { step: u32, horizon: u32 },
    #[error("no solvable layout after {attempts} attempts (seed {seed}, {task_type})")]
    Generation { attempts: u32, seed: u64, task_type: TaskType },
    #[error("cannot parse action {0:?}")]
    Parse(String),
}
