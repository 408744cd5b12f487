use thiserror::Error;

use crate::executor::ExecutorError;
use crate::harness::HarnessError;
use crate::planner::PlannerError;
use crate::world::WorldError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    World(#[from] WorldError),
    #[error(transparent)]
    Planner(#[from] PlannerError),
    #[error(transparent)]
    Executor(#[from] ExecutorError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
