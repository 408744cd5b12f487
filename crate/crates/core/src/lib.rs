//! A closed-loop planner/executor agent over a miniature household world.
//!
//! The crate is organised around six pieces that mirror the agent loop:
//!
//! * [`world`] generates rooms, applies skill actions and renders the
//!   symbolic raster the executor sees.
//! * [`text`] produces the parallel textual observation and planner prompts.
//! * [`planner`] holds the search oracle, plan bookkeeping, replanning,
//!   retrospection, the feedback memory and the small plan model.
//! * [`executor`] is the linear-softmax policy with its DPO and
//!   cross-entropy objectives.
//! * [`trainer`] runs rollouts, aggregates preference pairs and trains.
//! * [`harness`] wraps everything into suites, reports and CLI commands.

pub mod error;
pub mod executor;
pub mod harness;
pub mod planner;
pub mod seed;
pub mod text;
pub mod trainer;
pub mod world;

pub use error::{Error, Result};
