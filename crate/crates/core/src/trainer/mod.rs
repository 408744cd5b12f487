//! The collaborative training loop: rollouts, expert relabelling,
//! preference updates for the executor and plan-model fine-tuning.

mod aggregate;
mod config;
mod episode;
mod train;

pub use aggregate::{aggregate, Aggregated};
pub use config::{BackendKind, Channel, LossMode, NoiseSpec, TrainerConfig};
pub use episode::{argmax, run_episode, Behavior, EpisodeOptions, StepRecord, TaskInstance, Trajectory};
pub use train::{
    count_planner_errors, mean_steps, pretrain_reference, rate, reference_demos, rollout_greedy, run_training,
    train_policy, RunState, Trainer, TrajectoryLine, TrialReport,
};
