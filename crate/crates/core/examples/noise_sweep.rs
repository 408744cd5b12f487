//! Trains briefly, then measures success as the visual occlusion rate grows.

use emac::harness::{gen_suite, sweep, sweep_table, SuiteKind, SWEEP_RATES};
use emac::planner::PlannerBackend;
use emac::trainer::{run_training, Channel, EpisodeOptions, NoiseSpec, TrainerConfig};

fn main() -> emac::Result<()> {
    let tasks = gen_suite(SuiteKind::Seen, [8; 6])?.instantiate()?;
    let cfg = TrainerConfig { max_trials: 4, ..TrainerConfig::default() };
    let state = run_training(cfg.clone(), &tasks, PlannerBackend::Oracle);
    let opts = EpisodeOptions { horizon: cfg.horizon, replanning: true, noise: NoiseSpec::none() };
    let seeds: Vec<u64> = (0..5).collect();
    let points = sweep(&tasks, &state.theta, &PlannerBackend::Oracle, &opts, Channel::Visual, &SWEEP_RATES, &seeds);
    print!("{}", sweep_table(Channel::Visual, &points).to_text());
    Ok(())
}
