//! Success on layouts with a stuck receptacle, with and without replanning.

use emac::harness::{ablate_replanning, ablation_table, default_suite, SuiteKind};
use emac::planner::PlannerBackend;
use emac::trainer::{pretrain_reference, TrainerConfig};

fn main() -> emac::Result<()> {
    let tasks = default_suite(SuiteKind::Stuck)?.instantiate()?;
    let cfg = TrainerConfig::default();
    let (on, off) = ablate_replanning(&tasks, &pretrain_reference(&cfg), &PlannerBackend::Oracle, cfg.horizon);
    print!("{}", ablation_table(&on, &off).to_text());
    Ok(())
}
