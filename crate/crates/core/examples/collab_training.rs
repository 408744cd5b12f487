//! Full training loop on a reduced seen suite with a held-out suite
//! evaluated after every trial.

use emac::harness::{errors_table, gen_suite, trial_table, SuiteKind};
use emac::planner::PlannerBackend;
use emac::trainer::{Trainer, TrainerConfig};

fn main() -> emac::Result<()> {
    let seen = gen_suite(SuiteKind::Seen, [6; 6])?.instantiate()?;
    let heldout = gen_suite(SuiteKind::Ood, [4; 6])?.instantiate()?;
    let cfg = TrainerConfig { max_trials: 6, ..TrainerConfig::default() };
    let state = Trainer::new(cfg, &seen, PlannerBackend::Oracle).with_heldout(&heldout).run();
    print!("{}", trial_table(&state.reports).to_text());
    print!("{}", errors_table(&state.reports).to_text());
    if let Some((id, memory)) = state.memories.iter().next() {
        println!("memory for {id}:");
        for line in memory.texts() {
            println!("  {line}");
        }
    }
    Ok(())
}
