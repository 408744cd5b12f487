//! Oracle plans for one generated task of every type, seen and
//! out-of-distribution layouts side by side.

use emac::planner::oracle_search;
use emac::world::{generate_task, TaskType};

fn main() -> emac::Result<()> {
    for t in TaskType::ALL {
        for ood in [false, true] {
            let (world, task) = generate_task(3, t, ood)?;
            let plan = oracle_search(&world, &task)?;
            println!("[{}{}] {} ({} steps)", t.column(), if ood { ", ood" } else { "" }, task.instruction, plan.steps.len());
            for s in plan.surface_forms() {
                println!("    {s}");
            }
        }
    }
    Ok(())
}
