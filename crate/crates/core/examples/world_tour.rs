//! Generates a task, prints its raster, then walks the oracle plan and
//! shows each step's feedback and the micro-actions it expanded to.

use emac::planner::oracle_search;
use emac::world::{generate_task, render_visual, step_skill, TaskType};

fn main() -> emac::Result<()> {
    let (mut world, task) = generate_task(7, TaskType::HeatPlace, false)?;
    println!("task: {}", task.instruction);
    println!("{}", render_visual(&world).to_text());
    for action in oracle_search(&world, &task)?.steps {
        let (next, outcome, micro) = step_skill(&world, &action)?;
        println!("{:<40} {:<18} {} micro-actions", action.surface_form, outcome.feedback_code.name(), micro.len());
        world = next;
    }
    println!("solved: {}", emac::world::check_success(&world, &task));
    Ok(())
}
