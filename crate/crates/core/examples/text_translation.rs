//! Shows the textual view of a world before and after noise, and the
//! feedback lines produced for a few actions.

use emac::text::{apply_text_noise, token_changes, translate_outcome, translate_state};
use emac::world::{demo_bathroom, step_skill, SkillAction};

fn main() -> emac::Result<()> {
    let (mut world, task) = demo_bathroom();
    println!("{}\n", task.instruction);
    let obs = translate_state(&world);
    println!("{}\n", obs.render());
    let noisy = apply_text_noise(&obs, 0.3, 11);
    let (changed, total) = token_changes(&obs, &noisy);
    println!("{changed} of {total} tokens replaced:\n{}\n", noisy.render());

    for text in ["go to cabinet 1", "take cloth 1 from cabinet 1", "go to cabinet 2", "take spraybottle 2 from cabinet 2"] {
        let action = SkillAction::parse(text)?;
        let (next, outcome, _) = step_skill(&world, &action)?;
        println!("> {text}\n{}", translate_outcome(&outcome, &action, &world).text);
        world = next;
    }
    Ok(())
}
