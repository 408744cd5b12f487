use std::path::PathBuf;

use emac::harness::bathroom_transcript;
use emac::planner::oracle_search;
use emac::text::{apply_text_noise, room_description, translate_state};
use emac::world::{apply_visual_noise, demo_bathroom, generate_task, render_visual, TaskType};

/// Compares against `tests/data/<name>`; `UPDATE_GOLDEN=1` rewrites it.
fn golden(name: &str, actual: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "golden file {name} differs");
}

#[test]
fn seed_seven_raster() {
    let (world, _) = generate_task(7, TaskType::PickPlace, false).unwrap();
    golden("seed7_raster.txt", &render_visual(&world).to_text());
}

#[test]
fn seed_seven_raster_under_noise() {
    let (world, _) = generate_task(7, TaskType::PickPlace, false).unwrap();
    golden("seed7_raster_noise30_seed5.txt", &apply_visual_noise(&render_visual(&world), 0.3, 5).to_text());
}

#[test]
fn seed_seven_text_under_noise() {
    let (world, _) = generate_task(7, TaskType::PickPlace, false).unwrap();
    golden("seed7_text_noise30_seed11.txt", &apply_text_noise(&translate_state(&world), 0.3, 11).render());
}

#[test]
fn bathroom_walkthrough() {
    golden("bathroom_transcript.txt", &bathroom_transcript());
}

#[test]
fn bathroom_room_text_and_plan() {
    let (world, task) = demo_bathroom();
    assert_eq!(
        room_description(&world),
        "You are in the middle of a room. Looking quickly around you, you see a cabinet 4, a cabinet 3, a cabinet 2, \
         a cabinet 1, a countertop 1, a garbagecan 1, a handtowelholder 2, a handtowelholder 1, a sinkbasin 2, \
         a sinkbasin 1, a toilet 1, a toiletpaperhanger 1, and a towelholder 1."
    );
    let plan = oracle_search(&world, &task).unwrap();
    assert_eq!(
        plan.surface_forms(),
        [
            "go to cabinet 1",
            "go to cabinet 2",
            "open cabinet 2",
            "take spraybottle 2 from cabinet 2",
            "go to toilet 1",
            "put spraybottle 2 in/on toilet 1",
        ]
    );
}
