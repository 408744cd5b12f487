//! Procedural room generation.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::kinds::{ObjectKind, ReceptacleKind, StateFlag, TaskType};
use super::state::{GoalPredicate, GridPos, ObjectSpec, ReceptacleSpec, TaskSpec, WorldState};
use super::state::{DEFAULT_HORIZON, GRID_COLS, GRID_ROWS};
use super::step::{check_success, shortest_path};
use super::WorldError;
use crate::planner::oracle_search;

pub const MAX_ATTEMPTS: u32 = 1000;
pub const MAX_RECEPTACLES: usize = 12;
pub const MIN_OBJECTS: usize = 8;
pub const MAX_OBJECTS: usize = 20;
/// Longest oracle plan a generated task may need.
pub const MAX_PLAN_LEN: usize = 20;
pub const OPEN_PROB: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Room {
    Kitchen,
    Bathroom,
    Bedroom,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenOptions {
    /// Put one target instance in a closed receptacle that resists the first
    /// open attempt.
    pub stuck: bool,
}

#[derive(Debug, Clone, Copy)]
struct GoalTemplate {
    object: ObjectKind,
    destination: Option<ReceptacleKind>,
    room: Room,
}

const fn g(object: ObjectKind, destination: ReceptacleKind, room: Room) -> GoalTemplate {
    GoalTemplate { object, destination: Some(destination), room }
}

const fn look(object: ObjectKind) -> GoalTemplate {
    GoalTemplate { object, destination: None, room: Room::Bedroom }
}

use ObjectKind as O;
use ReceptacleKind as R;
use Room::{Bathroom, Bedroom, Kitchen};

const PICK: &[GoalTemplate] = &[
    g(O::Mug, R::Shelf, Kitchen),
    g(O::Cellphone, R::Desk, Bedroom),
    g(O::Soapbar, R::Countertop, Bathroom),
    g(O::Plate, R::Countertop, Kitchen),
    g(O::Book, R::Sidetable, Bedroom),
    g(O::Toiletpaper, R::Toilet, Bathroom),
    g(O::Keychain, R::Safe, Bedroom),
    g(O::Spraybottle, R::Toilet, Bathroom),
    g(O::Pan, R::Countertop, Kitchen),
    g(O::Pen, R::Shelf, Bedroom),
    g(O::Candle, R::Cabinet, Bathroom),
    g(O::Creditcard, R::Drawer, Bedroom),
];

const CLEAN: &[GoalTemplate] = &[
    g(O::Soapbar, R::Toilet, Bathroom),
    g(O::Mug, R::Shelf, Kitchen),
    g(O::Cloth, R::Countertop, Bathroom),
    g(O::Plate, R::Cabinet, Kitchen),
    g(O::Handtowel, R::Cabinet, Bathroom),
    g(O::Pan, R::Countertop, Kitchen),
    g(O::Lettuce, R::Fridge, Kitchen),
    g(O::Bowl, R::Shelf, Kitchen),
    g(O::Cup, R::Cabinet, Kitchen),
    g(O::Tomato, R::Countertop, Kitchen),
];

const HEAT: &[GoalTemplate] = &[
    g(O::Egg, R::Countertop, Kitchen),
    g(O::Apple, R::Garbagecan, Kitchen),
    g(O::Mug, R::Shelf, Kitchen),
    g(O::Potato, R::Countertop, Kitchen),
    g(O::Bread, R::Countertop, Kitchen),
    g(O::Plate, R::Cabinet, Kitchen),
    g(O::Cup, R::Cabinet, Kitchen),
    g(O::Tomato, R::Garbagecan, Kitchen),
];

const COOL: &[GoalTemplate] = &[
    g(O::Lettuce, R::Countertop, Kitchen),
    g(O::Tomato, R::Countertop, Kitchen),
    g(O::Apple, R::Garbagecan, Kitchen),
    g(O::Pan, R::Shelf, Kitchen),
    g(O::Mug, R::Cabinet, Kitchen),
    g(O::Bread, R::Countertop, Kitchen),
    g(O::Potato, R::Garbagecan, Kitchen),
    g(O::Cup, R::Shelf, Kitchen),
    g(O::Egg, R::Garbagecan, Kitchen),
    g(O::Plate, R::Cabinet, Kitchen),
];

const LOOK: &[GoalTemplate] = &[
    look(O::Book),
    look(O::Cellphone),
    look(O::Pen),
    look(O::Keychain),
    look(O::Creditcard),
    look(O::Mug),
    look(O::Bowl),
    look(O::Cup),
    look(O::Candle),
    look(O::Plate),
];

const PICK2: &[GoalTemplate] = &[
    g(O::Soapbar, R::Garbagecan, Bathroom),
    g(O::Book, R::Desk, Bedroom),
    g(O::Mug, R::Cabinet, Kitchen),
    g(O::Toiletpaper, R::Cabinet, Bathroom),
    g(O::Cellphone, R::Sidetable, Bedroom),
    g(O::Cup, R::Countertop, Kitchen),
    g(O::Pen, R::Desk, Bedroom),
    g(O::Tomato, R::Fridge, Kitchen),
    g(O::Creditcard, R::Shelf, Bedroom),
    g(O::Apple, R::Countertop, Kitchen),
    g(O::Keychain, R::Drawer, Bedroom),
    g(O::Candle, R::Countertop, Bathroom),
];

fn catalog(task_type: TaskType) -> &'static [GoalTemplate] {
    match task_type {
        TaskType::PickPlace => PICK,
        TaskType::CleanPlace => CLEAN,
        TaskType::HeatPlace => HEAT,
        TaskType::CoolPlace => COOL,
        TaskType::Look => LOOK,
        TaskType::Pick2Place => PICK2,
    }
}

fn distractor_pool(room: Room) -> &'static [ObjectKind] {
    match room {
        Kitchen => &[
            O::Apple, O::Bowl, O::Bread, O::Cellphone, O::Creditcard, O::Cup, O::Egg, O::Keychain, O::Lettuce,
            O::Mug, O::Pan, O::Plate, O::Potato, O::Soapbottle, O::Tomato,
        ],
        Bathroom => &[O::Candle, O::Cloth, O::Handtowel, O::Soapbar, O::Soapbottle, O::Spraybottle, O::Toiletpaper],
        Bedroom => &[
            O::Book, O::Bowl, O::Candle, O::Cellphone, O::Creditcard, O::Cup, O::Keychain, O::Mug, O::Pen, O::Plate,
        ],
    }
}

/// (kind, min, max) receptacle counts for each room.
fn room_template(room: Room) -> &'static [(ReceptacleKind, u32, u32)] {
    match room {
        Kitchen => &[
            (R::Cabinet, 2, 4),
            (R::Countertop, 1, 2),
            (R::Drawer, 1, 3),
            (R::Fridge, 1, 1),
            (R::Garbagecan, 1, 1),
            (R::Microwave, 1, 1),
            (R::Shelf, 0, 2),
            (R::Sinkbasin, 1, 1),
        ],
        Bathroom => &[
            (R::Cabinet, 4, 4),
            (R::Countertop, 1, 1),
            (R::Garbagecan, 1, 1),
            (R::Handtowelholder, 0, 2),
            (R::Sinkbasin, 1, 2),
            (R::Toilet, 1, 1),
            (R::Toiletpaperhanger, 0, 1),
            (R::Towelholder, 0, 1),
        ],
        Bedroom => &[
            (R::Cabinet, 0, 2),
            (R::Desk, 1, 1),
            (R::Drawer, 2, 4),
            (R::Garbagecan, 1, 1),
            (R::Safe, 0, 1),
            (R::Shelf, 1, 3),
            (R::Sidetable, 1, 2),
        ],
    }
}

fn goal_for(task_type: TaskType, seed: u64) -> (GoalTemplate, GoalPredicate) {
    let list = catalog(task_type);
    let t = list[(seed % list.len() as u64) as usize];
    let flag = match task_type {
        TaskType::CleanPlace => Some(StateFlag::Clean),
        TaskType::HeatPlace => Some(StateFlag::Hot),
        TaskType::CoolPlace => Some(StateFlag::Cold),
        _ => None,
    };
    let goal = GoalPredicate {
        object: t.object,
        flag,
        destination: t.destination,
        count: if task_type == TaskType::Pick2Place { 2 } else { 1 },
        under_light: task_type == TaskType::Look,
    };
    (t, goal)
}

pub fn generate_task(seed: u64, task_type: TaskType, ood: bool) -> Result<(WorldState, TaskSpec), WorldError> {
    generate_task_with(seed, task_type, ood, GenOptions::default())
}

pub fn generate_task_with(
    seed: u64,
    task_type: TaskType,
    ood: bool,
    opts: GenOptions,
) -> Result<(WorldState, TaskSpec), WorldError> {
    let (template, goal) = goal_for(task_type, seed);
    let task = TaskSpec::new(task_type, goal, seed, ood);
    let base = crate::seed::derive_seed(&[seed, task_type.index() as u64, u64::from(ood), u64::from(opts.stuck)]);
    let mut rng = crate::seed::rng(base);
    for _ in 0..MAX_ATTEMPTS {
        let Some(world) = try_build(&mut rng, &template, &task, ood, opts, base) else {
            continue;
        };
        if check_success(&world, &task) {
            continue;
        }
        match oracle_search(&world, &task) {
            Ok(plan) if plan.steps.len() <= MAX_PLAN_LEN => return Ok((world, task)),
            _ => continue,
        }
    }
    Err(WorldError::Generation { attempts: MAX_ATTEMPTS, seed, task_type })
}

fn sample_kinds(rng: &mut ChaCha8Rng, room: Room, required: &[ReceptacleKind]) -> Vec<(ReceptacleKind, u32)> {
    loop {
        let mut kinds = Vec::new();
        for &(kind, lo, hi) in room_template(room) {
            let lo = if required.contains(&kind) { lo.max(1) } else { lo };
            let n = rng.random_range(lo..=hi.max(lo));
            for i in 1..=n {
                kinds.push((kind, i));
            }
        }
        if kinds.len() <= MAX_RECEPTACLES {
            return kinds;
        }
    }
}

fn try_build(
    rng: &mut ChaCha8Rng,
    template: &GoalTemplate,
    task: &TaskSpec,
    ood: bool,
    opts: GenOptions,
    base_seed: u64,
) -> Option<WorldState> {
    let goal = &task.goal;
    let mut required: Vec<ReceptacleKind> = goal.destination.into_iter().collect();
    match goal.flag {
        Some(StateFlag::Hot) => required.push(R::Microwave),
        Some(StateFlag::Cold) => required.push(R::Fridge),
        Some(StateFlag::Clean) => required.push(R::Sinkbasin),
        _ => {}
    }
    let kinds = sample_kinds(rng, template.room, &required);
    let center = (GRID_ROWS / 2, GRID_COLS / 2);
    let mut cells: Vec<GridPos> = (0..GRID_ROWS)
        .flat_map(|r| (0..GRID_COLS).map(move |c| (r, c)))
        .filter(|&p| p != center)
        .filter(|&(r, c)| ood || r == 0 || c == 0 || r == GRID_ROWS - 1 || c == GRID_COLS - 1)
        .collect();
    cells.shuffle(rng);
    let mut receptacles: Vec<ReceptacleSpec> = kinds
        .iter()
        .zip(cells.iter())
        .map(|(&(kind, i), &pos)| {
            let mut rec = ReceptacleSpec::new(kind, i, pos);
            if rec.openable {
                rec.is_open = rng.random_bool(OPEN_PROB);
            }
            rec
        })
        .collect();
    receptacles.sort_by_key(|r| (r.kind, r.index));

    let mut world = WorldState {
        grid_dims: (GRID_ROWS, GRID_COLS),
        receptacles,
        objects: Default::default(),
        agent_pos: center,
        agent_facing: None,
        inventory: Vec::new(),
        step_count: 0,
        horizon: DEFAULT_HORIZON,
        rng_seed: base_seed,
        observed: Default::default(),
    };
    for rec in &world.receptacles {
        shortest_path(&world, center, rec.grid_pos)?;
    }

    let n_objects = rng.random_range(MIN_OBJECTS..=MAX_OBJECTS);
    let extra = rng.random_range(0..=1u32);
    let n_goal = goal.count + extra;
    let mut counters = [0u32; 24];
    let mut new_object = |kind: ObjectKind, world: &mut WorldState| -> String {
        counters[kind.index()] += 1;
        let obj = ObjectSpec::new(kind, counters[kind.index()]);
        let id = obj.id.clone();
        world.objects.insert(id.clone(), obj);
        id
    };

    let sources: Vec<usize> = (0..world.receptacles.len())
        .filter(|&i| Some(world.receptacles[i].kind) != goal.destination)
        .collect();
    if sources.is_empty() {
        return None;
    }
    for k in 0..n_goal {
        let id = new_object(goal.object, &mut world);
        let slot = if k == 0 && opts.stuck {
            let openable: Vec<usize> = sources.iter().copied().filter(|&i| world.receptacles[i].openable).collect();
            let &slot = openable.as_slice().choose(rng)?;
            let rec = &mut world.receptacles[slot];
            rec.is_open = false;
            rec.stuck = true;
            slot
        } else {
            *sources.as_slice().choose(rng)?
        };
        world.receptacles[slot].contents.push(id);
    }
    let mut placed = n_goal as usize;
    if goal.under_light {
        let holders: Vec<usize> = (0..world.receptacles.len())
            .filter(|&i| matches!(world.receptacles[i].kind, R::Desk | R::Sidetable))
            .collect();
        let &slot = holders.as_slice().choose(rng)?;
        let id = new_object(O::Desklamp, &mut world);
        world.receptacles[slot].contents.push(id);
        placed += 1;
    }
    let pool: Vec<ObjectKind> = distractor_pool(template.room).iter().copied().filter(|&k| k != goal.object).collect();
    let n_recs = world.receptacles.len();
    while placed < n_objects {
        let kind = *pool.as_slice().choose(rng)?;
        let id = new_object(kind, &mut world);
        let slot = rng.random_range(0..n_recs);
        world.receptacles[slot].contents.push(id);
        placed += 1;
    }
    debug_assert!(world.validate().is_ok());
    Some(world)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_seven_pick_is_the_spraybottle_room() {
        let (world, task) = generate_task(7, TaskType::PickPlace, false).unwrap();
        assert_eq!(task.instruction, "put some spraybottle on toilet");
        assert!(world.receptacles.iter().any(|r| r.kind == R::Toilet));
        assert_eq!(world, generate_task(7, TaskType::PickPlace, false).unwrap().0);
    }

    #[test]
    fn generated_worlds_respect_size_bounds() {
        for t in TaskType::ALL {
            for seed in 0..20 {
                for ood in [false, true] {
                    let (w, _) = generate_task(seed, t, ood).unwrap();
                    assert!(w.validate().is_ok());
                    assert!((6..=MAX_RECEPTACLES).contains(&w.receptacles.len()));
                    assert!((MIN_OBJECTS..=MAX_OBJECTS).contains(&w.objects.len()));
                    if !ood {
                        for r in &w.receptacles {
                            let (row, col) = r.grid_pos;
                            assert!(row == 0 || col == 0 || row == 6 || col == 6);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn stuck_option_marks_a_closed_target_holder() {
        for t in TaskType::ALL {
            let mut found = 0;
            for seed in 0..12 {
                let Ok((w, task)) = generate_task_with(seed, t, false, GenOptions { stuck: true }) else { continue };
                let stuck: Vec<_> = w.receptacles.iter().filter(|r| r.stuck).collect();
                assert_eq!(stuck.len(), 1);
                assert!(!stuck[0].is_open);
                assert!(stuck[0].contents.iter().any(|o| w.objects[o].kind == task.goal.object));
                found += 1;
            }
            assert!(found > 0, "no stuck layout for {t}");
        }
    }
}
