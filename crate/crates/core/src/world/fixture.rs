use super::kinds::{ObjectKind as O, ReceptacleKind as R, TaskType};
use super::state::{GoalPredicate, ObjectSpec, ReceptacleSpec, TaskSpec, WorldState, DEFAULT_HORIZON, GRID_COLS, GRID_ROWS};

/// A fixed bathroom: the spraybottle sits in the closed second cabinet and
/// the first cabinet stands open with a cloth, a soapbar and a soapbottle.
pub fn demo_bathroom() -> (WorldState, TaskSpec) {
    let layout = [
        (R::Cabinet, 1, (0, 1)),
        (R::Cabinet, 2, (0, 2)),
        (R::Cabinet, 3, (0, 3)),
        (R::Cabinet, 4, (0, 4)),
        (R::Countertop, 1, (0, 5)),
        (R::Garbagecan, 1, (1, 0)),
        (R::Handtowelholder, 1, (2, 0)),
        (R::Handtowelholder, 2, (3, 0)),
        (R::Sinkbasin, 1, (4, 0)),
        (R::Sinkbasin, 2, (5, 0)),
        (R::Toilet, 1, (6, 3)),
        (R::Toiletpaperhanger, 1, (6, 4)),
        (R::Towelholder, 1, (1, 6)),
    ];
    let mut receptacles: Vec<ReceptacleSpec> = layout.iter().map(|&(k, i, p)| ReceptacleSpec::new(k, i, p)).collect();
    receptacles[0].is_open = true;
    let mut objects = std::collections::BTreeMap::new();
    let mut place = |rec: &mut ReceptacleSpec, kind: O, index: u32| {
        let o = ObjectSpec::new(kind, index);
        rec.contents.push(o.id.clone());
        objects.insert(o.id.clone(), o);
    };
    place(&mut receptacles[0], O::Cloth, 1);
    place(&mut receptacles[0], O::Soapbar, 1);
    place(&mut receptacles[0], O::Soapbottle, 1);
    place(&mut receptacles[1], O::Spraybottle, 2);
    let world = WorldState {
        grid_dims: (GRID_ROWS, GRID_COLS),
        receptacles,
        objects,
        agent_pos: (GRID_ROWS / 2, GRID_COLS / 2),
        agent_facing: None,
        inventory: Vec::new(),
        step_count: 0,
        horizon: DEFAULT_HORIZON,
        rng_seed: 0,
        observed: Default::default(),
    };
    let goal = GoalPredicate { object: O::Spraybottle, flag: None, destination: Some(R::Toilet), count: 1, under_light: false };
    (world, TaskSpec::new(TaskType::PickPlace, goal, 0, false))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_is_valid() {
        let (w, t) = demo_bathroom();
        assert!(w.validate().is_ok());
        assert_eq!(t.instruction, "put some spraybottle on toilet");
    }
}
