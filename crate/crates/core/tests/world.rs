use std::collections::{BTreeSet, HashSet, VecDeque};

use emac::planner::{oracle_search, search_rule_allows};
use emac::text::translate_state;
use emac::world::{
    apply_visual_noise, check_success, generate_task, generate_task_with, noise_rect, render_visual, shortest_path,
    step_skill, valid_actions, GenOptions, Location, SkillAction, TaskSpec, TaskType, Verb, WorldError, WorldState,
};
use proptest::prelude::*;

fn task_strategy() -> impl Strategy<Value = (WorldState, TaskSpec)> {
    (0usize..6, 0u64..300, any::<bool>(), any::<bool>()).prop_filter_map("generation failed", |(t, seed, ood, stuck)| {
        generate_task_with(seed, TaskType::ALL[t], ood, GenOptions { stuck }).ok()
    })
}

/// Valid actions mixed with plausible but usually invalid ones.
fn pick_action(state: &WorldState, choice: usize) -> SkillAction {
    let valid = valid_actions(state);
    if !choice.is_multiple_of(4) {
        return valid[choice % valid.len()].clone();
    }
    let r = &state.receptacles[choice % state.receptacles.len()].id;
    let objects: Vec<&String> = state.objects.keys().collect();
    let o = objects[(choice / 7) % objects.len()];
    match (choice / 4) % 5 {
        0 => SkillAction::take(o, r),
        1 => SkillAction::put(o, r),
        2 => SkillAction::open(r),
        3 => SkillAction::heat(o, r),
        _ => SkillAction::use_object(o),
    }
}

fn object_ids(state: &WorldState) -> BTreeSet<String> {
    state.receptacles.iter().flat_map(|r| r.contents.iter().cloned()).chain(state.inventory.iter().cloned()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_play_keeps_the_world_consistent((world, _task) in task_strategy(), choices in prop::collection::vec(0usize..10_000, 0..30)) {
        let ids: BTreeSet<String> = world.objects.keys().cloned().collect();
        let mut state = world;
        for c in choices {
            let action = pick_action(&state, c);
            let (next, outcome, micro) = step_skill(&state, &action).unwrap();
            prop_assert!(next.validate().is_ok());
            prop_assert_eq!(next.step_count, state.step_count + 1);
            prop_assert_eq!(&object_ids(&next), &ids);
            if !outcome.success {
                prop_assert!(micro.is_empty());
                let mut expect = state.clone();
                expect.step_count += 1;
                let mut got = next.clone();
                for (a, b) in got.receptacles.iter_mut().zip(&expect.receptacles) {
                    a.stuck = b.stuck;
                }
                prop_assert_eq!(got, expect);
            }
            state = next;
        }
    }

    #[test]
    fn closed_receptacles_hide_their_contents((world, _task) in task_strategy(), choices in prop::collection::vec(0usize..10_000, 0..12)) {
        let mut state = world;
        for c in choices {
            state = step_skill(&state, &pick_action(&state, c)).unwrap().0;
        }
        let obs = render_visual(&state);
        let text = translate_state(&state);
        for r in state.receptacles.iter().filter(|r| !r.accessible()) {
            prop_assert_eq!(obs.overlay_at(r.grid_pos.0, r.grid_pos.1), 0);
            for o in &r.contents {
                prop_assert!(!text.observed_objects.contains(o));
                let prefix = format!("{} is", o);
                prop_assert!(!text.observed_relations.iter().any(|rel| rel.starts_with(&prefix)));
            }
        }
    }

    #[test]
    fn surface_forms_parse_back((world, _task) in task_strategy()) {
        for a in valid_actions(&world) {
            prop_assert_eq!(SkillAction::parse(&a.surface_form).unwrap(), a.clone());
        }
    }

    #[test]
    fn visual_noise_touches_only_its_rectangle((world, _task) in task_strategy(), rate in 0.0f64..1.0, seed in any::<u64>()) {
        let obs = render_visual(&world);
        let noisy = apply_visual_noise(&obs, rate, seed);
        let (h, w) = noise_rect(obs.rows, obs.cols, rate);
        prop_assert!(obs.hamming(&noisy) <= 2 * h * w);
        prop_assert_eq!(&apply_visual_noise(&obs, rate, seed), &noisy);
        prop_assert_eq!(apply_visual_noise(&obs, 0.0, seed), obs);
    }
}

#[test]
fn the_horizon_ends_the_episode() {
    let (mut world, _) = generate_task(1, TaskType::PickPlace, false).unwrap();
    world.horizon = 2;
    for _ in 0..2 {
        let a = valid_actions(&world)[0].clone();
        world = step_skill(&world, &a).unwrap().0;
    }
    let a = valid_actions(&world)[0].clone();
    assert!(matches!(step_skill(&world, &a), Err(WorldError::EpisodeExhausted { step: 2, horizon: 2 })));
}

/// Brute-force grid distance for comparison with `shortest_path`.
fn grid_bfs(state: &WorldState, from: (usize, usize), goal: (usize, usize)) -> Option<usize> {
    let (rows, cols) = state.grid_dims;
    let mut dist = vec![usize::MAX; rows * cols];
    let mut q = VecDeque::from([from]);
    dist[from.0 * cols + from.1] = 0;
    while let Some((r, c)) = q.pop_front() {
        if (r, c) == goal {
            return Some(dist[r * cols + c]);
        }
        let d = dist[r * cols + c];
        for (dr, dc) in [(-1isize, 0isize), (1, 0), (0, 1), (0, -1)] {
            let (nr, nc) = (r as isize + dr, c as isize + dc);
            if nr < 0 || nc < 0 || nr >= rows as isize || nc >= cols as isize {
                continue;
            }
            let n = (nr as usize, nc as usize);
            let free = n == goal || state.receptacle_at(n).is_none();
            if free && dist[n.0 * cols + n.1] == usize::MAX {
                dist[n.0 * cols + n.1] = d + 1;
                q.push_back(n);
            }
        }
    }
    None
}

#[test]
fn shortest_paths_match_a_plain_grid_search() {
    for seed in 0..30 {
        let (w, _) = generate_task(seed, TaskType::ALL[seed as usize % 6], seed % 2 == 0).unwrap();
        for r in &w.receptacles {
            let path = shortest_path(&w, w.agent_pos, r.grid_pos).expect("reachable");
            assert_eq!(Some(path.len()), grid_bfs(&w, w.agent_pos, r.grid_pos), "{}", r.id);
        }
    }
}

/// Keeps the receptacles the task needs plus a few others and drops
/// distractor objects, so exhaustive search stays small.
fn shrink(world: &WorldState, task: &TaskSpec, extra: usize) -> WorldState {
    let goal = &task.goal;
    let keep_obj = |id: &String| {
        let k = world.objects[id].kind;
        k == goal.object || (goal.under_light && k == emac::world::ObjectKind::Desklamp)
    };
    let mut kept_extra = 0;
    let mut out = world.clone();
    out.receptacles.retain(|r| {
        let needed = r.contents.iter().any(keep_obj)
            || Some(r.kind) == goal.destination
            || matches!(
                (goal.flag, r.kind),
                (Some(emac::world::StateFlag::Hot), emac::world::ReceptacleKind::Microwave)
                    | (Some(emac::world::StateFlag::Cold), emac::world::ReceptacleKind::Fridge)
                    | (Some(emac::world::StateFlag::Clean), emac::world::ReceptacleKind::Sinkbasin)
            );
        if needed {
            return true;
        }
        kept_extra += 1;
        kept_extra <= extra
    });
    for r in &mut out.receptacles {
        r.contents.retain(keep_obj);
    }
    out.objects.retain(|id, _| keep_obj(id));
    out
}

fn key(s: &WorldState) -> String {
    let recs: Vec<_> = s.receptacles.iter().map(|r| (r.is_open, &r.contents)).collect();
    let flags: Vec<_> = s.objects.values().map(|o| &o.state_flags).collect();
    serde_json::to_string(&(&s.agent_facing, &s.inventory, recs, flags, &s.observed)).unwrap()
}

/// Breadth-first search over full world states, with the same
/// search discipline as the oracle: an object may only be taken or used
/// once every lower-numbered receptacle of its holder's kind was seen.
fn brute_force_len(start: &WorldState, task: &TaskSpec, limit: usize) -> Option<usize> {
    let mut seen = HashSet::from([key(start)]);
    let mut frontier = vec![start.clone()];
    for depth in 0..=limit {
        if frontier.iter().any(|s| check_success(s, task)) {
            return Some(depth);
        }
        let mut next = Vec::new();
        for s in &frontier {
            for a in valid_actions(s) {
                if matches!(a.verb, Verb::Take | Verb::Use) {
                    let holder = match s.location_of(a.object_arg().unwrap()) {
                        Some(Location::In(i)) => i,
                        _ => continue,
                    };
                    if !search_rule_allows(s, holder) {
                        continue;
                    }
                }
                let Ok((n, outcome, _)) = step_skill(s, &a) else { continue };
                if outcome.success && seen.insert(key(&n)) {
                    next.push(n);
                }
            }
        }
        frontier = next;
    }
    None
}

#[test]
fn oracle_plans_are_as_short_as_exhaustive_search() {
    let mut checked = 0;
    for seed in 0..40u64 {
        let t = TaskType::ALL[seed as usize % 6];
        let Ok((world, task)) = generate_task(seed, t, seed % 3 == 0) else { continue };
        let mut small = shrink(&world, &task, 2);
        small.horizon = 40;
        let Ok(plan) = oracle_search(&small, &task) else { continue };
        if plan.steps.len() > 8 {
            continue;
        }
        let best = brute_force_len(&small, &task, plan.steps.len());
        assert_eq!(best, Some(plan.steps.len()), "seed {seed} {t}: {:?}", plan.surface_forms());
        checked += 1;
    }
    assert!(checked >= 20, "only {checked} instances were small enough");
}

#[test]
fn oracle_plans_execute_to_success() {
    for seed in 0..60u64 {
        let t = TaskType::ALL[seed as usize % 6];
        let (world, task) = generate_task(seed, t, seed % 2 == 1).unwrap();
        let plan = oracle_search(&world, &task).unwrap();
        let mut s = world;
        for a in &plan.steps {
            let (n, outcome, _) = step_skill(&s, a).unwrap();
            assert!(outcome.success, "{}", a.surface_form);
            s = n;
        }
        assert!(check_success(&s, &task));
    }
}
